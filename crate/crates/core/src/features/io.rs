use std::io::{Read, Write};

use super::{Dataset, FeatureError, LabeledInstance, SensorMask};
use crate::model::Class;

pub const METADATA_COLUMNS: [&str; 4] = ["subject_id", "video_id", "valence", "arousal"];

fn csv_err(e: impl std::fmt::Display) -> FeatureError {
    FeatureError::Csv(e.to_string())
}

/// Metadata columns first, then the dataset's feature columns in canonical order.
pub fn write_feature_csv<W: Write>(writer: W, dataset: &Dataset) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = METADATA_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(dataset.feature_names());
    w.write_record(&header).map_err(csv_err)?;
    for inst in dataset.instances() {
        let mut row = vec![
            inst.subject_id.clone(),
            inst.video_id.to_string(),
            inst.valence.to_string(),
            inst.arousal.to_string(),
        ];
        row.extend(inst.features.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn read_feature_csv<R: Read>(reader: R) -> Result<Dataset, FeatureError> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() < METADATA_COLUMNS.len() || header[..4] != METADATA_COLUMNS {
        return Err(FeatureError::Csv(format!(
            "header must start with {}",
            METADATA_COLUMNS.join(",")
        )));
    }
    let feature_cols = &header[4..];
    let mask = SensorMask::COMBINATIONS
        .into_iter()
        .find(|m| {
            let probe = Dataset::new(Vec::new(), *m).expect("non-empty mask");
            probe.feature_names() == feature_cols
        })
        .ok_or_else(|| {
            FeatureError::Csv("feature columns do not match any sensor combination".into())
        })?;

    let mut instances = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let at = |what: &str| FeatureError::Csv(format!("row {}: bad {what}", line + 2));
        let class = |s: &str, what: &str| Class::parse(s).ok_or_else(|| at(what));
        let features = rec
            .iter()
            .skip(4)
            .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| at("feature value"))?;
        instances.push(LabeledInstance {
            subject_id: rec[0].to_string(),
            video_id: rec[1].parse().map_err(|_| at("video_id"))?,
            valence: class(&rec[2], "valence")?,
            arousal: class(&rec[3], "arousal")?,
            features,
        });
    }
    Dataset::new(instances, mask)
}
