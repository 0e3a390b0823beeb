use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{feature_names, FeatureError, FeatureVector, SensorMask};
use crate::model::{Class, Target, VideoLabelTable};

/// Feature rows of one processed session, keyed by video id.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionFeatures {
    pub subject_id: String,
    pub rows: Vec<(u32, FeatureVector)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub subject_id: String,
    pub video_id: u32,
    /// Laid out by the owning dataset's mask.
    pub features: Vec<f64>,
    pub valence: Class,
    pub arousal: Class,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    instances: Vec<LabeledInstance>,
    mask: SensorMask,
}

impl Dataset {
    pub fn new(instances: Vec<LabeledInstance>, mask: SensorMask) -> Result<Self, FeatureError> {
        if mask.is_empty() {
            return Err(FeatureError::EmptyMask);
        }
        let dim = mask.dimension();
        let mut seen = BTreeSet::new();
        for inst in &instances {
            if inst.features.len() != dim {
                return Err(FeatureError::DimensionMismatch {
                    expected: dim,
                    found: inst.features.len(),
                });
            }
            if !seen.insert((inst.subject_id.as_str(), inst.video_id)) {
                return Err(FeatureError::DuplicateInstance {
                    subject_id: inst.subject_id.clone(),
                    video_id: inst.video_id,
                });
            }
        }
        Ok(Dataset { instances, mask })
    }

    pub fn instances(&self) -> &[LabeledInstance] {
        &self.instances
    }

    pub fn mask(&self) -> SensorMask {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.mask.dimension()
    }

    pub fn feature_names(&self) -> Vec<String> {
        let all = feature_names();
        self.mask
            .full_indices()
            .into_iter()
            .map(|i| all[i].clone())
            .collect()
    }

    pub fn labels(&self, target: Target) -> Vec<Class> {
        self.instances.iter().map(|i| i.label(target)).collect()
    }

    /// Rows `ids` (in the given order) as a new dataset with the same mask.
    pub fn subset(&self, ids: &[usize]) -> Dataset {
        Dataset {
            instances: ids.iter().map(|&i| self.instances[i].clone()).collect(),
            mask: self.mask,
        }
    }
}

/// One labeled instance per (subject, video). Videos whose valence or arousal
/// falls between the thresholds are dropped.
pub fn build_dataset(
    sessions: &[SessionFeatures],
    table: &VideoLabelTable,
) -> Result<Dataset, FeatureError> {
    let names = feature_names();
    let mut instances = Vec::new();
    for session in sessions {
        for (video_id, fv) in &session.rows {
            if let Some(i) = fv.values().iter().position(|v| !v.is_finite()) {
                return Err(FeatureError::NonFinite {
                    name: names[i].clone(),
                    subject_id: session.subject_id.clone(),
                    video_id: *video_id,
                });
            }
            let (valence, arousal) = table.lookup(*video_id).map_err(|e| FeatureError::Label {
                video_id: *video_id,
                reason: e.to_string(),
            })?;
            let (Some(valence), Some(arousal)) = (valence.class(), arousal.class()) else {
                continue;
            };
            instances.push(LabeledInstance {
                subject_id: session.subject_id.clone(),
                video_id: *video_id,
                features: fv.values().to_vec(),
                valence,
                arousal,
            });
        }
    }
    Dataset::new(instances, SensorMask::ALL)
}

/// Keep only the blocks in `mask`, preserving canonical order.
pub fn project_sensors(dataset: &Dataset, mask: SensorMask) -> Result<Dataset, FeatureError> {
    if mask.is_empty() {
        return Err(FeatureError::EmptyMask);
    }
    if !mask.is_subset_of(dataset.mask) {
        return Err(FeatureError::MaskNotSubset {
            requested: mask,
            available: dataset.mask,
        });
    }
    let idx: Vec<usize> = mask
        .blocks()
        .flat_map(|b| {
            let off = dataset.mask.offset_of(b).expect("subset checked");
            off..off + b.size()
        })
        .collect();
    let instances = dataset
        .instances
        .iter()
        .map(|inst| LabeledInstance {
            features: idx.iter().map(|&i| inst.features[i]).collect(),
            ..inst.clone()
        })
        .collect();
    Ok(Dataset { instances, mask })
}
