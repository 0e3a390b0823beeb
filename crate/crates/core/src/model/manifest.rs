use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ModelError, ProtocolTimeline, SensorKind, VideoLabelTable};

/// One recording session: where each channel lives and how the session was laid out.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionManifest {
    pub subject_id: String,
    pub channels: BTreeMap<SensorKind, PathBuf>,
    pub timeline: ProtocolTimeline,
    /// ISO-8601, informational only. All analysis uses session-relative seconds.
    pub session_start: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimelineDoc {
    trial_count: usize,
    video_order: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    subject_id: String,
    channels: BTreeMap<String, PathBuf>,
    timeline: TimelineDoc,
    session_start: String,
}

impl SessionManifest {
    pub fn channel(&self, kind: SensorKind) -> &Path {
        &self.channels[&kind]
    }

    /// Rewrite relative channel paths against `base`, typically the manifest's directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        for path in self.channels.values_mut() {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

pub fn parse_manifest(text: &str, table: &VideoLabelTable) -> Result<SessionManifest, ModelError> {
    let doc: ManifestDoc =
        serde_json::from_str(text).map_err(|e| ModelError::MalformedManifest(e.to_string()))?;

    let mut channels = BTreeMap::new();
    for (name, path) in doc.channels {
        let kind: SensorKind = name.parse().map_err(ModelError::MalformedManifest)?;
        channels.insert(kind, path);
    }
    if let Some(missing) = SensorKind::ALL
        .into_iter()
        .find(|k| !channels.contains_key(k))
    {
        return Err(ModelError::MissingChannel(missing));
    }

    if doc.subject_id.trim().is_empty() {
        return Err(ModelError::MalformedManifest("empty subject_id".into()));
    }
    chrono::DateTime::parse_from_rfc3339(&doc.session_start)
        .map(|_| ())
        .or_else(|_| {
            chrono::NaiveDateTime::parse_from_str(&doc.session_start, "%Y-%m-%dT%H:%M:%S%.f")
                .map(|_| ())
        })
        .map_err(|e| ModelError::MalformedManifest(format!("session_start: {e}")))?;

    if let Some(&id) = doc
        .timeline
        .video_order
        .iter()
        .find(|id| !table.contains(**id))
    {
        return Err(ModelError::UnknownVideo(id));
    }
    let timeline = ProtocolTimeline {
        trial_count: doc.timeline.trial_count,
        ..ProtocolTimeline::with_order(doc.timeline.video_order)
    };
    timeline.validate(table)?;

    Ok(SessionManifest {
        subject_id: doc.subject_id,
        channels,
        timeline,
        session_start: doc.session_start,
    })
}

pub fn serialize_manifest(manifest: &SessionManifest) -> String {
    let doc = ManifestDoc {
        subject_id: manifest.subject_id.clone(),
        channels: manifest
            .channels
            .iter()
            .map(|(k, p)| (k.as_str().to_string(), p.clone()))
            .collect(),
        timeline: TimelineDoc {
            trial_count: manifest.timeline.trial_count,
            video_order: manifest.timeline.video_order.clone(),
        },
        session_start: manifest.session_start.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("manifest serializes")
}
