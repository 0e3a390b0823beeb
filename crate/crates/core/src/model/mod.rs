//! Domain types: sensor traces, the session protocol, stimulus labels and
//! session manifests.

mod labels;
mod manifest;
mod timeline;
mod trace;

pub use labels::{
    discretize_score, Class, EmotionClass, Label, Target, VideoEntry, VideoLabelTable,
};
pub use manifest::{parse_manifest, serialize_manifest, SessionManifest};
pub use timeline::{segment_session, ProtocolTimeline, TrialSegment, VideoWindow, Window};
pub use trace::{load_trace, write_trace, RawTrace, SensorKind};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("manifest is missing channel {0}")]
    MissingChannel(SensorKind),
    #[error("unknown video id {0}")]
    UnknownVideo(u32),
    #[error("invalid timeline: {0}")]
    InvalidTimeline(String),
    #[error("malformed trace {path}: {reason}")]
    MalformedTrace { path: PathBuf, reason: String },
    #[error("{path}: header rate {found} Hz does not match the {expected} Hz expected for {kind}")]
    RateMismatch {
        path: PathBuf,
        kind: SensorKind,
        expected: f64,
        found: f64,
    },
    #[error("{path}: non-finite sample on line {line}")]
    NonFinite { path: PathBuf, line: usize },
    #[error("score {0} outside [1, 9]")]
    OutOfRange(f64),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
