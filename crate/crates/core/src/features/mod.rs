//! The 58-feature representation: 35 EEG, 13 GSR and 10 EMG statistics per
//! video, computed over the last 30 s of each clip.

mod dataset;
mod extract;
mod io;
mod mask;
mod stats;

pub use dataset::{build_dataset, project_sensors, Dataset, LabeledInstance, SessionFeatures};
pub use extract::{eeg_features, emg_features, feature_window, gsr_features, EEG_SERIES};
pub use io::{read_feature_csv, write_feature_csv, METADATA_COLUMNS};
pub use mask::{Block, SensorMask};
pub use stats::{summary_stats, SummaryStats};

use crate::model::Target;

pub const EEG_FEATURES: usize = 35;
pub const GSR_FEATURES: usize = 13;
pub const EMG_FEATURES: usize = 10;
pub const FEATURE_COUNT: usize = EEG_FEATURES + GSR_FEATURES + EMG_FEATURES;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("empty feature window")]
    EmptyWindow,
    #[error("missing series: {0}")]
    MissingSeries(String),
    #[error("duplicate instance for subject {subject_id}, video {video_id}")]
    DuplicateInstance { subject_id: String, video_id: u32 },
    #[error("empty sensor mask")]
    EmptyMask,
    #[error("mask {requested} is not a subset of the dataset mask {available}")]
    MaskNotSubset {
        requested: SensorMask,
        available: SensorMask,
    },
    #[error("instance has {found} features, dataset expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite feature {name} for subject {subject_id}, video {video_id}")]
    NonFinite {
        name: String,
        subject_id: String,
        video_id: u32,
    },
    #[error("feature CSV: {0}")]
    Csv(String),
    #[error("label lookup for video {video_id}: {reason}")]
    Label { video_id: u32, reason: String },
}

const STAT_NAMES: [&str; 5] = ["mean", "min", "max", "var", "std"];

/// Canonical feature names, in vector order.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    for series in [
        "alpha",
        "beta",
        "gamma",
        "delta",
        "theta",
        "attention",
        "meditation",
    ] {
        for stat in STAT_NAMES {
            names.push(format!("eeg_{series}_{stat}"));
        }
    }
    for stat in STAT_NAMES {
        names.push(format!("gsr_phasic_{stat}"));
    }
    for n in [
        "gsr_deriv_mean",
        "gsr_deriv_neg_mean",
        "gsr_deriv_neg_frac",
        "gsr_peak_width_mean",
        "gsr_peak_width_min",
        "gsr_peak_width_max",
        "gsr_peak_count_per_min_width",
        "gsr_peak_amp_sum_per_min_width",
    ] {
        names.push(n.to_string());
    }
    for ch in ["ch1", "ch2"] {
        for stat in STAT_NAMES {
            names.push(format!("emg_{ch}_{stat}"));
        }
    }
    names
}

/// Full 58-value vector for one (subject, video).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn from_blocks(
        eeg: &[f64; EEG_FEATURES],
        gsr: &[f64; GSR_FEATURES],
        emg: &[f64; EMG_FEATURES],
    ) -> Self {
        let mut v = [0.0; FEATURE_COUNT];
        v[..EEG_FEATURES].copy_from_slice(eeg);
        v[EEG_FEATURES..EEG_FEATURES + GSR_FEATURES].copy_from_slice(gsr);
        v[EEG_FEATURES + GSR_FEATURES..].copy_from_slice(emg);
        FeatureVector(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn block(&self, block: Block) -> &[f64] {
        &self.0[block.range()]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl LabeledInstance {
    pub fn label(&self, target: Target) -> crate::model::Class {
        match target {
            Target::Valence => self.valence,
            Target::Arousal => self.arousal,
        }
    }
}
