use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Upper bound (inclusive) of the Low class on the 1-9 rating scale.
pub const LOW_MAX: f64 = 4.5;
/// Lower bound (inclusive) of the High class.
pub const HIGH_MIN: f64 = 6.0;

/// Discretized rating. `Unassigned` covers the gap between the two thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Low,
    High,
    Unassigned,
}

impl Label {
    pub fn class(self) -> Option<Class> {
        match self {
            Label::Low => Some(Class::Low),
            Label::High => Some(Class::High),
            Label::Unassigned => None,
        }
    }
}

/// Binary class used by datasets and classifiers. `Low` sorts first and wins ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    Low,
    High,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::Low, Class::High];

    pub fn index(self) -> usize {
        match self {
            Class::Low => 0,
            Class::High => 1,
        }
    }

    pub fn from_index(i: usize) -> Class {
        if i == 0 {
            Class::Low
        } else {
            Class::High
        }
    }

    /// SVM sign convention: High = +1.
    pub fn sign(self) -> f64 {
        match self {
            Class::Low => -1.0,
            Class::High => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Class::Low => "Low",
            Class::High => "High",
        }
    }

    pub fn parse(s: &str) -> Option<Class> {
        match s {
            "Low" | "low" => Some(Class::Low),
            "High" | "high" => Some(Class::High),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which affective dimension a classifier predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Valence,
    Arousal,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Valence, Target::Arousal];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Valence => "valence",
            Target::Arousal => "arousal",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "valence" => Ok(Target::Valence),
            "arousal" => Ok(Target::Arousal),
            other => Err(format!("unknown target '{other}'")),
        }
    }
}

/// Map a 1-9 rating to Low (<= 4.5), High (>= 6) or Unassigned.
pub fn discretize_score(score: f64) -> Result<Label, ModelError> {
    if !(1.0..=9.0).contains(&score) {
        return Err(ModelError::OutOfRange(score));
    }
    Ok(if score <= LOW_MAX {
        Label::Low
    } else if score >= HIGH_MIN {
        Label::High
    } else {
        Label::Unassigned
    })
}

/// Quadrant of the arousal/valence plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmotionClass {
    #[serde(rename = "LAHV")]
    Lahv,
    #[serde(rename = "LALV")]
    Lalv,
    #[serde(rename = "HAHV")]
    Hahv,
    #[serde(rename = "HALV")]
    Halv,
}

impl EmotionClass {
    /// (arousal, valence) implied by the class letters.
    pub fn labels(self) -> (Label, Label) {
        match self {
            EmotionClass::Lahv => (Label::Low, Label::High),
            EmotionClass::Lalv => (Label::Low, Label::Low),
            EmotionClass::Hahv => (Label::High, Label::High),
            EmotionClass::Halv => (Label::High, Label::Low),
        }
    }

    /// Arousal and valence score ranges of the stimulus set.
    pub fn ranges(self) -> ((f64, f64), (f64, f64)) {
        match self {
            EmotionClass::Lahv => ((3.86, 4.21), (6.57, 7.13)),
            EmotionClass::Lalv => ((2.75, 2.93), (3.25, 3.33)),
            EmotionClass::Hahv => ((6.40, 7.33), (7.07, 7.20)),
            EmotionClass::Halv => ((6.13, 6.33), (3.53, 3.93)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoEntry {
    pub arousal_score: f64,
    pub valence_score: f64,
    pub class: EmotionClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoLabelTable {
    entries: BTreeMap<u32, VideoEntry>,
}

impl Default for VideoLabelTable {
    /// The eight music videos, each scored at the midpoint of its class range.
    fn default() -> Self {
        let classes = [
            (24, EmotionClass::Lahv),
            (80, EmotionClass::Lahv),
            (41, EmotionClass::Lalv),
            (96, EmotionClass::Lalv),
            (63, EmotionClass::Hahv),
            (88, EmotionClass::Hahv),
            (56, EmotionClass::Halv),
            (111, EmotionClass::Halv),
        ];
        let entries = classes
            .into_iter()
            .map(|(id, class)| {
                let ((a_lo, a_hi), (v_lo, v_hi)) = class.ranges();
                let entry = VideoEntry {
                    arousal_score: (a_lo + a_hi) / 2.0,
                    valence_score: (v_lo + v_hi) / 2.0,
                    class,
                };
                (id, entry)
            })
            .collect();
        VideoLabelTable { entries }
    }
}

impl VideoLabelTable {
    pub fn new(entries: BTreeMap<u32, VideoEntry>) -> Self {
        VideoLabelTable { entries }
    }

    pub fn get(&self, video_id: u32) -> Option<&VideoEntry> {
        self.entries.get(&video_id)
    }

    pub fn contains(&self, video_id: u32) -> bool {
        self.entries.contains_key(&video_id)
    }

    pub fn video_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns `(valence, arousal)` for a video.
    pub fn lookup(&self, video_id: u32) -> Result<(Label, Label), ModelError> {
        let entry = self
            .get(video_id)
            .ok_or(ModelError::UnknownVideo(video_id))?;
        Ok((
            discretize_score(entry.valence_score)?,
            discretize_score(entry.arousal_score)?,
        ))
    }

    /// Video ids sorted by ascending arousal score (ties by id), the
    /// presentation order used by the protocol.
    pub fn by_increasing_arousal(&self) -> Vec<u32> {
        let mut ids: Vec<(f64, u32)> = self
            .entries
            .iter()
            .map(|(&id, e)| (e.arousal_score, id))
            .collect();
        ids.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ids.into_iter().map(|(_, id)| id).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(discretize_score(4.5).unwrap(), Label::Low);
        assert_eq!(discretize_score(6.57).unwrap(), Label::High);
        assert_eq!(discretize_score(5.2).unwrap(), Label::Unassigned);
        assert_eq!(discretize_score(6.0).unwrap(), Label::High);
        assert_eq!(discretize_score(1.0).unwrap(), Label::Low);
        assert_eq!(discretize_score(9.0).unwrap(), Label::High);
        assert!(matches!(
            discretize_score(0.99),
            Err(ModelError::OutOfRange(_))
        ));
        assert!(matches!(
            discretize_score(9.01),
            Err(ModelError::OutOfRange(_))
        ));
        assert!(discretize_score(f64::NAN).is_err());
    }

    #[test]
    fn table_lookups() {
        let table = VideoLabelTable::default();
        assert_eq!(table.len(), 8);
        assert_eq!(table.lookup(24).unwrap(), (Label::High, Label::Low));
        assert_eq!(table.lookup(96).unwrap(), (Label::Low, Label::Low));
        assert_eq!(table.lookup(63).unwrap(), (Label::High, Label::High));
        assert!(matches!(
            table.lookup(999),
            Err(ModelError::UnknownVideo(999))
        ));
    }

    #[test]
    fn table_scores_agree_with_class_letters() {
        let table = VideoLabelTable::default();
        for id in table.video_ids() {
            let entry = table.get(id).unwrap();
            let ((a_lo, a_hi), (v_lo, v_hi)) = entry.class.ranges();
            assert!((a_lo..=a_hi).contains(&entry.arousal_score));
            assert!((v_lo..=v_hi).contains(&entry.valence_score));
            let (valence, arousal) = table.lookup(id).unwrap();
            assert_eq!((arousal, valence), entry.class.labels(), "video {id}");
        }
    }

    #[test]
    fn presentation_order() {
        let table = VideoLabelTable::default();
        assert_eq!(
            table.by_increasing_arousal(),
            vec![41, 96, 24, 80, 56, 111, 63, 88]
        );
    }

    proptest::proptest! {
        #[test]
        fn discretize_is_monotone(a in 1.0f64..=9.0, b in 1.0f64..=9.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let l1 = discretize_score(lo).unwrap();
            let l2 = discretize_score(hi).unwrap();
            proptest::prop_assert!(!(l1 == Label::High && l2 == Label::Low));
            proptest::prop_assert!(!(l1 == Label::High && l2 == Label::Unassigned));
            proptest::prop_assert!(!(l1 == Label::Unassigned && l2 == Label::Low));
        }
    }
}
