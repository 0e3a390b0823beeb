use serde::{Deserialize, Serialize};

use super::{ModelError, VideoLabelTable};

/// Half-open time interval `[start_s, end_s)` in session-relative seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start_s: f64,
    pub end_s: f64,
}

impl Window {
    pub fn new(start_s: f64, end_s: f64) -> Self {
        Window { start_s, end_s }
    }

    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_s && t < self.end_s
    }
}

/// Session layout: each trial shows a trial-number screen, a neutral
/// baseline clip, then its music videos back to back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTimeline {
    pub trial_count: usize,
    pub trial_screen_s: f64,
    pub baseline_s: f64,
    pub video_s: f64,
    pub videos_per_trial: usize,
    pub video_order: Vec<u32>,
}

impl Default for ProtocolTimeline {
    fn default() -> Self {
        ProtocolTimeline::with_order(VideoLabelTable::default().by_increasing_arousal())
    }
}

impl ProtocolTimeline {
    /// Standard durations (3 s screen, 30 s baseline, 2 x 60 s videos) for
    /// the given video order; the trial count follows from its length.
    pub fn with_order(video_order: Vec<u32>) -> Self {
        ProtocolTimeline {
            trial_count: video_order.len().div_ceil(2),
            trial_screen_s: 3.0,
            baseline_s: 30.0,
            video_s: 60.0,
            videos_per_trial: 2,
            video_order,
        }
    }

    pub fn trial_duration_s(&self) -> f64 {
        self.trial_screen_s + self.baseline_s + self.videos_per_trial as f64 * self.video_s
    }

    pub fn session_duration_s(&self) -> f64 {
        self.trial_count as f64 * self.trial_duration_s()
    }

    pub fn validate(&self, table: &VideoLabelTable) -> Result<(), ModelError> {
        if self.trial_count == 0 {
            return Err(ModelError::InvalidTimeline(
                "trial_count must be positive".into(),
            ));
        }
        if self.videos_per_trial == 0 {
            return Err(ModelError::InvalidTimeline(
                "videos_per_trial must be positive".into(),
            ));
        }
        for (name, v) in [
            ("trial_screen_s", self.trial_screen_s),
            ("baseline_s", self.baseline_s),
            ("video_s", self.video_s),
        ] {
            if !v.is_finite() || v < 0.0 || (name != "trial_screen_s" && v == 0.0) {
                return Err(ModelError::InvalidTimeline(format!("{name} = {v}")));
            }
        }
        let expected = self.trial_count * self.videos_per_trial;
        if self.video_order.len() != expected {
            return Err(ModelError::InvalidTimeline(format!(
                "video_order has {} entries, expected {expected}",
                self.video_order.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &id in &self.video_order {
            if !table.contains(id) {
                return Err(ModelError::UnknownVideo(id));
            }
            if !seen.insert(id) {
                return Err(ModelError::InvalidTimeline(format!(
                    "video {id} listed twice"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoWindow {
    pub video_id: u32,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSegment {
    /// 1-based.
    pub trial_index: usize,
    pub trial_start_s: f64,
    pub baseline: Window,
    pub videos: Vec<VideoWindow>,
}

/// Cut a session into trials. Trial `k` starts at `(k - 1) * trial_duration`;
/// its baseline follows the trial screen and the videos follow the baseline.
///
/// The timeline is assumed valid (see [`ProtocolTimeline::validate`]).
pub fn segment_session(timeline: &ProtocolTimeline) -> Vec<TrialSegment> {
    let trial_len = timeline.trial_duration_s();
    (0..timeline.trial_count)
        .map(|k| {
            let start = k as f64 * trial_len;
            let base_start = start + timeline.trial_screen_s;
            let base_end = base_start + timeline.baseline_s;
            let videos = (0..timeline.videos_per_trial)
                .map(|v| {
                    let s = base_end + v as f64 * timeline.video_s;
                    VideoWindow {
                        video_id: timeline.video_order[k * timeline.videos_per_trial + v],
                        window: Window::new(s, s + timeline.video_s),
                    }
                })
                .collect();
            TrialSegment {
                trial_index: k + 1,
                trial_start_s: start,
                baseline: Window::new(base_start, base_end),
                videos,
            }
        })
        .collect()
}
