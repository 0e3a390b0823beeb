use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Population variance (divides by n).
    pub variance: f64,
    pub std: f64,
}

impl SummaryStats {
    pub fn to_array(self) -> [f64; 5] {
        [self.mean, self.min, self.max, self.variance, self.std]
    }
}

pub fn summary_stats(window: &[f64]) -> Result<SummaryStats, FeatureError> {
    if window.is_empty() {
        return Err(FeatureError::EmptyWindow);
    }
    let n = window.len() as f64;
    let (min, max) = window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    // rounding can push the mean of a near-constant window past its extremes
    let mean = (window.iter().sum::<f64>() / n).clamp(min, max);
    let variance = window.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(SummaryStats {
        mean,
        min,
        max,
        variance,
        std: variance.sqrt(),
    })
}
