use super::{DerivedSeries, DspError};
use crate::model::Window;

// Tolerance when comparing window edges to the series extent.
const EDGE_EPS: f64 = 1e-9;

/// Subtract the mean of the samples inside `baseline` from the whole series.
pub fn baseline_correct(
    series: &DerivedSeries,
    baseline: Window,
) -> Result<DerivedSeries, DspError> {
    let out_of_range = || DspError::WindowOutOfRange {
        start_s: baseline.start_s,
        end_s: baseline.end_s,
        series_start_s: series.start_offset_s,
        series_end_s: series.end_s(),
    };
    if baseline.start_s < series.start_offset_s - EDGE_EPS
        || baseline.end_s > series.end_s() + EDGE_EPS
        || baseline.end_s <= baseline.start_s
    {
        return Err(out_of_range());
    }
    let vals = series.values_in(baseline);
    if vals.is_empty() {
        return Err(out_of_range());
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    Ok(DerivedSeries {
        values: series.values.iter().map(|v| v - mean).collect(),
        ..series.clone()
    })
}
