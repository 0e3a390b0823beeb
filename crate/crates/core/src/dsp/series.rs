use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{BandName, DspError};
use crate::model::{SensorKind, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    BandPower(BandName),
    GsrTonic,
    GsrPhasic,
    GsrPhasicDenoised,
    EmgEnvelope(SensorKind),
    Attention,
    Meditation,
}

/// A uniformly sampled series computed from a raw trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSeries {
    pub kind: SeriesKind,
    pub rate_hz: f64,
    /// Time of `values[0]` in session seconds.
    pub start_offset_s: f64,
    pub values: Vec<f64>,
}

// Sample times are start + i / rate; absorb rounding when a boundary lands on a sample.
const TIME_EPS: f64 = 1e-9;

impl DerivedSeries {
    pub fn new(kind: SeriesKind, rate_hz: f64, start_offset_s: f64, values: Vec<f64>) -> Self {
        DerivedSeries {
            kind,
            rate_hz,
            start_offset_s,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_of(&self, i: usize) -> f64 {
        self.start_offset_s + i as f64 / self.rate_hz
    }

    /// End of the covered extent, one sample period past the last sample.
    pub fn end_s(&self) -> f64 {
        self.time_of(self.values.len())
    }

    fn index_at_or_after(&self, t: f64) -> usize {
        let pos = ((t - self.start_offset_s) * self.rate_hz - TIME_EPS).ceil();
        pos.clamp(0.0, self.values.len() as f64) as usize
    }

    /// Indices of the samples whose timestamps fall in `[start_s, end_s)`.
    pub fn index_range(&self, window: Window) -> Range<usize> {
        let a = self.index_at_or_after(window.start_s);
        let b = self.index_at_or_after(window.end_s).max(a);
        a..b
    }

    pub fn values_in(&self, window: Window) -> &[f64] {
        &self.values[self.index_range(window)]
    }

    pub fn slice(&self, window: Window) -> DerivedSeries {
        let r = self.index_range(window);
        DerivedSeries {
            kind: self.kind,
            rate_hz: self.rate_hz,
            start_offset_s: self.time_of(r.start),
            values: self.values[r].to_vec(),
        }
    }

    pub(crate) fn expect_kind(&self, kind: SeriesKind) -> Result<(), DspError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(DspError::WrongKind {
                expected: kind_name(kind),
                found: format!("{:?}", self.kind),
            })
        }
    }
}

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::BandPower(_) => "band power",
        SeriesKind::GsrTonic => "GSR tonic",
        SeriesKind::GsrPhasic => "GSR phasic",
        SeriesKind::GsrPhasicDenoised => "denoised GSR phasic",
        SeriesKind::EmgEnvelope(_) => "EMG envelope",
        SeriesKind::Attention => "attention",
        SeriesKind::Meditation => "meditation",
    }
}
