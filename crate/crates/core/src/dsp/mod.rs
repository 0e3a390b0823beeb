//! Signal conditioning for the three sensors.
//!
//! ```text
//! EEG_raw ──► band_power_series (1 s Hamming STFT, 2 Hz) ──► delta..gamma power
//! GSR     ──► gsr_decompose (0.05 Hz low-pass) ──► tonic / phasic
//!                               phasic ──► wavelet_denoise (db4) ──► detect_peaks
//! EMG     ──► bandpass_filter (20-125 Hz) ──► emg_envelope (rectify + 100 ms mean)
//! every derived series ──► baseline_correct (per trial)
//! ```
//!
//! Every transform is a pure function; nothing here holds state between calls.

mod bands;
mod baseline;
mod emg;
pub mod filter;
mod gsr;
mod peaks;
mod series;
pub mod wavelet;

pub use bands::{band_power_series, band_powers, BandName, BandSpec};
pub use baseline::baseline_correct;
pub use emg::emg_envelope;
pub use filter::bandpass_filter;
pub use gsr::gsr_decompose;
pub use peaks::{detect_peaks, Peak, PeakSet};
pub use series::{DerivedSeries, SeriesKind};
pub use wavelet::{wavelet_denoise, Threshold, WaveletConfig, WaveletFamily};

use serde::{Deserialize, Serialize};

use crate::model::SensorKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DspError {
    #[error("bad band {low_hz}-{high_hz} Hz for a {rate_hz} Hz signal")]
    BadBand {
        low_hz: f64,
        high_hz: f64,
        rate_hz: f64,
    },
    #[error("signal too short: {len} samples, need {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("unsupported filter order {0}")]
    BadOrder(usize),
    #[error("expected {expected} input, got {found}")]
    WrongKind {
        expected: &'static str,
        found: String,
    },
    #[error("window [{start_s}, {end_s}) lies outside the series extent [{series_start_s}, {series_end_s})")]
    WindowOutOfRange {
        start_s: f64,
        end_s: f64,
        series_start_s: f64,
        series_end_s: f64,
    },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// All signal-conditioning knobs. Defaults are the pipeline's reference configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DspConfig {
    pub bands: Vec<BandSpec>,
    pub emg_band_hz: (f64, f64),
    pub emg_filter_order: usize,
    pub gsr_tonic_cutoff_hz: f64,
    pub wavelet: WaveletConfig,
    pub peak_prominence_factor: f64,
    /// Absolute prominence floor for SCR peaks, µS.
    pub peak_min_prominence_us: f64,
    pub emg_window_s: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        DspConfig {
            bands: BandSpec::defaults().to_vec(),
            emg_band_hz: (20.0, 125.0),
            emg_filter_order: 4,
            gsr_tonic_cutoff_hz: 0.05,
            wavelet: WaveletConfig::default(),
            peak_prominence_factor: 0.5,
            peak_min_prominence_us: 0.01,
            emg_window_s: 0.1,
        }
    }
}

impl DspConfig {
    pub fn validate(&self) -> Result<(), DspError> {
        let bad = |m: String| Err(DspError::BadParameter(m));
        let mut names: Vec<BandName> = self.bands.iter().map(|b| b.name).collect();
        names.sort();
        if names != BandName::ALL {
            return bad("bands must list delta, theta, alpha, beta and gamma once each".into());
        }
        for b in &self.bands {
            b.check(SensorKind::EegRaw.expected_rate_hz())?;
        }
        let (lo, hi) = self.emg_band_hz;
        if !(lo > 0.0 && lo < hi && hi < SensorKind::EmgCh1.expected_rate_hz() / 2.0) {
            return Err(DspError::BadBand {
                low_hz: lo,
                high_hz: hi,
                rate_hz: SensorKind::EmgCh1.expected_rate_hz(),
            });
        }
        if !matches!(self.emg_filter_order, 2 | 4) {
            return Err(DspError::BadOrder(self.emg_filter_order));
        }
        let nyq_gsr = SensorKind::Gsr.expected_rate_hz() / 2.0;
        if !(self.gsr_tonic_cutoff_hz > 0.0 && self.gsr_tonic_cutoff_hz < nyq_gsr) {
            return bad(format!(
                "gsr_tonic_cutoff_hz = {}",
                self.gsr_tonic_cutoff_hz
            ));
        }
        self.wavelet.validate()?;
        if !(self.peak_prominence_factor.is_finite() && self.peak_prominence_factor >= 0.0) {
            return bad(format!(
                "peak_prominence_factor = {}",
                self.peak_prominence_factor
            ));
        }
        if !(self.peak_min_prominence_us.is_finite() && self.peak_min_prominence_us >= 0.0) {
            return bad(format!(
                "peak_min_prominence_us = {}",
                self.peak_min_prominence_us
            ));
        }
        if !(self.emg_window_s > 0.0 && self.emg_window_s <= 1.0) {
            return bad(format!("emg_window_s = {}", self.emg_window_s));
        }
        Ok(())
    }

    pub fn band(&self, name: BandName) -> BandSpec {
        *self
            .bands
            .iter()
            .find(|b| b.name == name)
            .expect("validated band list")
    }
}
