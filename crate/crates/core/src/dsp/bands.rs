use std::fmt;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{DerivedSeries, DspError, SeriesKind};
use crate::model::{RawTrace, SensorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandName {
    Delta,
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl BandName {
    pub const ALL: [BandName; 5] = [
        BandName::Delta,
        BandName::Theta,
        BandName::Alpha,
        BandName::Beta,
        BandName::Gamma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BandName::Delta => "delta",
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
            BandName::Gamma => "gamma",
        }
    }
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// EEG frequency band, half-open `[low_hz, high_hz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub name: BandName,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl BandSpec {
    pub const fn new(name: BandName, low_hz: f64, high_hz: f64) -> Self {
        BandSpec {
            name,
            low_hz,
            high_hz,
        }
    }

    /// Non-overlapping defaults; open-ended bands are closed at 0.5 and 100 Hz.
    pub const fn defaults() -> [BandSpec; 5] {
        [
            BandSpec::new(BandName::Delta, 0.5, 4.0),
            BandSpec::new(BandName::Theta, 4.0, 7.5),
            BandSpec::new(BandName::Alpha, 8.0, 12.5),
            BandSpec::new(BandName::Beta, 13.0, 30.0),
            BandSpec::new(BandName::Gamma, 30.0, 100.0),
        ]
    }

    pub fn default_for(name: BandName) -> BandSpec {
        BandSpec::defaults()[BandName::ALL.iter().position(|n| *n == name).unwrap()]
    }

    pub(crate) fn check(&self, rate_hz: f64) -> Result<(), DspError> {
        if self.low_hz > 0.0 && self.low_hz < self.high_hz && self.high_hz < rate_hz / 2.0 {
            Ok(())
        } else {
            Err(DspError::BadBand {
                low_hz: self.low_hz,
                high_hz: self.high_hz,
                rate_hz,
            })
        }
    }
}

/// Short-time band power of raw EEG for several bands from one STFT.
///
/// Frames are 1 s Hamming windows with 50% overlap, so the output runs at
/// 2 Hz and each value is stamped at its frame centre. A value is the
/// one-sided periodogram power (signal units squared) summed over the bins
/// whose frequency lies in `[low_hz, high_hz)`.
pub fn band_powers(eeg: &RawTrace, bands: &[BandSpec]) -> Result<Vec<DerivedSeries>, DspError> {
    if eeg.sensor_kind() != SensorKind::EegRaw {
        return Err(DspError::WrongKind {
            expected: "EEG_raw",
            found: eeg.sensor_kind().to_string(),
        });
    }
    let fs = eeg.sampling_rate_hz();
    for b in bands {
        b.check(fs)?;
    }
    let win = fs.round() as usize;
    let x = eeg.samples();
    if win < 2 || x.len() < win {
        return Err(DspError::TooShort {
            len: x.len(),
            needed: win.max(2),
        });
    }
    let hop = win / 2;
    let frames = (x.len() - win) / hop + 1;

    let window: Vec<f64> = (0..win)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (win - 1) as f64).cos())
        .collect();
    let win_energy: f64 = window.iter().map(|w| w * w).sum();
    let df = fs / win as f64;
    // psd[k] * df = c_k |X_k|^2 / (N * sum w^2)
    let scale = 1.0 / (win as f64 * win_energy);

    let bins: Vec<Vec<usize>> = bands
        .iter()
        .map(|b| {
            (0..=win / 2)
                .filter(|&k| {
                    let f = k as f64 * df;
                    f >= b.low_hz && f < b.high_hz
                })
                .collect()
        })
        .collect();

    let fft = FftPlanner::new().plan_fft_forward(win);
    let mut buf = vec![Complex64::new(0.0, 0.0); win];
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(frames); bands.len()];
    for f in 0..frames {
        let seg = &x[f * hop..f * hop + win];
        for ((b, v), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex64::new(v * w, 0.0);
        }
        fft.process(&mut buf);
        for (series, ks) in out.iter_mut().zip(&bins) {
            let p: f64 = ks
                .iter()
                .map(|&k| {
                    let one_sided = if k == 0 || (win.is_multiple_of(2) && k == win / 2) {
                        1.0
                    } else {
                        2.0
                    };
                    one_sided * buf[k].norm_sqr()
                })
                .sum();
            series.push(p * scale);
        }
    }

    let rate = fs / hop as f64;
    let start = eeg.start_offset_s() + (win as f64 / 2.0) / fs;
    Ok(bands
        .iter()
        .zip(out)
        .map(|(b, values)| DerivedSeries::new(SeriesKind::BandPower(b.name), rate, start, values))
        .collect())
}

pub fn band_power_series(eeg: &RawTrace, band: BandSpec) -> Result<DerivedSeries, DspError> {
    Ok(band_powers(eeg, &[band])?
        .pop()
        .expect("one band in, one series out"))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn eeg(x: Vec<f64>) -> RawTrace {
        RawTrace::new(SensorKind::EegRaw, 512.0, 0.0, x).unwrap()
    }

    fn sine(freq: f64, amp: f64, secs: usize) -> Vec<f64> {
        (0..512 * secs)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / 512.0).sin())
            .collect()
    }

    /// Reference band power for one frame by direct O(N^2) DFT.
    fn direct_band_power(frame: &[f64], fs: f64, lo: f64, hi: f64) -> f64 {
        let n = frame.len();
        let w: Vec<f64> = (0..n)
            .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
            .collect();
        let u: f64 = w.iter().map(|v| v * v).sum();
        let mut total = 0.0;
        for k in 0..=n / 2 {
            let f = k as f64 * fs / n as f64;
            if f < lo || f >= hi {
                continue;
            }
            let (mut re, mut im) = (0.0, 0.0);
            for (i, (x, wi)) in frame.iter().zip(&w).enumerate() {
                let ph = 2.0 * PI * (k * i) as f64 / n as f64;
                re += x * wi * ph.cos();
                im -= x * wi * ph.sin();
            }
            let c = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            total += c * (re * re + im * im) / (n as f64 * u);
        }
        total
    }

    #[test]
    fn alpha_tone_stays_in_alpha() {
        let x = eeg(sine(10.0, 1.0, 6));
        let series = band_powers(&x, &BandSpec::defaults()).unwrap();
        let alpha = &series[2];
        assert_eq!(alpha.rate_hz, 2.0);
        assert_eq!(alpha.len(), 11);
        assert_eq!(alpha.start_offset_s, 0.5);
        let level = alpha.values[0];
        assert!(level > 0.0);
        for v in &alpha.values {
            assert!((v - level).abs() < 1e-3 * level);
        }
        // direct DFT oracle on the first frame
        let oracle = direct_band_power(&x.samples()[..512], 512.0, 8.0, 12.5);
        assert!((level - oracle).abs() < 1e-9 * oracle);
        // unit sine carries 0.5 units^2 of power, nearly all inside alpha
        assert!((level - 0.5).abs() < 0.01, "{level}");
        for s in [&series[3], &series[4]] {
            for v in &s.values {
                assert!(*v < 0.05 * level);
            }
        }
    }

    #[test]
    fn quadratic_in_amplitude() {
        let a = band_powers(&eeg(sine(10.0, 1.0, 4)), &BandSpec::defaults()).unwrap();
        let b = band_powers(&eeg(sine(10.0, 2.0, 4)), &BandSpec::defaults()).unwrap();
        for (sa, sb) in a.iter().zip(&b) {
            for (va, vb) in sa.values.iter().zip(&sb.values) {
                assert!((vb - 4.0 * va).abs() <= 0.01 * 4.0 * va + 1e-15);
            }
        }
    }

    #[test]
    fn zero_signal() {
        let s = band_power_series(&eeg(vec![0.0; 2048]), BandSpec::default_for(BandName::Beta))
            .unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            band_power_series(&eeg(vec![0.0; 511]), BandSpec::default_for(BandName::Alpha)),
            Err(DspError::TooShort { .. })
        ));
        assert!(matches!(
            band_power_series(
                &eeg(vec![0.0; 1024]),
                BandSpec::new(BandName::Gamma, 30.0, 300.0)
            ),
            Err(DspError::BadBand { .. })
        ));
        let gsr = RawTrace::new(SensorKind::Gsr, 128.0, 0.0, vec![0.0; 512]).unwrap();
        assert!(matches!(
            band_power_series(&gsr, BandSpec::default_for(BandName::Alpha)),
            Err(DspError::WrongKind { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn never_negative(x in proptest::collection::vec(-500.0f64..500.0, 512..1400)) {
            for s in band_powers(&eeg(x), &BandSpec::defaults()).unwrap() {
                proptest::prop_assert!(s.values.iter().all(|v| *v >= 0.0));
            }
        }
    }
}
