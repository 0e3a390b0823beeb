use serde::{Deserialize, Serialize};

use super::{DerivedSeries, DspError, SeriesKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub time_s: f64,
    /// Prominence above the higher of the two surrounding minima, in series units.
    pub amplitude: f64,
    /// Width at half prominence, seconds.
    pub width_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }
}

/// Indices of local maxima; flat tops report their middle sample.
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = x.len();
    let mut i = 1;
    while i + 1 < n {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead + 1 < n && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                out.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Prominence plus the left/right base indices.
fn prominence(x: &[f64], peak: usize) -> (f64, usize, usize) {
    let top = x[peak];
    let mut left_min = top;
    let mut left_base = peak;
    let mut i = peak;
    loop {
        if x[i] > top {
            break;
        }
        if x[i] < left_min {
            left_min = x[i];
            left_base = i;
        }
        if i == 0 {
            break;
        }
        i -= 1;
    }
    let mut right_min = top;
    let mut right_base = peak;
    for (j, &v) in x.iter().enumerate().skip(peak) {
        if v > top {
            break;
        }
        if v < right_min {
            right_min = v;
            right_base = j;
        }
    }
    (top - left_min.max(right_min), left_base, right_base)
}

/// Interpolated width (in samples) at `top - prom / 2`, bounded by the bases.
fn half_prominence_width(
    x: &[f64],
    peak: usize,
    prom: f64,
    left_base: usize,
    right_base: usize,
) -> f64 {
    let height = x[peak] - prom / 2.0;
    let mut i = peak;
    while i > left_base && x[i] > height {
        i -= 1;
    }
    let mut left = i as f64;
    if x[i] < height {
        left += (height - x[i]) / (x[i + 1] - x[i]);
    }
    let mut j = peak;
    while j < right_base && x[j] > height {
        j += 1;
    }
    let mut right = j as f64;
    if x[j] < height {
        right -= (height - x[j]) / (x[j - 1] - x[j]);
    }
    right - left
}

/// Detect SCR peaks on a denoised phasic series (typically already cut to the
/// analysis window). A local maximum counts when its prominence reaches both
/// `prominence_factor` times the series' standard deviation and the absolute
/// floor `min_prominence` (series units). The floor keeps residual noise from
/// counting as responses in windows that contain none.
pub fn detect_peaks(
    series: &DerivedSeries,
    prominence_factor: f64,
    min_prominence: f64,
) -> Result<PeakSet, DspError> {
    series.expect_kind(SeriesKind::GsrPhasicDenoised)?;
    let x = &series.values;
    if x.len() < 3 {
        return Ok(PeakSet::default());
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let min_prominence = (prominence_factor * std).max(min_prominence);

    let peaks = local_maxima(x)
        .into_iter()
        .filter_map(|p| {
            let (prom, lb, rb) = prominence(x, p);
            if prom <= 0.0 || prom < min_prominence {
                return None;
            }
            let width = half_prominence_width(x, p, prom, lb, rb) / series.rate_hz;
            (width > 0.0).then(|| Peak {
                time_s: series.time_of(p),
                amplitude: prom,
                width_s: width,
            })
        })
        .collect();
    Ok(PeakSet { peaks })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 128.0;

    /// Bi-exponential SCR (rise 1 s, decay 3 s) scaled to peak at `amp`.
    pub(crate) fn scr(t: f64, onset: f64, amp: f64) -> f64 {
        let (tr, td) = (1.0f64, 3.0f64);
        let u = t - onset;
        if u <= 0.0 {
            return 0.0;
        }
        // analytic maximum of exp(-u/td) - exp(-u/tr)
        let u_max = (td * tr / (td - tr)) * (td / tr).ln();
        let peak = (-u_max / td).exp() - (-u_max / tr).exp();
        amp * ((-u / td).exp() - (-u / tr).exp()) / peak
    }

    fn denoised(x: Vec<f64>) -> DerivedSeries {
        DerivedSeries::new(SeriesKind::GsrPhasicDenoised, FS, 10.0, x)
    }

    #[test]
    fn single_pulse() {
        let x: Vec<f64> = (0..(30.0 * FS) as usize)
            .map(|i| scr(i as f64 / FS, 5.0, 0.8))
            .collect();
        let ps = detect_peaks(&denoised(x), 0.5, 0.01).unwrap();
        assert_eq!(ps.len(), 1);
        let p = ps.peaks[0];
        assert!((p.amplitude - 0.8).abs() <= 0.05 * 0.8, "{}", p.amplitude);
        // peak time: onset + u_max = 5 + 1.5 ln 3 s, relative to the series start at 10 s
        let expected = 10.0 + 5.0 + 1.5 * 3f64.ln();
        assert!((p.time_s - expected).abs() < 1.0 / FS + 1e-9);
        assert!(p.width_s > 1.0 && p.width_s < 6.0);
    }

    #[test]
    fn two_pulses() {
        let x: Vec<f64> = (0..(40.0 * FS) as usize)
            .map(|i| {
                let t = i as f64 / FS;
                scr(t, 5.0, 0.8) + scr(t, 20.0, 0.8)
            })
            .collect();
        let ps = detect_peaks(&denoised(x), 0.5, 0.01).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps.peaks[0].time_s < ps.peaks[1].time_s);
    }

    #[test]
    fn flat_series_has_no_peaks() {
        assert!(detect_peaks(&denoised(vec![1.3; 500]), 0.5, 0.01)
            .unwrap()
            .is_empty());
        assert!(detect_peaks(&denoised(vec![]), 0.5, 0.01)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn plateau_reports_middle() {
        let x = vec![0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        let ps = detect_peaks(
            &DerivedSeries::new(SeriesKind::GsrPhasicDenoised, 1.0, 0.0, x),
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps.peaks[0].time_s, 3.0);
        assert_eq!(ps.peaks[0].amplitude, 2.0);
        assert_eq!(ps.peaks[0].width_s, 4.0);
    }

    #[test]
    fn small_wiggles_are_ignored() {
        let mut x: Vec<f64> = (0..(30.0 * FS) as usize)
            .map(|i| scr(i as f64 / FS, 5.0, 1.0))
            .collect();
        for (i, v) in x.iter_mut().enumerate() {
            *v += 0.001 * ((i % 7) as f64 - 3.0);
        }
        assert_eq!(detect_peaks(&denoised(x), 0.5, 0.01).unwrap().len(), 1);
    }

    #[test]
    fn floor_silences_response_free_windows() {
        // a 0.003 uS ripple: every crest clears 0.5 x std but not the floor
        let x: Vec<f64> = (0..(30.0 * FS) as usize)
            .map(|i| 0.003 * (std::f64::consts::PI * i as f64 / FS).sin())
            .collect();
        assert!(detect_peaks(&denoised(x.clone()), 0.5, 0.0).unwrap().len() > 10);
        assert!(detect_peaks(&denoised(x), 0.5, 0.01).unwrap().is_empty());
    }

    #[test]
    fn wrong_kind() {
        let s = DerivedSeries::new(SeriesKind::GsrPhasic, FS, 0.0, vec![0.0; 10]);
        assert!(detect_peaks(&s, 0.5, 0.01).is_err());
    }

    proptest::proptest! {
        #[test]
        fn shift_invariant(
            raw in proptest::collection::vec(-40i32..40, 3..300),
            c in -1000i32..1000,
        ) {
            // quarter-unit grid keeps the shifted series exact in floating point
            let x: Vec<f64> = raw.iter().map(|v| *v as f64 * 0.25).collect();
            let y: Vec<f64> = x.iter().map(|v| v + c as f64).collect();
            let a = detect_peaks(&denoised(x), 0.5, 0.01).unwrap();
            let b = detect_peaks(&denoised(y), 0.5, 0.01).unwrap();
            proptest::prop_assert_eq!(a.len(), b.len());
            for (p, q) in a.peaks.iter().zip(&b.peaks) {
                proptest::prop_assert_eq!(p.time_s, q.time_s);
                proptest::prop_assert!((p.width_s - q.width_s).abs() < 1e-9);
            }
        }

        #[test]
        fn peak_set_invariants(raw in proptest::collection::vec(-1e3f64..1e3, 0..400)) {
            let ps = detect_peaks(&denoised(raw), 0.5, 0.01).unwrap();
            for w in ps.peaks.windows(2) {
                proptest::prop_assert!(w[0].time_s < w[1].time_s);
            }
            for p in &ps.peaks {
                proptest::prop_assert!(p.amplitude > 0.0 && p.width_s > 0.0);
            }
        }
    }
}
