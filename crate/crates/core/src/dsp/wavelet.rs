//! Orthogonal discrete wavelet transform (periodized) and shrinkage denoising.

use serde::{Deserialize, Serialize};

use super::{DerivedSeries, DspError, SeriesKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Haar,
    Db2,
    Db4,
}

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

const DB2: [f64; 4] = [
    0.482_962_913_144_690_25,
    0.836_516_303_737_469,
    0.224_143_868_041_857_35,
    -0.129_409_522_550_921_45,
];

// 8-tap Daubechies scaling filter (four vanishing moments).
const DB4: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_7,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_09,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

impl WaveletFamily {
    /// Scaling (low-pass) filter.
    pub fn scaling(self) -> &'static [f64] {
        match self {
            WaveletFamily::Haar => &HAAR,
            WaveletFamily::Db2 => &DB2,
            WaveletFamily::Db4 => &DB4,
        }
    }

    /// Wavelet (high-pass) filter, the quadrature mirror of the scaling filter.
    pub fn wavelet(self) -> Vec<f64> {
        let h = self.scaling();
        let l = h.len();
        (0..l)
            .map(|k| {
                if k % 2 == 0 {
                    h[l - 1 - k]
                } else {
                    -h[l - 1 - k]
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    /// `sigma * sqrt(2 ln n)` with `sigma = MAD(finest details) / 0.6745`.
    Universal,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletConfig {
    pub family: WaveletFamily,
    pub levels: usize,
    pub threshold: Threshold,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            family: WaveletFamily::Db4,
            levels: 5,
            threshold: Threshold::Universal,
        }
    }
}

impl WaveletConfig {
    pub fn validate(&self) -> Result<(), DspError> {
        if self.levels == 0 || self.levels > 20 {
            return Err(DspError::BadParameter(format!(
                "wavelet levels = {}",
                self.levels
            )));
        }
        if let Threshold::Fixed(t) = self.threshold {
            if !(t.is_finite() && t >= 0.0) {
                return Err(DspError::BadParameter(format!("wavelet threshold = {t}")));
            }
        }
        Ok(())
    }
}

/// Multi-level decomposition. Returns the final approximation and the detail
/// bands, finest first. `x.len()` must be divisible by `2^levels`.
pub fn dwt(x: &[f64], family: WaveletFamily, levels: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert!(
        x.len().is_multiple_of(1 << levels),
        "length must be a multiple of 2^levels"
    );
    let h = family.scaling();
    let g = family.wavelet();
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let n = approx.len();
        let half = n / 2;
        let mut a = vec![0.0; half];
        let mut d = vec![0.0; half];
        for i in 0..half {
            let (mut sa, mut sd) = (0.0, 0.0);
            for (k, (hk, gk)) in h.iter().zip(&g).enumerate() {
                let v = approx[(2 * i + k) % n];
                sa += hk * v;
                sd += gk * v;
            }
            a[i] = sa;
            d[i] = sd;
        }
        details.push(d);
        approx = a;
    }
    (approx, details)
}

/// Inverse of [`dwt`].
pub fn idwt(approx: &[f64], details: &[Vec<f64>], family: WaveletFamily) -> Vec<f64> {
    let h = family.scaling();
    let g = family.wavelet();
    let mut a = approx.to_vec();
    for d in details.iter().rev() {
        let half = a.len();
        let n = 2 * half;
        let mut x = vec![0.0; n];
        for i in 0..half {
            for (k, (hk, gk)) in h.iter().zip(&g).enumerate() {
                x[(2 * i + k) % n] += hk * a[i] + gk * d[i];
            }
        }
        a = x;
    }
    a
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// Wavelet shrinkage of a phasic GSR series. The series is extended
/// symmetrically to a multiple of `2^levels`, transformed, its detail
/// coefficients soft-thresholded, inverted and cropped back.
pub fn wavelet_denoise(
    phasic: &DerivedSeries,
    config: &WaveletConfig,
) -> Result<DerivedSeries, DspError> {
    phasic.expect_kind(SeriesKind::GsrPhasic)?;
    config.validate()?;
    let n = phasic.len();
    let block = 1usize << config.levels;
    if n < block {
        return Err(DspError::TooShort {
            len: n,
            needed: block,
        });
    }
    let padded_len = n.div_ceil(block) * block;
    let mut x = phasic.values.clone();
    // half-sample symmetric extension
    for i in 0..padded_len - n {
        let j = n - 1 - (i % n);
        x.push(phasic.values[j]);
    }

    let (approx, mut details) = dwt(&x, config.family, config.levels);
    let t = match config.threshold {
        Threshold::Fixed(t) => t,
        Threshold::Universal => {
            let sigma = median(details[0].iter().map(|v| v.abs()).collect()) / 0.6745;
            sigma * (2.0 * (n as f64).ln()).sqrt()
        }
    };
    if t > 0.0 {
        for d in &mut details {
            for v in d.iter_mut() {
                *v = soft(*v, t);
            }
        }
    }
    let mut y = idwt(&approx, &details, config.family);
    y.truncate(n);
    Ok(DerivedSeries::new(
        SeriesKind::GsrPhasicDenoised,
        phasic.rate_hz,
        phasic.start_offset_s,
        y,
    ))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    use super::*;

    fn phasic(x: Vec<f64>) -> DerivedSeries {
        DerivedSeries::new(SeriesKind::GsrPhasic, 128.0, 0.0, x)
    }

    fn noise(seed: u64, n: usize, sd: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, sd).unwrap();
        (0..n).map(|_| dist.sample(&mut rng)).collect()
    }

    fn variance(x: &[f64]) -> f64 {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn filters_are_orthonormal() {
        for fam in [WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db4] {
            let h = fam.scaling();
            let g = fam.wavelet();
            let sum: f64 = h.iter().sum();
            assert!((sum - 2f64.sqrt()).abs() < 1e-12, "{fam:?}");
            for shift in (0..h.len()).step_by(2) {
                let hh: f64 = (0..h.len() - shift).map(|k| h[k] * h[k + shift]).sum();
                let hg: f64 = (0..h.len() - shift).map(|k| h[k] * g[k + shift]).sum();
                let expect = if shift == 0 { 1.0 } else { 0.0 };
                assert!((hh - expect).abs() < 1e-10, "{fam:?} shift {shift}: {hh}");
                assert!(hg.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_threshold_reconstructs() {
        let cfg = WaveletConfig {
            threshold: Threshold::Fixed(0.0),
            ..Default::default()
        };
        for n in [32, 100, 1000, 1283] {
            let x = noise(n as u64, n, 1.0);
            let y = wavelet_denoise(&phasic(x.clone()), &cfg).unwrap();
            assert_eq!(y.len(), n);
            let err = x
                .iter()
                .zip(&y.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err <= 1e-9, "n={n}: {err}");
        }
    }

    #[test]
    fn white_noise_loses_variance() {
        for seed in 0..100 {
            let x = noise(seed, 2048, 0.3);
            let y = wavelet_denoise(&phasic(x.clone()), &WaveletConfig::default()).unwrap();
            assert!(variance(&y.values) < variance(&x), "seed {seed}");
        }
    }

    #[test]
    fn slow_sine_gets_closer_to_clean() {
        let n = 128 * 60;
        let clean: Vec<f64> = (0..n)
            .map(|i| 0.5 * (2.0 * std::f64::consts::PI * 0.2 * i as f64 / 128.0).sin())
            .collect();
        let noisy: Vec<f64> = clean
            .iter()
            .zip(noise(7, n, 0.05))
            .map(|(c, e)| c + e)
            .collect();
        let rmse = |a: &[f64]| {
            (a.iter()
                .zip(&clean)
                .map(|(x, c)| (x - c).powi(2))
                .sum::<f64>()
                / n as f64)
                .sqrt()
        };
        let y = wavelet_denoise(&phasic(noisy.clone()), &WaveletConfig::default()).unwrap();
        assert!(
            rmse(&y.values) < rmse(&noisy),
            "{} vs {}",
            rmse(&y.values),
            rmse(&noisy)
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            wavelet_denoise(&phasic(vec![0.0; 31]), &WaveletConfig::default()),
            Err(DspError::TooShort {
                len: 31,
                needed: 32
            })
        ));
        let wrong = DerivedSeries::new(SeriesKind::GsrTonic, 128.0, 0.0, vec![0.0; 64]);
        assert!(matches!(
            wavelet_denoise(&wrong, &WaveletConfig::default()),
            Err(DspError::WrongKind { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn dwt_roundtrip(x in proptest::collection::vec(-1e3f64..1e3, 1..9), reps in 1usize..40) {
            // length = 32 * k
            let data: Vec<f64> = x.iter().cycle().take(32 * reps).copied().enumerate().map(|(i, v)| v + i as f64).collect();
            let (a, d) = dwt(&data, WaveletFamily::Db4, 5);
            let back = idwt(&a, &d, WaveletFamily::Db4);
            let scale = data.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (p, q) in data.iter().zip(&back) {
                proptest::prop_assert!((p - q).abs() <= 1e-12 * scale);
            }
        }
    }
}
