//! Butterworth IIR design as second-order sections and zero-phase filtering.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::DspError;
use crate::model::RawTrace;

/// One biquad: `[b0, b1, b2, a1, a2]` with `a0 = 1`.
pub type Biquad = [f64; 5];

/// Cascade of biquads.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos {
    pub sections: Vec<Biquad>,
}

fn prototype_poles(order: usize) -> Vec<Complex64> {
    // Left half-plane poles of the unit-cutoff analog Butterworth prototype.
    (0..order)
        .map(|k| {
            let theta = PI / 2.0 + PI * (2 * k + 1) as f64 / (2 * order) as f64;
            Complex64::from_polar(1.0, theta)
        })
        .collect()
}

fn bilinear(s: Complex64, fs: f64) -> Complex64 {
    let k = 2.0 * fs;
    (k + s) / (k - s)
}

fn prewarp(f: f64, fs: f64) -> f64 {
    2.0 * fs * (PI * f / fs).tan()
}

/// Denominator `[a1, a2]` for a conjugate (or real) pair of z-plane poles.
fn pole_pair(p1: Complex64, p2: Complex64) -> (f64, f64) {
    (-(p1 + p2).re, (p1 * p2).re)
}

fn section_gain(b: [f64; 3], a1: f64, a2: f64, omega: f64) -> f64 {
    let z1 = Complex64::from_polar(1.0, -omega);
    let z2 = z1 * z1;
    let num = b[0] + b[1] * z1 + b[2] * z2;
    let den = 1.0 + a1 * z1 + a2 * z2;
    (num / den).norm()
}

/// Digital Butterworth low-pass of the given prototype order, unit DC gain.
pub fn butter_lowpass(order: usize, cutoff_hz: f64, fs: f64) -> Result<Sos, DspError> {
    if order == 0 {
        return Err(DspError::BadOrder(order));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
        return Err(DspError::BadBand {
            low_hz: 0.0,
            high_hz: cutoff_hz,
            rate_hz: fs,
        });
    }
    let wc = prewarp(cutoff_hz, fs);
    let poles: Vec<Complex64> = prototype_poles(order)
        .into_iter()
        .map(|p| bilinear(p * wc, fs))
        .collect();
    let mut sections = Vec::new();
    for p in &poles[..order / 2] {
        let (a1, a2) = pole_pair(*p, p.conj());
        let g = (1.0 + a1 + a2) / 4.0;
        sections.push([g, 2.0 * g, g, a1, a2]);
    }
    if order % 2 == 1 {
        let p = poles[order / 2].re;
        let g = (1.0 - p) / 2.0;
        sections.push([g, g, 0.0, -p, 0.0]);
    }
    Ok(Sos { sections })
}

/// Digital Butterworth band-pass. `order` is the prototype order, so the
/// resulting filter has `2 * order` poles. Unit gain at the band centre.
pub fn butter_bandpass(order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Result<Sos, DspError> {
    if order == 0 {
        return Err(DspError::BadOrder(order));
    }
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0) {
        return Err(DspError::BadBand {
            low_hz,
            high_hz,
            rate_hz: fs,
        });
    }
    let w1 = prewarp(low_hz, fs);
    let w2 = prewarp(high_hz, fs);
    let w0 = (w1 * w2).sqrt();
    let bw = w2 - w1;
    let centre = 2.0 * (w0 / (2.0 * fs)).atan();

    // Low-pass to band-pass: each prototype pole p maps to the roots of
    // s^2 - p*bw*s + w0^2.
    let lp_to_bp = |p: Complex64| {
        let half = p * bw / 2.0;
        let disc = (half * half - w0 * w0).sqrt();
        (bilinear(half + disc, fs), bilinear(half - disc, fs))
    };

    let mut pairs = Vec::new();
    for (k, p) in prototype_poles(order).into_iter().enumerate() {
        if k < order / 2 {
            let (z1, z2) = lp_to_bp(p);
            pairs.push((z1, z1.conj()));
            pairs.push((z2, z2.conj()));
        } else if order % 2 == 1 && k == order / 2 {
            let (z1, z2) = lp_to_bp(Complex64::new(p.re, 0.0));
            pairs.push((z1, z2));
        }
    }
    let sections = pairs
        .into_iter()
        .map(|(p1, p2)| {
            let (a1, a2) = pole_pair(p1, p2);
            let b = [1.0, 0.0, -1.0];
            let g = 1.0 / section_gain(b, a1, a2, centre);
            [g * b[0], g * b[1], g * b[2], a1, a2]
        })
        .collect();
    Ok(Sos { sections })
}

impl Sos {
    /// Effective filter order (number of poles).
    pub fn order(&self) -> usize {
        self.sections
            .iter()
            .map(|s| if s[4] == 0.0 && s[2] == 0.0 { 1 } else { 2 })
            .sum()
    }

    /// Magnitude response at `freq_hz`.
    pub fn gain_at(&self, freq_hz: f64, fs: f64) -> f64 {
        let omega = 2.0 * PI * freq_hz / fs;
        self.sections
            .iter()
            .map(|s| section_gain([s[0], s[1], s[2]], s[3], s[4], omega))
            .product()
    }

    /// Steady-state initial conditions for a unit step, per section
    /// (transposed direct form II).
    fn step_state(&self) -> Vec<[f64; 2]> {
        let mut scale = 1.0;
        self.sections
            .iter()
            .map(|&[b0, b1, b2, a1, a2]| {
                let h = (b0 + b1 + b2) / (1.0 + a1 + a2);
                let z2 = (b2 - a2 * h) * scale;
                let z1 = (b1 - a1 * h) * scale + z2;
                scale *= h;
                [z1, z2]
            })
            .collect()
    }

    /// Causal filtering with initial state `zi * x0` (scipy `sosfilt` semantics).
    fn run(&self, x: &mut [f64], zi: &[[f64; 2]], x0: f64) {
        for (&[b0, b1, b2, a1, a2], z) in self.sections.iter().zip(zi) {
            let (mut z1, mut z2) = (z[0] * x0, z[1] * x0);
            for v in x.iter_mut() {
                let xin = *v;
                let y = b0 * xin + z1;
                z1 = b1 * xin - a1 * y + z2;
                z2 = b2 * xin - a2 * y;
                *v = y;
            }
        }
    }

    /// Single forward pass from rest.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        let zeros = vec![[0.0, 0.0]; self.sections.len()];
        self.run(&mut y, &zeros, 0.0);
        y
    }

    /// Forward-backward filtering with odd-reflection padding of `padlen`
    /// samples at each end and steady-state initial conditions.
    pub fn filtfilt(&self, x: &[f64], padlen: usize) -> Result<Vec<f64>, DspError> {
        let n = x.len();
        if n <= padlen || n < 2 {
            return Err(DspError::TooShort {
                len: n,
                needed: padlen.max(1) + 1,
            });
        }
        let mut ext = Vec::with_capacity(n + 2 * padlen);
        ext.extend((1..=padlen).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=padlen).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        let zi = self.step_state();
        let first = ext[0];
        self.run(&mut ext, &zi, first);
        ext.reverse();
        let first = ext[0];
        self.run(&mut ext, &zi, first);
        ext.reverse();
        Ok(ext[padlen..padlen + n].to_vec())
    }
}

/// Zero-phase Butterworth band-pass of a raw trace (`order` in {2, 4}).
pub fn bandpass_filter(
    trace: &RawTrace,
    low_hz: f64,
    high_hz: f64,
    order: usize,
) -> Result<RawTrace, DspError> {
    if !matches!(order, 2 | 4) {
        return Err(DspError::BadOrder(order));
    }
    let sos = butter_bandpass(order, low_hz, high_hz, trace.sampling_rate_hz())?;
    let padlen = 3 * sos.order();
    let y = sos.filtfilt(trace.samples(), padlen)?;
    Ok(trace.with_samples(y))
}
