use serde::{Deserialize, Serialize};

use super::{decide, ClassifyError, Prediction, SvmParams};
use crate::model::Class;

/// Per-feature min/max scaling to [0, 1], fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Unseen values are clipped to this margin around [0, 1].
const CLIP: (f64, f64) = (-0.05, 1.05);

impl Normalizer {
    pub fn fit(rows: &[&[f64]]) -> Normalizer {
        let dim = rows[0].len();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for r in rows {
            for j in 0..dim {
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        Normalizer { min, max }
    }

    /// Constant features map to 0.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(j, v)| {
                let range = self.max[j] - self.min[j];
                if range > 0.0 {
                    ((v - self.min[j]) / range).clamp(CLIP.0, CLIP.1)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    /// Row position in the training set.
    pub index: usize,
    /// Normalized feature values.
    pub x: Vec<f64>,
    pub alpha: f64,
    /// +1 for High, -1 for Low.
    pub y: f64,
}

/// Soft-margin SVM with kernel `(x·z + 1)^e`; decision value
/// `Σ αᵢ yᵢ K(xᵢ, x) − b`, positive meaning High.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub normalizer: Normalizer,
    pub exponent: f64,
    pub c: f64,
    pub bias: f64,
    pub support: Vec<SupportVector>,
    /// False when the iteration guard stopped optimisation early.
    pub converged: bool,
}

pub(crate) fn kernel(a: &[f64], b: &[f64], exponent: f64) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() + 1.0;
    if exponent == 1.0 {
        dot
    } else {
        dot.powf(exponent)
    }
}

/// Sequential minimal optimisation with the two-threshold optimality test
/// of Keerthi et al. (modification 2) and a full error vector.
struct Smo<'a> {
    gram: Vec<f64>,
    n: usize,
    y: &'a [f64],
    alpha: Vec<f64>,
    /// `F_i = Σ αⱼ yⱼ K(i, j) − yᵢ`, kept current for every row.
    f: Vec<f64>,
    b_up: f64,
    b_low: f64,
    i_up: usize,
    i_low: usize,
    c: f64,
    tol: f64,
}

const EPS: f64 = 1e-12;

impl Smo<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.n + j]
    }

    fn free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    /// Rows whose F bounds the threshold from above (I0 ∪ I1 ∪ I2).
    fn in_up(&self, i: usize) -> bool {
        self.free(i)
            || (self.y[i] > 0.0 && self.alpha[i] == 0.0)
            || (self.y[i] < 0.0 && self.alpha[i] == self.c)
    }

    /// Rows whose F bounds the threshold from below (I0 ∪ I3 ∪ I4).
    fn in_low(&self, i: usize) -> bool {
        self.free(i)
            || (self.y[i] > 0.0 && self.alpha[i] == self.c)
            || (self.y[i] < 0.0 && self.alpha[i] == 0.0)
    }

    fn refresh_thresholds(&mut self) {
        self.b_up = f64::INFINITY;
        self.b_low = f64::NEG_INFINITY;
        for i in 0..self.n {
            if self.in_up(i) && self.f[i] < self.b_up {
                self.b_up = self.f[i];
                self.i_up = i;
            }
            if self.in_low(i) && self.f[i] > self.b_low {
                self.b_low = self.f[i];
                self.i_low = i;
            }
        }
    }

    fn snap(&self, a: f64) -> f64 {
        if a < EPS * self.c {
            0.0
        } else if a > self.c * (1.0 - EPS) {
            self.c
        } else {
            a
        }
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (f1, f2) = (self.f[i1], self.f[i2]);
        let s = y1 * y2;
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (self.c + a2 - a1).min(self.c))
        } else {
            ((a1 + a2 - self.c).max(0.0), (a1 + a2).min(self.c))
        };
        if hi <= lo {
            return false;
        }
        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let eta = 2.0 * k12 - k11 - k22;
        let a2_new = if eta < 0.0 {
            (a2 - y2 * (f1 - f2) / eta).clamp(lo, hi)
        } else {
            // dual objective at the segment ends
            let v1 = f1 + y1 - y1 * a1 * k11 - y2 * a2 * k12;
            let v2 = f2 + y2 - y1 * a1 * k12 - y2 * a2 * k22;
            let gamma = a1 + s * a2;
            let obj = |a: f64| {
                let a1x = gamma - s * a;
                a1x + a
                    - 0.5 * k11 * a1x * a1x
                    - 0.5 * k22 * a * a
                    - s * k12 * a1x * a
                    - y1 * a1x * v1
                    - y2 * a * v2
            };
            let (lo_obj, hi_obj) = (obj(lo), obj(hi));
            if lo_obj > hi_obj + EPS {
                lo
            } else if lo_obj < hi_obj - EPS {
                hi
            } else {
                a2
            }
        };
        let a2_new = self.snap(a2_new);
        if (a2_new - a2).abs() < EPS * (a2_new + a2 + EPS) {
            return false;
        }
        let a1_new = self.snap(a1 + s * (a2 - a2_new));

        let (d1, d2) = (y1 * (a1_new - a1), y2 * (a2_new - a2));
        for k in 0..self.n {
            self.f[k] += d1 * self.k(i1, k) + d2 * self.k(i2, k);
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.refresh_thresholds();
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let f2 = self.f[i2];
        let mut i1 = None;
        if self.in_up(i2) && self.b_low - f2 > 2.0 * self.tol {
            i1 = Some(self.i_low);
        }
        if self.in_low(i2) && f2 - self.b_up > 2.0 * self.tol {
            i1 = Some(self.i_up);
        }
        let Some(mut i1) = i1 else {
            return false;
        };
        if self.free(i2) {
            i1 = if self.b_low - f2 > f2 - self.b_up {
                self.i_low
            } else {
                self.i_up
            };
        }
        self.take_step(i1, i2)
    }

    fn optimal(&self) -> bool {
        self.b_low <= self.b_up + 2.0 * self.tol
    }
}

/// Cap on full passes plus free-row passes.
const MAX_PASSES: usize = 10_000;

impl SvmModel {
    pub(crate) fn fit(
        rows: &[&[f64]],
        labels: &[Class],
        params: &SvmParams,
    ) -> Result<SvmModel, ClassifyError> {
        if let Some(first) = labels.first() {
            if labels.iter().all(|l| l == first) {
                return Err(ClassifyError::SingleClass(*first));
            }
        }
        let normalizer = Normalizer::fit(rows);
        let xs: Vec<Vec<f64>> = rows.iter().map(|r| normalizer.transform(r)).collect();
        let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
        let n = xs.len();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let k = kernel(&xs[i], &xs[j], params.kernel_exponent);
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }
        let mut smo = Smo {
            gram,
            n,
            y: &y,
            alpha: vec![0.0; n],
            f: y.iter().map(|v| -v).collect(),
            b_up: 0.0,
            b_low: 0.0,
            i_up: 0,
            i_low: 0,
            c: params.c,
            tol: params.tolerance,
        };
        smo.refresh_thresholds();

        let mut examine_all = true;
        let mut passes = 0;
        let mut converged = true;
        loop {
            let mut changed = 0;
            if examine_all {
                for i in 0..n {
                    changed += usize::from(smo.examine(i));
                }
            } else {
                for i in 0..n {
                    if smo.free(i) {
                        changed += usize::from(smo.examine(i));
                        if smo.optimal() {
                            changed = 0;
                            break;
                        }
                    }
                }
            }
            if examine_all {
                examine_all = false;
                if changed == 0 {
                    break;
                }
            } else if changed == 0 {
                examine_all = true;
            }
            passes += 1;
            if passes >= MAX_PASSES {
                converged = false;
                break;
            }
        }
        let bias = (smo.b_low + smo.b_up) / 2.0;

        let support = (0..n)
            .filter(|&i| smo.alpha[i] > 0.0)
            .map(|i| SupportVector {
                index: i,
                x: xs[i].clone(),
                alpha: smo.alpha[i],
                y: y[i],
            })
            .collect();
        Ok(SvmModel {
            normalizer,
            exponent: params.kernel_exponent,
            c: params.c,
            bias,
            support,
            converged,
        })
    }

    pub fn dimension(&self) -> usize {
        self.normalizer.min.len()
    }

    pub fn decision_value(&self, x: &[f64]) -> f64 {
        let z = self.normalizer.transform(x);
        self.support
            .iter()
            .map(|sv| sv.alpha * sv.y * kernel(&sv.x, &z, self.exponent))
            .sum::<f64>()
            - self.bias
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let f = self.decision_value(x);
        let (class, tie) = decide(-f, f);
        Prediction {
            class,
            score: f.abs(),
            tie,
        }
    }
}
