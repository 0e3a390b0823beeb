use serde::{Deserialize, Serialize};

use super::{decide, NbParams, Prediction};
use crate::model::Class;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub variance: f64,
}

/// Gaussian naive Bayes with maximum-likelihood estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    /// Indexed by [`Class::index`].
    pub priors: [f64; 2],
    pub gaussians: [Vec<GaussianParams>; 2],
}

impl NbModel {
    pub(crate) fn fit(rows: &[&[f64]], labels: &[Class], params: &NbParams) -> NbModel {
        let dim = rows[0].len();
        let n = rows.len() as f64;
        let gaussians = Class::ALL.map(|class| {
            let members: Vec<&[f64]> = rows
                .iter()
                .zip(labels)
                .filter(|(_, l)| **l == class)
                .map(|(r, _)| *r)
                .collect();
            let m = members.len() as f64;
            (0..dim)
                .map(|j| {
                    if members.is_empty() {
                        return GaussianParams {
                            mean: 0.0,
                            variance: params.variance_floor,
                        };
                    }
                    let mean = members.iter().map(|r| r[j]).sum::<f64>() / m;
                    let var = members.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / m;
                    GaussianParams {
                        mean,
                        variance: var.max(params.variance_floor),
                    }
                })
                .collect()
        });
        let high = labels.iter().filter(|l| **l == Class::High).count() as f64;
        NbModel {
            priors: [(n - high) / n, high / n],
            gaussians,
        }
    }

    pub fn dimension(&self) -> usize {
        self.gaussians[0].len()
    }

    /// Log of prior times class-conditional density, per class.
    fn joint_log(&self, x: &[f64]) -> [f64; 2] {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        [0, 1].map(|c| {
            let ll: f64 = self.gaussians[c]
                .iter()
                .zip(x)
                .map(|(g, v)| {
                    -0.5 * (ln_2pi + g.variance.ln()) - (v - g.mean).powi(2) / (2.0 * g.variance)
                })
                .sum();
            self.priors[c].ln() + ll
        })
    }

    /// Posterior probabilities `[P(Low | x), P(High | x)]`.
    pub fn posteriors(&self, x: &[f64]) -> [f64; 2] {
        let [a, b] = self.joint_log(x);
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return [0.5, 0.5];
        }
        let (ea, eb) = ((a - m).exp(), (b - m).exp());
        [ea / (ea + eb), eb / (ea + eb)]
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let [a, b] = self.joint_log(x);
        let (class, tie) = decide(a, b);
        Prediction {
            class,
            score: self.posteriors(x)[class.index()],
            tie,
        }
    }
}
