use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use super::{EvalError, FoldPrediction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McNemarMethod {
    ChiSquareCc,
    ExactBinomial,
}

/// How to pick the p-value computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Exact binomial below 25 discordant pairs, chi-square above.
    #[default]
    Auto,
    Force(McNemarMethod),
}

/// Discordant-pair count below which `Auto` uses the exact test.
pub const EXACT_BELOW: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// A correct, B wrong.
    pub b: usize,
    /// A wrong, B correct.
    pub c: usize,
    /// Continuity-corrected chi-square statistic, whatever the method.
    pub statistic: f64,
    pub p_value: f64,
    pub method: McNemarMethod,
}

pub fn mcnemar_from_counts(b: usize, c: usize, choice: MethodChoice) -> McNemarResult {
    let n = b + c;
    let method = match choice {
        MethodChoice::Force(m) => m,
        MethodChoice::Auto if n < EXACT_BELOW => McNemarMethod::ExactBinomial,
        MethodChoice::Auto => McNemarMethod::ChiSquareCc,
    };
    if n == 0 {
        return McNemarResult {
            b,
            c,
            statistic: 0.0,
            p_value: 1.0,
            method,
        };
    }
    let diff = (b.abs_diff(c) as f64 - 1.0).max(0.0);
    let statistic = diff * diff / n as f64;
    let p_value = match method {
        McNemarMethod::ChiSquareCc => ChiSquared::new(1.0).expect("1 dof").sf(statistic),
        McNemarMethod::ExactBinomial => {
            let bin = Binomial::new(0.5, n as u64).expect("valid binomial");
            (2.0 * bin.cdf(b.min(c) as u64)).min(1.0)
        }
    };
    McNemarResult {
        b,
        c,
        statistic,
        p_value: p_value.clamp(0.0, 1.0),
        method,
    }
}

/// Paired test between two prediction sets over the same instances.
pub fn mcnemar_test(
    a: &[FoldPrediction],
    b: &[FoldPrediction],
    choice: MethodChoice,
) -> Result<McNemarResult, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::InstanceMismatch(format!(
            "{} vs {} predictions",
            a.len(),
            b.len()
        )));
    }
    let index: BTreeMap<(&str, u32), &FoldPrediction> = b
        .iter()
        .map(|p| ((p.subject_id.as_str(), p.video_id), p))
        .collect();
    let (mut nb, mut nc) = (0, 0);
    for pa in a {
        let Some(pb) = index.get(&(pa.subject_id.as_str(), pa.video_id)) else {
            return Err(EvalError::InstanceMismatch(format!(
                "subject {} video {} missing from the second set",
                pa.subject_id, pa.video_id
            )));
        };
        if pa.gold != pb.gold {
            return Err(EvalError::InstanceMismatch(format!(
                "subject {} video {} has different gold labels",
                pa.subject_id, pa.video_id
            )));
        }
        match (pa.correct(), pb.correct()) {
            (true, false) => nb += 1,
            (false, true) => nc += 1,
            _ => {}
        }
    }
    Ok(mcnemar_from_counts(nb, nc, choice))
}
