use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ClassMetrics, ConfusionMatrix, EvalError};
use crate::classify::{fit, ClassifierSpec, ModelParams};
use crate::features::Dataset;
use crate::model::{Class, Target};

/// Which rows a fold holds out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LooMode {
    /// One instance per fold.
    #[default]
    Instance,
    /// All instances of one subject per fold.
    Subject,
}

impl fmt::Display for LooMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LooMode::Instance => "instance",
            LooMode::Subject => "subject",
        })
    }
}

impl FromStr for LooMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "instance" => Ok(LooMode::Instance),
            "subject" => Ok(LooMode::Subject),
            other => Err(format!(
                "unknown evaluation mode '{other}' (expected instance or subject)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    /// Row index in the evaluated dataset.
    pub instance: usize,
    pub subject_id: String,
    pub video_id: u32,
    pub gold: Class,
    pub predicted: Class,
    pub score: f64,
    pub tie: bool,
}

impl FoldPrediction {
    pub fn correct(&self) -> bool {
        self.gold == self.predicted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    /// Indexed by [`Class::index`].
    pub per_class: [ClassMetrics; 2],
    #[serde(rename = "macro")]
    pub macro_avg: ClassMetrics,
    /// Sorted by instance index.
    pub predictions: Vec<FoldPrediction>,
}

impl EvaluationReport {
    pub fn f1(&self) -> f64 {
        self.macro_avg.f1
    }
}

/// Confusion matrix and macro-averaged metrics of a prediction set.
pub fn macro_metrics(predictions: Vec<FoldPrediction>) -> Result<EvaluationReport, EvalError> {
    if predictions.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let confusion = ConfusionMatrix::from_pairs(predictions.iter().map(|p| (p.gold, p.predicted)));
    Ok(EvaluationReport {
        confusion,
        per_class: Class::ALL.map(|c| confusion.class_metrics(c)),
        macro_avg: confusion.macro_metrics(),
        predictions,
    })
}

/// What one fold saw, for leak checks.
pub struct FoldAudit<'a> {
    pub fold: usize,
    pub train: &'a [usize],
    pub test: &'a [usize],
    pub model: &'a ModelParams,
}

/// Held-out row groups, in canonical order.
pub fn folds(dataset: &Dataset, mode: LooMode) -> Vec<Vec<usize>> {
    match mode {
        LooMode::Instance => (0..dataset.len()).map(|i| vec![i]).collect(),
        LooMode::Subject => {
            let mut by_subject: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, inst) in dataset.instances().iter().enumerate() {
                by_subject
                    .entry(inst.subject_id.as_str())
                    .or_default()
                    .push(i);
            }
            by_subject.into_values().collect()
        }
    }
}

/// Leave-one-out evaluation with a callback observing every fold.
pub fn evaluate_with_audit(
    spec: &ClassifierSpec,
    dataset: &Dataset,
    target: Target,
    mode: LooMode,
    audit: &mut dyn FnMut(&FoldAudit<'_>),
) -> Result<EvaluationReport, EvalError> {
    if dataset.len() < 2 {
        return Err(EvalError::TooFewInstances(dataset.len()));
    }
    let instances = dataset.instances();
    let labels = dataset.labels(target);
    let groups = folds(dataset, mode);
    if groups.len() < 2 {
        return Err(EvalError::TooFewFolds(groups.len()));
    }
    let mut predictions = Vec::with_capacity(dataset.len());
    let mut held_out = vec![false; dataset.len()];
    for (fold, test) in groups.iter().enumerate() {
        for &i in test {
            held_out[i] = true;
        }
        let train: Vec<usize> = (0..dataset.len()).filter(|&i| !held_out[i]).collect();
        for &i in test {
            held_out[i] = false;
        }
        let rows: Vec<&[f64]> = train
            .iter()
            .map(|&i| instances[i].features.as_slice())
            .collect();
        let ys: Vec<Class> = train.iter().map(|&i| labels[i]).collect();
        let model = fit(spec, &rows, &ys).map_err(|source| EvalError::Fold { fold, source })?;
        audit(&FoldAudit {
            fold,
            train: &train,
            test,
            model: &model,
        });
        for &i in test {
            let p = model
                .predict(&instances[i].features)
                .map_err(|source| EvalError::Fold { fold, source })?;
            predictions.push(FoldPrediction {
                instance: i,
                subject_id: instances[i].subject_id.clone(),
                video_id: instances[i].video_id,
                gold: labels[i],
                predicted: p.class,
                score: p.score,
                tie: p.tie,
            });
        }
    }
    predictions.sort_by_key(|p| p.instance);
    macro_metrics(predictions)
}

pub fn evaluate(
    spec: &ClassifierSpec,
    dataset: &Dataset,
    target: Target,
    mode: LooMode,
) -> Result<EvaluationReport, EvalError> {
    evaluate_with_audit(spec, dataset, target, mode, &mut |_| {})
}

/// Leave-one-instance-out.
pub fn loo_evaluate(
    spec: &ClassifierSpec,
    dataset: &Dataset,
    target: Target,
) -> Result<EvaluationReport, EvalError> {
    evaluate(spec, dataset, target, LooMode::Instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Algorithm;
    use crate::features::{LabeledInstance, SensorMask};

    fn dataset(subjects: usize, constant: bool) -> Dataset {
        let mut instances = Vec::new();
        for s in 0..subjects {
            for v in 0..4u32 {
                let high = v % 2 == 1;
                let x = if constant {
                    0.0
                } else {
                    v as f64 + s as f64 * 0.01
                };
                instances.push(LabeledInstance {
                    subject_id: format!("s{s:02}"),
                    video_id: v,
                    features: vec![x; 10],
                    valence: if high { Class::High } else { Class::Low },
                    arousal: if v >= 2 { Class::High } else { Class::Low },
                });
            }
        }
        Dataset::new(instances, SensorMask::EMG).unwrap()
    }

    #[test]
    fn one_prediction_per_instance() {
        let ds = dataset(5, false);
        let report = loo_evaluate(
            &ClassifierSpec::default_for(Algorithm::Nb),
            &ds,
            Target::Arousal,
        )
        .unwrap();
        assert_eq!(report.predictions.len(), 20);
        assert_eq!(report.confusion.total(), 20);
        let ids: Vec<usize> = report.predictions.iter().map(|p| p.instance).collect();
        assert_eq!(ids, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn majority_predictor_scores_zero_on_balanced_data() {
        // constant features reduce NB and the tree to the training majority
        let ds = dataset(38, true);
        assert_eq!(ds.len(), 152);
        for alg in [Algorithm::Nb, Algorithm::Tree] {
            let r = loo_evaluate(&ClassifierSpec::default_for(alg), &ds, Target::Valence).unwrap();
            assert_eq!(r.confusion.accuracy(), 0.0, "{alg}");
            assert_eq!(r.f1(), 0.0);
        }
    }

    #[test]
    fn folds_never_train_on_test_rows() {
        let ds = dataset(4, false);
        for mode in [LooMode::Instance, LooMode::Subject] {
            let mut seen = 0;
            evaluate_with_audit(
                &ClassifierSpec::default_for(Algorithm::Svm),
                &ds,
                Target::Valence,
                mode,
                &mut |a| {
                    seen += a.test.len();
                    assert!(a.test.iter().all(|t| !a.train.contains(t)));
                    assert_eq!(a.train.len() + a.test.len(), ds.len());
                },
            )
            .unwrap();
            assert_eq!(seen, ds.len());
        }
        assert_eq!(folds(&ds, LooMode::Subject).len(), 4);
    }

    #[test]
    fn deterministic_and_errors() {
        let ds = dataset(3, false);
        let spec = ClassifierSpec::default_for(Algorithm::Tree);
        assert_eq!(
            loo_evaluate(&spec, &ds, Target::Valence).unwrap(),
            loo_evaluate(&spec, &ds, Target::Valence).unwrap()
        );
        assert!(matches!(
            loo_evaluate(&spec, &ds.subset(&[0]), Target::Valence),
            Err(EvalError::TooFewInstances(1))
        ));
        assert!(matches!(
            evaluate(
                &spec,
                &ds.subset(&[0, 1]),
                Target::Valence,
                LooMode::Subject
            ),
            Err(EvalError::TooFewFolds(1))
        ));
        assert!(matches!(
            macro_metrics(vec![]),
            Err(EvalError::EmptyDataset)
        ));
    }

    #[test]
    fn concatenation_sums_confusions() {
        let ds = dataset(4, false);
        let a = loo_evaluate(
            &ClassifierSpec::default_for(Algorithm::Nb),
            &ds,
            Target::Valence,
        )
        .unwrap();
        let b = loo_evaluate(
            &ClassifierSpec::default_for(Algorithm::Tree),
            &ds,
            Target::Arousal,
        )
        .unwrap();
        let both = macro_metrics(
            a.predictions
                .iter()
                .chain(&b.predictions)
                .cloned()
                .collect(),
        )
        .unwrap();
        assert_eq!(both.confusion, a.confusion.merged(&b.confusion));
    }
}
