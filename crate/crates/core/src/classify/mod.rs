//! Binary High/Low learners: Gaussian naive Bayes, a C4.5-style decision
//! tree and an SMO-trained polynomial-kernel SVM, behind one train/predict API.

mod nb;
mod svm;
mod tree;

pub use nb::{GaussianParams, NbModel};
pub use svm::{Normalizer, SupportVector, SvmModel};
pub use tree::{estimated_extra_errors, Node, TreeModel};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::{Dataset, SensorMask};
use crate::model::{Class, Target};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("cannot train on an empty dataset")]
    EmptyDataset,
    #[error("SVM training needs both classes, found only {0}")]
    SingleClass(Class),
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidSpec(String),
    #[error("model JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nb,
    Tree,
    Svm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Nb, Algorithm::Tree, Algorithm::Svm];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Nb => "nb",
            Algorithm::Tree => "tree",
            Algorithm::Svm => "svm",
        }
    }

    /// Name used in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Nb => "NB",
            Algorithm::Tree => "J48",
            Algorithm::Svm => "SVM",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nb" | "naivebayes" | "naive_bayes" => Ok(Algorithm::Nb),
            "tree" | "j48" | "c45" => Ok(Algorithm::Tree),
            "svm" | "smo" => Ok(Algorithm::Svm),
            other => Err(format!("unknown classifier '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NbParams {
    pub variance_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            variance_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub confidence: f64,
    pub min_leaf: usize,
    pub pruning: bool,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            confidence: 0.25,
            min_leaf: 2,
            pruning: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub c: f64,
    pub kernel_exponent: f64,
    pub tolerance: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            kernel_exponent: 1.0,
            tolerance: 1e-3,
        }
    }
}

/// Learner plus hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Nb(NbParams),
    Tree(TreeParams),
    Svm(SvmParams),
}

impl ClassifierSpec {
    pub fn default_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Nb => ClassifierSpec::Nb(NbParams::default()),
            Algorithm::Tree => ClassifierSpec::Tree(TreeParams::default()),
            Algorithm::Svm => ClassifierSpec::Svm(SvmParams::default()),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            ClassifierSpec::Nb(_) => Algorithm::Nb,
            ClassifierSpec::Tree(_) => Algorithm::Tree,
            ClassifierSpec::Svm(_) => Algorithm::Svm,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |m: String| Err(ClassifyError::InvalidSpec(m));
        match *self {
            ClassifierSpec::Nb(p) => {
                if !(p.variance_floor.is_finite() && p.variance_floor > 0.0) {
                    return bad(format!("variance_floor = {}", p.variance_floor));
                }
            }
            ClassifierSpec::Tree(p) => {
                if !(p.confidence > 0.0 && p.confidence <= 0.5) {
                    return bad(format!("confidence = {}", p.confidence));
                }
                if p.min_leaf == 0 {
                    return bad("min_leaf = 0".into());
                }
            }
            ClassifierSpec::Svm(p) => {
                if !(p.c.is_finite() && p.c > 0.0) {
                    return bad(format!("C = {}", p.c));
                }
                if !(p.kernel_exponent.is_finite() && p.kernel_exponent > 0.0) {
                    return bad(format!("kernel_exponent = {}", p.kernel_exponent));
                }
                if !(p.tolerance.is_finite() && p.tolerance > 0.0) {
                    return bad(format!("tolerance = {}", p.tolerance));
                }
            }
        }
        Ok(())
    }
}

/// Predicted class with its score. `tie` marks an exact tie resolved to Low.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: Class,
    pub score: f64,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Nb(NbModel),
    Tree(TreeModel),
    Svm(SvmModel),
}

/// A trained, immutable classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub spec: ClassifierSpec,
    pub target: Target,
    pub mask: SensorMask,
    pub params: ModelParams,
}

/// Train on raw rows. All rows must share one dimension.
pub fn fit(
    spec: &ClassifierSpec,
    rows: &[&[f64]],
    labels: &[Class],
) -> Result<ModelParams, ClassifyError> {
    spec.validate()?;
    if rows.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    assert_eq!(rows.len(), labels.len(), "one label per row");
    let dim = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(ClassifyError::DimensionMismatch {
            expected: dim,
            found: r.len(),
        });
    }
    Ok(match spec {
        ClassifierSpec::Nb(p) => ModelParams::Nb(NbModel::fit(rows, labels, p)),
        ClassifierSpec::Tree(p) => ModelParams::Tree(TreeModel::fit(rows, labels, p)),
        ClassifierSpec::Svm(p) => ModelParams::Svm(SvmModel::fit(rows, labels, p)?),
    })
}

pub fn train(
    spec: &ClassifierSpec,
    dataset: &Dataset,
    target: Target,
) -> Result<Model, ClassifyError> {
    let rows: Vec<&[f64]> = dataset
        .instances()
        .iter()
        .map(|i| i.features.as_slice())
        .collect();
    let labels = dataset.labels(target);
    let params = fit(spec, &rows, &labels)?;
    Ok(Model {
        spec: *spec,
        target,
        mask: dataset.mask(),
        params,
    })
}

impl ModelParams {
    pub fn dimension(&self) -> usize {
        match self {
            ModelParams::Nb(m) => m.dimension(),
            ModelParams::Tree(m) => m.dimension(),
            ModelParams::Svm(m) => m.dimension(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ClassifyError> {
        if x.len() != self.dimension() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        Ok(match self {
            ModelParams::Nb(m) => m.predict(x),
            ModelParams::Tree(m) => m.predict(x),
            ModelParams::Svm(m) => m.predict(x),
        })
    }
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ClassifyError> {
        self.params.predict(x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Model, ClassifyError> {
        serde_json::from_str(text).map_err(|e| ClassifyError::Json(e.to_string()))
    }
}

/// Pick the class with the larger score; exact ties go to Low.
pub(crate) fn decide(low: f64, high: f64) -> (Class, bool) {
    if high > low {
        (Class::High, false)
    } else {
        (Class::Low, high == low)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::LabeledInstance;

    fn dataset() -> Dataset {
        let instances = (0..20)
            .map(|i| {
                let high = i % 2 == 1;
                LabeledInstance {
                    subject_id: format!("s{i}"),
                    video_id: 24,
                    features: (0..10)
                        .map(|k| if high { 1.0 } else { 0.0 } + (i * k) as f64 * 0.01)
                        .collect(),
                    valence: if high { Class::High } else { Class::Low },
                    arousal: Class::Low,
                }
            })
            .collect();
        Dataset::new(instances, SensorMask::EMG).unwrap()
    }

    #[test]
    fn all_learners_fit_separable_data() {
        let ds = dataset();
        for alg in Algorithm::ALL {
            let model = train(&ClassifierSpec::default_for(alg), &ds, Target::Valence).unwrap();
            assert_eq!(model.mask, SensorMask::EMG);
            for inst in ds.instances() {
                assert_eq!(
                    model.predict(&inst.features).unwrap().class,
                    inst.valence,
                    "{alg}"
                );
            }
            assert!(matches!(
                model.predict(&[0.0; 3]),
                Err(ClassifyError::DimensionMismatch { .. })
            ));
        }
    }

    #[test]
    fn single_class_behaviour() {
        let ds = dataset();
        let svm = train(
            &ClassifierSpec::default_for(Algorithm::Svm),
            &ds,
            Target::Arousal,
        );
        assert_eq!(svm.unwrap_err(), ClassifyError::SingleClass(Class::Low));
        for alg in [Algorithm::Nb, Algorithm::Tree] {
            let m = train(&ClassifierSpec::default_for(alg), &ds, Target::Arousal).unwrap();
            for inst in ds.instances() {
                assert_eq!(m.predict(&inst.features).unwrap().class, Class::Low);
            }
        }
    }

    #[test]
    fn empty_and_invalid() {
        let empty = Dataset::new(vec![], SensorMask::EMG).unwrap();
        for alg in Algorithm::ALL {
            assert_eq!(
                train(&ClassifierSpec::default_for(alg), &empty, Target::Valence).unwrap_err(),
                ClassifyError::EmptyDataset
            );
        }
        let bad = ClassifierSpec::Svm(SvmParams {
            c: -1.0,
            ..Default::default()
        });
        assert!(matches!(
            train(&bad, &dataset(), Target::Valence),
            Err(ClassifyError::InvalidSpec(_))
        ));
        let bad = ClassifierSpec::Tree(TreeParams {
            confidence: 0.9,
            ..Default::default()
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let ds = dataset();
        for alg in Algorithm::ALL {
            let model = train(&ClassifierSpec::default_for(alg), &ds, Target::Valence).unwrap();
            let json = model.to_json();
            assert!(json.contains(&format!("\"algorithm\": \"{alg}\"")));
            let back = Model::from_json(&json).unwrap();
            for inst in ds.instances() {
                assert_eq!(
                    back.predict(&inst.features).unwrap(),
                    model.predict(&inst.features).unwrap()
                );
            }
        }
        assert!(matches!(
            Model::from_json("{}"),
            Err(ClassifyError::Json(_))
        ));
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("j48".parse::<Algorithm>().unwrap(), Algorithm::Tree);
        assert_eq!("SVM".parse::<Algorithm>().unwrap(), Algorithm::Svm);
        assert!("knn".parse::<Algorithm>().is_err());
    }
}
