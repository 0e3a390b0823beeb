//! Leave-one-out evaluation, macro-averaged metrics, McNemar tests and the
//! sensor-combination comparison grid.

mod grid;
mod loo;
mod mcnemar;
mod metrics;

pub use grid::{
    reference_score, run_comparison, ComparisonGrid, GridCell, GridOptions, ReferenceScore,
    GRID_CSV_HEADER,
};
pub use loo::{
    evaluate, evaluate_with_audit, folds, loo_evaluate, macro_metrics, EvaluationReport, FoldAudit,
    FoldPrediction, LooMode,
};
pub use mcnemar::{
    mcnemar_from_counts, mcnemar_test, McNemarMethod, McNemarResult, MethodChoice, EXACT_BELOW,
};
pub use metrics::{ClassMetrics, ConfusionMatrix};

use crate::classify::ClassifyError;
use crate::features::FeatureError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("no predictions to score")]
    EmptyDataset,
    #[error("leave-one-out needs at least 2 instances, got {0}")]
    TooFewInstances(usize),
    #[error("leave-one-subject-out needs at least 2 subjects, got {0}")]
    TooFewFolds(usize),
    #[error("prediction sets do not match: {0}")]
    InstanceMismatch(String),
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: ClassifyError,
    },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("report output: {0}")]
    Io(String),
}
