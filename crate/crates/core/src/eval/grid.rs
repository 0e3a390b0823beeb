use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    evaluate, mcnemar_test, EvalError, EvaluationReport, LooMode, McNemarResult, MethodChoice,
};
use crate::classify::{Algorithm, ClassifierSpec};
use crate::features::{project_sensors, Dataset, SensorMask};
use crate::model::Target;

/// Published macro precision, recall and F1 for one setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

const fn r(precision: f64, recall: f64, f1: f64) -> ReferenceScore {
    ReferenceScore {
        precision,
        recall,
        f1,
    }
}

/// Published best learner and scores per sensor combination, in
/// [`SensorMask::COMBINATIONS`] order. The EEG+EMG arousal entry names
/// both SVM and J48 for one set of numbers.
const AROUSAL: [(&[Algorithm], ReferenceScore); 7] = [
    (&[Algorithm::Svm], r(0.605, 0.605, 0.605)),
    (&[Algorithm::Tree], r(0.671, 0.645, 0.630)),
    (&[Algorithm::Nb], r(0.315, 0.316, 0.315)),
    (&[Algorithm::Svm], r(0.639, 0.638, 0.638)),
    (&[Algorithm::Tree], r(0.653, 0.618, 0.596)),
    (&[Algorithm::Svm, Algorithm::Tree], r(0.619, 0.618, 0.618)),
    (&[Algorithm::Svm], r(0.606, 0.605, 0.605)),
];

const VALENCE: [(&[Algorithm], ReferenceScore); 7] = [
    (&[Algorithm::Svm], r(0.567, 0.566, 0.563)),
    (&[Algorithm::Nb], r(0.585, 0.507, 0.359)),
    (&[Algorithm::Tree], r(0.748, 0.599, 0.527)),
    (&[Algorithm::Svm], r(0.553, 0.553, 0.551)),
    (&[Algorithm::Tree], r(0.540, 0.539, 0.539)),
    (&[Algorithm::Svm], r(0.559, 0.559, 0.559)),
    (&[Algorithm::Svm], r(0.586, 0.586, 0.585)),
];

/// Published scores for a cell, if that learner was the one reported.
pub fn reference_score(
    mask: SensorMask,
    algorithm: Algorithm,
    target: Target,
) -> Option<ReferenceScore> {
    let row = SensorMask::COMBINATIONS.iter().position(|m| *m == mask)?;
    let (algs, score) = match target {
        Target::Arousal => AROUSAL[row],
        Target::Valence => VALENCE[row],
    };
    algs.contains(&algorithm).then_some(score)
}

/// Which cells to evaluate and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub masks: Vec<SensorMask>,
    pub classifiers: Vec<ClassifierSpec>,
    pub targets: Vec<Target>,
    pub mode: LooMode,
    pub mcnemar: MethodChoice,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            masks: SensorMask::COMBINATIONS.to_vec(),
            classifiers: Algorithm::ALL
                .iter()
                .map(|a| ClassifierSpec::default_for(*a))
                .collect(),
            targets: vec![Target::Arousal, Target::Valence],
            mode: LooMode::Instance,
            mcnemar: MethodChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub target: Target,
    pub mask: SensorMask,
    pub algorithm: Algorithm,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub reference: Option<ReferenceScore>,
    /// Highest F1 for its target (first in canonical order on ties).
    pub best: bool,
    /// Paired test against the best cell of the same target.
    pub vs_best: Option<McNemarResult>,
    #[serde(skip)]
    pub report: Option<EvaluationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonGrid {
    pub mode: LooMode,
    pub instances: usize,
    pub cells: Vec<GridCell>,
}

/// Every requested mask × classifier × target, LOO-evaluated, with the best
/// cell per target flagged and McNemar p-values against it.
pub fn run_comparison(
    dataset: &Dataset,
    options: &GridOptions,
) -> Result<ComparisonGrid, EvalError> {
    let mut projected = BTreeMap::new();
    for mask in &options.masks {
        projected.insert(*mask, project_sensors(dataset, *mask)?);
    }
    let mut cells = Vec::new();
    for &target in &options.targets {
        let first = cells.len();
        for mask in &options.masks {
            for spec in &options.classifiers {
                let report = evaluate(spec, &projected[mask], target, options.mode)?;
                let m = report.macro_avg;
                cells.push(GridCell {
                    target,
                    mask: *mask,
                    algorithm: spec.algorithm(),
                    precision: m.precision,
                    recall: m.recall,
                    f1: m.f1,
                    reference: reference_score(*mask, spec.algorithm(), target),
                    best: false,
                    vs_best: None,
                    report: Some(report),
                });
            }
        }
        let group = &mut cells[first..];
        let Some(best) = group
            .iter()
            .enumerate()
            .fold(None, |acc: Option<(usize, f64)>, (i, c)| match acc {
                Some((_, f)) if f >= c.f1 => acc,
                _ => Some((i, c.f1)),
            })
            .map(|(i, _)| i)
        else {
            continue;
        };
        group[best].best = true;
        let best_preds = group[best]
            .report
            .as_ref()
            .expect("just evaluated")
            .predictions
            .clone();
        for (i, cell) in group.iter_mut().enumerate() {
            if i != best {
                let preds = &cell.report.as_ref().expect("just evaluated").predictions;
                cell.vs_best = Some(mcnemar_test(&best_preds, preds, options.mcnemar)?);
            }
        }
    }
    Ok(ComparisonGrid {
        mode: options.mode,
        instances: dataset.len(),
        cells,
    })
}

pub const GRID_CSV_HEADER: [&str; 13] = [
    "target",
    "mask",
    "classifier",
    "precision",
    "recall",
    "f1",
    "reference_precision",
    "reference_recall",
    "reference_f1",
    "best",
    "mcnemar_b",
    "mcnemar_c",
    "p_value_vs_best",
];

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

impl ComparisonGrid {
    pub fn best(&self, target: Target) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.target == target && c.best)
    }

    pub fn cell(
        &self,
        mask: SensorMask,
        algorithm: Algorithm,
        target: Target,
    ) -> Option<&GridCell> {
        self.cells
            .iter()
            .find(|c| c.mask == mask && c.algorithm == algorithm && c.target == target)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }

    /// One row per cell; numbers with six decimals so output is stable.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| EvalError::Io(e.to_string());
        w.write_record(GRID_CSV_HEADER).map_err(io)?;
        for c in &self.cells {
            let opt = |v: Option<f64>| v.map(fixed).unwrap_or_default();
            w.write_record([
                c.target.to_string(),
                c.mask.to_string(),
                c.algorithm.display_name().to_string(),
                fixed(c.precision),
                fixed(c.recall),
                fixed(c.f1),
                opt(c.reference.map(|r| r.precision)),
                opt(c.reference.map(|r| r.recall)),
                opt(c.reference.map(|r| r.f1)),
                c.best.to_string(),
                c.vs_best.map(|m| m.b.to_string()).unwrap_or_default(),
                c.vs_best.map(|m| m.c.to_string()).unwrap_or_default(),
                opt(c.vs_best.map(|m| m.p_value)),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| EvalError::Io(e.to_string()))
    }

    /// Plain-text table laid out like the published one: rows per sensor
    /// setting, a block per target.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let mut targets: Vec<Target> = self.cells.iter().map(|c| c.target).collect();
        targets.dedup();
        for target in targets {
            let _ = writeln!(
                out,
                "{target} ({} LOO, {} instances)",
                self.mode, self.instances
            );
            let _ = writeln!(
                out,
                "  {:<9} {:<4} {:>6} {:>6} {:>6}  {:>7}  {:>8}",
                "signals", "clf", "P", "R", "F1", "ref F1", "p vs best"
            );
            for c in self.cells.iter().filter(|c| c.target == target) {
                let reference = c
                    .reference
                    .map(|r| format!("{:.3}", r.f1))
                    .unwrap_or_else(|| "-".into());
                let p = match (c.best, c.vs_best) {
                    (true, _) => "best".to_string(),
                    (false, Some(m)) => format!("{:.4}", m.p_value),
                    (false, None) => "-".to_string(),
                };
                let _ = writeln!(
                    out,
                    "  {:<9} {:<4} {:>6.3} {:>6.3} {:>6.3}  {:>7}  {:>8}",
                    c.mask.to_string(),
                    c.algorithm.display_name(),
                    c.precision,
                    c.recall,
                    c.f1,
                    reference,
                    p
                );
            }
        }
        out
    }
}
