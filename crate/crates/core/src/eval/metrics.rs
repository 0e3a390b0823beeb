use serde::{Deserialize, Serialize};

use crate::model::Class;

/// 2×2 counts indexed `[gold][predicted]` by [`Class::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Class, Class)>) -> Self {
        let mut m = ConfusionMatrix::default();
        for (gold, pred) in pairs {
            m.counts[gold.index()][pred.index()] += 1;
        }
        m
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }

    pub fn merged(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        let mut m = *self;
        for g in 0..2 {
            for p in 0..2 {
                m.counts[g][p] += other.counts[g][p];
            }
        }
        m
    }

    /// Precision, recall and F1 of one class; zero denominators give 0.
    pub fn class_metrics(&self, class: Class) -> ClassMetrics {
        let c = class.index();
        let tp = self.counts[c][c] as f64;
        let fp = self.counts[1 - c][c] as f64;
        let fn_ = self.counts[c][1 - c] as f64;
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        ClassMetrics {
            precision,
            recall,
            f1: ratio(2.0 * precision * recall, precision + recall),
        }
    }

    /// Unweighted mean over the two classes.
    pub fn macro_metrics(&self) -> ClassMetrics {
        let [lo, hi] = Class::ALL.map(|c| self.class_metrics(c));
        ClassMetrics {
            precision: (lo.precision + hi.precision) / 2.0,
            recall: (lo.recall + hi.recall) / 2.0,
            f1: (lo.f1 + hi.f1) / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(counts: [[usize; 2]; 2]) -> ConfusionMatrix {
        ConfusionMatrix { counts }
    }

    #[test]
    fn hand_example() {
        let m = cm([[40, 10], [20, 30]]).macro_metrics();
        // P = (40/60 + 30/40)/2, R = (40/50 + 30/50)/2
        let p = (40.0 / 60.0 + 0.75) / 2.0;
        let r = (0.8 + 0.6) / 2.0;
        let f_lo = 2.0 * (40.0 / 60.0) * 0.8 / (40.0 / 60.0 + 0.8);
        let f_hi = 2.0 * 0.75 * 0.6 / (0.75 + 0.6);
        assert!((m.precision - p).abs() < 1e-12);
        assert!((m.recall - r).abs() < 1e-12);
        assert!((m.f1 - (f_lo + f_hi) / 2.0).abs() < 1e-12);
        assert!((m.f1 - 0.6970).abs() < 1e-4);
    }

    #[test]
    fn perfect_and_degenerate() {
        let perfect = cm([[5, 0], [0, 7]]).macro_metrics();
        assert_eq!(
            (perfect.precision, perfect.recall, perfect.f1),
            (1.0, 1.0, 1.0)
        );
        let all_low = cm([[5, 0], [7, 0]]);
        assert_eq!(all_low.class_metrics(Class::Low).recall, 1.0);
        assert_eq!(
            all_low.class_metrics(Class::High),
            ClassMetrics {
                precision: 0.0,
                recall: 0.0,
                f1: 0.0
            }
        );
    }

    proptest::proptest! {
        #[test]
        fn label_swap_and_bounds(a in 0usize..50, b in 0usize..50, c in 0usize..50, d in 0usize..50) {
            let m = cm([[a, b], [c, d]]);
            let swapped = cm([[d, c], [b, a]]);
            let (x, y) = (m.macro_metrics(), swapped.macro_metrics());
            proptest::prop_assert!((x.f1 - y.f1).abs() < 1e-12);
            proptest::prop_assert!((x.precision - y.precision).abs() < 1e-12);
            proptest::prop_assert!((0.0..=1.0).contains(&x.f1));
            proptest::prop_assert_eq!(m.total(), a + b + c + d);
        }
    }
}
