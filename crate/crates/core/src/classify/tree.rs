use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{decide, Prediction, TreeParams};
use crate::model::Class;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        /// Training counts `[low, high]` reaching this leaf.
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        counts: [usize; 2],
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn counts(&self) -> [usize; 2] {
        match self {
            Node::Leaf { counts } | Node::Split { counts, .. } => *counts,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<&Node> {
        match self {
            Node::Leaf { .. } => vec![self],
            Node::Split { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }
}

/// Binary decision tree over numeric features, grown by gain ratio and
/// pruned with pessimistic error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: Node,
    pub dimension: usize,
}

/// Split search state shared by every node of one tree.
struct Grower<'a> {
    rows: &'a [&'a [f64]],
    labels: &'a [Class],
    min_leaf: usize,
    /// `k * log2(k)` for `k` up to the training size.
    xlogx: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

impl Grower<'_> {
    /// Entropy in bits of a two-class count.
    fn entropy(&self, c: [usize; 2]) -> f64 {
        let n = c[0] + c[1];
        if n == 0 {
            return 0.0;
        }
        (self.xlogx[n] - self.xlogx[c[0]] - self.xlogx[c[1]]) / n as f64
    }

    fn counts_of(&self, idx: &[usize]) -> [usize; 2] {
        let mut c = [0, 0];
        for &i in idx {
            c[self.labels[i].index()] += 1;
        }
        c
    }

    /// Best-gain threshold for one feature, lowest threshold on ties.
    /// `sorted` holds the node's rows ordered by this feature.
    fn best_threshold(
        &self,
        sorted: &[usize],
        total: [usize; 2],
        feature: usize,
    ) -> Option<Candidate> {
        let n = sorted.len() as f64;
        let parent = self.entropy(total);
        let mut left = [0usize, 0];
        let mut best: Option<Candidate> = None;
        for k in 0..sorted.len() - 1 {
            left[self.labels[sorted[k]].index()] += 1;
            let (v, next) = (
                self.rows[sorted[k]][feature],
                self.rows[sorted[k + 1]][feature],
            );
            let nl = k + 1;
            let nr = sorted.len() - nl;
            if v == next || nl < self.min_leaf || nr < self.min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let (fl, fr) = (nl as f64 / n, nr as f64 / n);
            let gain = parent - fl * self.entropy(left) - fr * self.entropy(right);
            if best.is_none_or(|b| gain > b.gain + 1e-12) {
                let split_info = -fl * fl.log2() - fr * fr.log2();
                best = Some(Candidate {
                    feature,
                    threshold: v + (next - v) / 2.0,
                    gain,
                    ratio: gain / split_info,
                });
            }
        }
        best
    }

    /// Among per-feature best splits with at least average gain, the highest
    /// gain ratio wins; ties go to the lowest feature index.
    fn choose_split(&self, sorted: &[Vec<usize>], total: [usize; 2]) -> Option<Candidate> {
        let candidates: Vec<Candidate> = sorted
            .iter()
            .enumerate()
            .filter_map(|(j, s)| self.best_threshold(s, total, j))
            .filter(|c| c.gain > 1e-12)
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let mean = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
        candidates
            .into_iter()
            .filter(|c| c.gain >= mean - 1e-12)
            .fold(None, |acc: Option<Candidate>, c| match acc {
                Some(a) if a.ratio >= c.ratio - 1e-12 => Some(a),
                _ => Some(c),
            })
    }

    /// `sorted[j]` lists the node's rows in increasing order of feature `j`
    /// (row index breaks ties); children inherit the order by stable partition.
    fn grow(&self, sorted: Vec<Vec<usize>>, goes_left: &mut [bool]) -> Node {
        let counts = self.counts_of(&sorted[0]);
        let n = sorted[0].len();
        if counts[0] == 0 || counts[1] == 0 || n < 2 * self.min_leaf {
            return Node::Leaf { counts };
        }
        let Some(c) = self.choose_split(&sorted, counts) else {
            return Node::Leaf { counts };
        };
        for &i in &sorted[0] {
            goes_left[i] = self.rows[i][c.feature] <= c.threshold;
        }
        let (l, r): (Vec<Vec<usize>>, Vec<Vec<usize>>) = sorted
            .into_iter()
            .map(|s| s.into_iter().partition(|&i| goes_left[i]))
            .unzip();
        Node::Split {
            feature: c.feature,
            threshold: c.threshold,
            counts,
            left: Box::new(self.grow(l, goes_left)),
            right: Box::new(self.grow(r, goes_left)),
        }
    }
}

/// Upper-confidence-bound error count added to `errors` observed among `n`
/// training rows at confidence level `cf`.
pub fn estimated_extra_errors(n: f64, errors: f64, cf: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    if errors < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if errors == 0.0 {
            return base;
        }
        return base + errors * (estimated_extra_errors(n, 1.0, cf) - base);
    }
    if errors + 0.5 >= n {
        return (n - errors).max(0.0);
    }
    let z = Normal::standard().inverse_cdf(1.0 - cf);
    let f = (errors + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt())
        / (1.0 + z * z / n);
    r * n - errors
}

fn leaf_error(counts: [usize; 2], cf: f64) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    let e = counts[0].min(counts[1]) as f64;
    e + estimated_extra_errors(n, e, cf)
}

/// Bottom-up subtree replacement. Returns the node's estimated error.
fn prune(node: &mut Node, cf: f64) -> f64 {
    let Node::Split {
        left,
        right,
        counts,
        ..
    } = node
    else {
        return leaf_error(node.counts(), cf);
    };
    let subtree = prune(left, cf) + prune(right, cf);
    let as_leaf = leaf_error(*counts, cf);
    if as_leaf <= subtree + 0.1 {
        *node = Node::Leaf { counts: *counts };
        as_leaf
    } else {
        subtree
    }
}

impl TreeModel {
    pub(crate) fn fit(rows: &[&[f64]], labels: &[Class], params: &TreeParams) -> TreeModel {
        let n = rows.len();
        let grower = Grower {
            rows,
            labels,
            min_leaf: params.min_leaf,
            xlogx: (0..=n)
                .map(|k| {
                    if k == 0 {
                        0.0
                    } else {
                        k as f64 * (k as f64).log2()
                    }
                })
                .collect(),
        };
        let sorted = (0..rows[0].len())
            .map(|j| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| rows[a][j].total_cmp(&rows[b][j]).then(a.cmp(&b)));
                idx
            })
            .collect();
        let mut root = grower.grow(sorted, &mut vec![false; n]);
        if params.pruning {
            prune(&mut root, params.confidence);
        }
        TreeModel {
            root,
            dimension: rows[0].len(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { counts } => {
                    let (class, tie) = decide(counts[0] as f64, counts[1] as f64);
                    let n = (counts[0] + counts[1]).max(1) as f64;
                    return Prediction {
                        class,
                        score: counts[class.index()] as f64 / n,
                        tie,
                    };
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Class::*;

    fn fit(rows: &[Vec<f64>], ys: &[Class], params: TreeParams) -> TreeModel {
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        TreeModel::fit(&refs, ys, &params)
    }

    /// Independent gain ratio of splitting `xs` at `t`, from raw class counts.
    fn oracle_gain_ratio(xs: &[f64], ys: &[Class], t: f64) -> (f64, f64) {
        let h = |items: Vec<Class>| -> f64 {
            let n = items.len() as f64;
            let hi = items.iter().filter(|c| **c == High).count() as f64;
            [hi, n - hi]
                .iter()
                .filter(|k| **k > 0.0)
                .map(|k| -(k / n) * (k / n).log2())
                .sum()
        };
        let n = xs.len() as f64;
        let left: Vec<Class> = xs
            .iter()
            .zip(ys)
            .filter(|(x, _)| **x <= t)
            .map(|(_, y)| *y)
            .collect();
        let right: Vec<Class> = xs
            .iter()
            .zip(ys)
            .filter(|(x, _)| **x > t)
            .map(|(_, y)| *y)
            .collect();
        let (pl, pr) = (left.len() as f64 / n, right.len() as f64 / n);
        let gain = h(ys.to_vec()) - pl * h(left) - pr * h(right);
        (gain, gain / (-pl * pl.log2() - pr * pr.log2()))
    }

    #[test]
    fn root_split_matches_brute_force() {
        // feature 0 separates perfectly at 3; feature 1 is noisy
        let rows = vec![
            vec![1.0, 5.0],
            vec![2.0, 1.0],
            vec![2.5, 4.0],
            vec![3.5, 2.0],
            vec![4.0, 3.0],
            vec![5.0, 6.0],
        ];
        let ys = [Low, Low, Low, High, High, High];
        let m = fit(
            &rows,
            &ys,
            TreeParams {
                pruning: false,
                ..Default::default()
            },
        );
        let Node::Split {
            feature, threshold, ..
        } = m.root
        else {
            panic!("expected a split")
        };
        assert_eq!(feature, 0);
        assert!((threshold - 3.0).abs() < 1e-12);

        // exhaustive search over every midpoint of every feature
        let mut best = (f64::NEG_INFINITY, 0, 0.0);
        for j in 0..2 {
            let xs: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let mut v = xs.clone();
            v.sort_by(f64::total_cmp);
            for w in v.windows(2) {
                let t = (w[0] + w[1]) / 2.0;
                let (_, ratio) = oracle_gain_ratio(&xs, &ys, t);
                if ratio > best.0 {
                    best = (ratio, j, t);
                }
            }
        }
        assert_eq!((best.1, best.2), (feature, threshold));
    }

    #[test]
    fn extra_errors_reference_points() {
        // closed form when no errors: n (1 - cf^(1/n))
        assert!(
            (estimated_extra_errors(4.0, 0.0, 0.25) - 4.0 * (1.0 - 0.25f64.powf(0.25))).abs()
                < 1e-12
        );
        // Wilson-style upper bound with z = 0.6744897501960817
        let z = 0.674_489_750_196_081_7f64;
        let (n, e) = (20.0, 5.0);
        let f = (e + 0.5) / n;
        let upper =
            (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt())
                / (1.0 + z * z / n);
        assert!((estimated_extra_errors(n, e, 0.25) - (upper * n - e)).abs() < 1e-9);
        assert_eq!(estimated_extra_errors(3.0, 3.0, 0.25), 0.0);
    }

    #[test]
    fn pruning_collapses_noise() {
        // two isolated High rows on a Low background
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let ys: Vec<Class> = (0..40)
            .map(|i| if [7, 23].contains(&i) { High } else { Low })
            .collect();
        let unpruned = fit(
            &rows,
            &ys,
            TreeParams {
                pruning: false,
                ..Default::default()
            },
        );
        let pruned = fit(&rows, &ys, TreeParams::default());
        assert!(unpruned.root.depth() >= 2);
        assert_eq!(pruned.root, Node::Leaf { counts: [38, 2] });
    }

    #[test]
    fn leaves_respect_min_leaf() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i * 7 % 11) as f64, (i * 3 % 5) as f64])
            .collect();
        let ys: Vec<Class> = (0..30)
            .map(|i| if i % 3 == 0 { High } else { Low })
            .collect();
        let m = fit(
            &rows,
            &ys,
            TreeParams {
                pruning: false,
                min_leaf: 3,
                ..Default::default()
            },
        );
        for leaf in m.root.leaves() {
            let c = leaf.counts();
            assert!(c[0] + c[1] >= 3);
        }
    }

    #[test]
    fn constant_features_give_majority_leaf() {
        let rows = vec![vec![1.0]; 5];
        let m = fit(&rows, &[High, High, Low, High, Low], TreeParams::default());
        assert_eq!(m.root, Node::Leaf { counts: [2, 3] });
        let p = m.predict(&[9.0]);
        assert_eq!(p.class, High);
        assert!((p.score - 0.6).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn deterministic_and_monotone_invariant(
            data in proptest::collection::vec((-20i32..20, -20i32..20, proptest::bool::ANY), 4..40),
        ) {
            let rows: Vec<Vec<f64>> = data.iter().map(|(a, b, _)| vec![*a as f64, *b as f64]).collect();
            let ys: Vec<Class> = data.iter().map(|(_, _, h)| if *h { High } else { Low }).collect();
            let a = fit(&rows, &ys, TreeParams::default());
            let b = fit(&rows, &ys, TreeParams::default());
            proptest::prop_assert_eq!(&a, &b);
            // a strictly increasing transform keeps the partition structure
            let scaled: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] * 3.0 + 1.0, r[1] * 0.5]).collect();
            let c = fit(&scaled, &ys, TreeParams::default());
            for (r, s) in rows.iter().zip(&scaled) {
                proptest::prop_assert_eq!(a.predict(r).class, c.predict(s).class);
            }
        }
    }
}
