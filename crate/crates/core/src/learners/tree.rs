//! CART classification tree with Gini impurity.
//!
//! Candidate thresholds are midpoints of consecutive distinct sorted values
//! per feature; the best split maximizes impurity decrease with ties broken
//! toward the lowest feature index, then the smallest threshold (first
//! strictly-better candidate wins in scan order). The left child holds rows
//! with `value <= threshold`.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::ModeLabel;
use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::learners::{check_features, check_labels, Learner, ProbRow, N_CLASSES};
use crate::scalar::{count, Scalar};

/// Tree hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 10,
            min_leaf: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) enum TreeNode<T> {
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
    Leaf {
        probs: ProbRow<T>,
    },
}

pub(crate) fn gini_from_counts<T: Scalar>(counts: &[usize; N_CLASSES], total: usize) -> T {
    let n = count::<T>(total);
    let mut g = T::one();
    for &c in counts {
        let p = count::<T>(c) / n;
        g = g - p * p;
    }
    g
}

fn class_counts(y: &[ModeLabel], rows: &[usize]) -> [usize; N_CLASSES] {
    let mut counts = [0usize; N_CLASSES];
    for &r in rows {
        counts[y[r].code()] += 1;
    }
    counts
}

pub(crate) struct Grower<'a, T: Scalar> {
    pub x: &'a FeatureMatrix<T>,
    pub y: &'a [ModeLabel],
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features drawn per split when subsampling (forest); `None` considers
    /// every feature.
    pub feature_sample: Option<(&'a mut ChaCha8Rng, usize)>,
    pub nodes: Vec<TreeNode<T>>,
}

impl<'a, T: Scalar> Grower<'a, T> {
    pub fn grow(mut self, rows: Vec<usize>) -> Vec<TreeNode<T>> {
        self.grow_node(rows, 0);
        self.nodes
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.n_cols();
        match &mut self.feature_sample {
            Some((rng, m)) if *m < d => {
                use rand::Rng;
                let mut pool: Vec<usize> = (0..d).collect();
                for i in 0..*m {
                    let j = rng.gen_range(i..d);
                    pool.swap(i, j);
                }
                let mut picked = pool[..*m].to_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..d).collect(),
        }
    }

    fn grow_node(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = class_counts(self.y, &rows);
        let total = rows.len();
        let parent_gini = gini_from_counts::<T>(&counts, total);

        let make_leaf = |nodes: &mut Vec<TreeNode<T>>| {
            let mut probs = [T::zero(); N_CLASSES];
            for c in 0..N_CLASSES {
                probs[c] = count::<T>(counts[c]) / count::<T>(total);
            }
            nodes.push(TreeNode::Leaf { probs });
            nodes.len() - 1
        };

        if parent_gini == T::zero() || depth >= self.max_depth || total < 2 * self.min_leaf {
            return make_leaf(&mut self.nodes);
        }

        let features = self.candidate_features();
        let best = best_split(self.x, self.y, &rows, &features, self.min_leaf, parent_gini, &counts);

        let Some((feature, threshold)) = best else {
            return make_leaf(&mut self.nodes);
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x.get(r, feature) <= threshold);

        // reserve the slot so the root stays at index 0
        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            probs: [T::zero(); N_CLASSES],
        });
        let left = self.grow_node(left_rows, depth + 1);
        let right = self.grow_node(right_rows, depth + 1);
        self.nodes[idx] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        idx
    }
}

/// Exhaustive scan over midpoint candidates for the given features.
/// Left counts are derived from the `value <= threshold` predicate so the
/// chosen partition is exactly reproducible from `(feature, threshold)`.
fn best_split<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
    parent_gini: T,
    parent_counts: &[usize; N_CLASSES],
) -> Option<(usize, T)> {
    let n = rows.len();
    let n_t = count::<T>(n);
    let mut best: Option<(T, usize, T)> = None; // (decrease, feature, threshold)

    let mut order: Vec<(T, usize)> = Vec::with_capacity(n);
    for &f in features {
        order.clear();
        order.extend(rows.iter().map(|&r| (x.get(r, f), y[r].code())));
        order.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

        let mut left = [0usize; N_CLASSES];
        for i in 0..n - 1 {
            left[order[i].1] += 1;
            let (v, next) = (order[i].0, order[i + 1].0);
            if v == next {
                continue;
            }
            let threshold = (v + next) / count::<T>(2);
            // When the midpoint rounds up onto the next value, rows equal to
            // it belong to the left side per the `<=` rule.
            let mut n_left = i + 1;
            let mut left_eff = left;
            while n_left < n && order[n_left].0 <= threshold {
                left_eff[order[n_left].1] += 1;
                n_left += 1;
            }
            if n_left == n || n_left < min_leaf || n - n_left < min_leaf {
                continue;
            }
            let mut right_eff = [0usize; N_CLASSES];
            for c in 0..N_CLASSES {
                right_eff[c] = parent_counts[c] - left_eff[c];
            }
            let wl = count::<T>(n_left) / n_t;
            let wr = count::<T>(n - n_left) / n_t;
            let decrease = parent_gini
                - (wl * gini_from_counts::<T>(&left_eff, n_left)
                    + wr * gini_from_counts::<T>(&right_eff, n - n_left));
            if decrease <= T::zero() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((b, _, _)) => decrease > *b,
            };
            if better {
                best = Some((decrease, f, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

pub(crate) fn predict_row<T: Scalar>(nodes: &[TreeNode<T>], row: &[T]) -> ProbRow<T> {
    let mut i = 0usize;
    loop {
        match &nodes[i] {
            TreeNode::Leaf { probs } => return *probs,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                i = if row[*feature] <= *threshold {
                    *left
                } else {
                    *right
                };
            }
        }
    }
}

/// A fitted CART classification tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<T> {
    nodes: Vec<TreeNode<T>>,
    feature_names: Vec<String>,
}

impl<T: Scalar> DecisionTree<T> {
    /// The root split, or `None` when the root is a leaf.
    pub fn root_split(&self) -> Option<(usize, T)> {
        match self.nodes.first() {
            Some(TreeNode::Split {
                feature, threshold, ..
            }) => Some((*feature, *threshold)),
            _ => None,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Fits a CART tree on the full feature set.
pub fn fit_tree<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    params: &TreeParams,
) -> Result<DecisionTree<T>> {
    check_labels(x, y)?;
    let grower = Grower {
        x,
        y,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf.max(1),
        feature_sample: None,
        nodes: Vec::new(),
    };
    let nodes = grower.grow((0..x.n_rows()).collect());
    Ok(DecisionTree {
        nodes,
        feature_names: x.names().to_vec(),
    })
}

impl<T: Scalar> Learner<T> for DecisionTree<T> {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>> {
        check_features(&self.feature_names, x)?;
        Ok((0..x.n_rows())
            .map(|i| predict_row(&self.nodes, x.row(i)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::test_util::toy_matrix;

    #[test]
    fn pure_node_becomes_leaf_immediately() {
        let (x, y) = toy_matrix(
            &["f"],
            &[(&[1.0], 2), (&[2.0], 2), (&[3.0], 2)],
        );
        let t = fit_tree(&x, &y, &TreeParams::default()).unwrap();
        assert_eq!(t.n_nodes(), 1);
        assert_eq!(t.root_split(), None);
        let probs = t.predict_proba(&x).unwrap();
        assert_eq!(probs[0], [0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn clean_two_class_split_at_midpoint() {
        let (x, y) = toy_matrix(
            &["f"],
            &[(&[1.0], 0), (&[2.0], 0), (&[3.0], 1), (&[4.0], 1)],
        );
        let t = fit_tree(&x, &y, &TreeParams::default()).unwrap();
        assert_eq!(t.root_split(), Some((0, 2.5)));
        let labels = t.predict(&x).unwrap();
        assert_eq!(
            labels.iter().map(|l| l.code()).collect::<Vec<_>>(),
            [0, 0, 1, 1]
        );
    }

    #[test]
    fn single_leaf_tree_reports_class_frequencies() {
        let (x, y) = toy_matrix(
            &["f"],
            &[(&[1.0], 0), (&[1.0], 0), (&[1.0], 1), (&[1.0], 1)],
        );
        // only one distinct value: no candidate split exists
        let t = fit_tree(&x, &y, &TreeParams::default()).unwrap();
        assert_eq!(t.n_nodes(), 1);
        let probs = t.predict_proba(&x).unwrap();
        for row in probs {
            assert_eq!(row, [0.5, 0.5, 0.0, 0.0]);
        }
    }

    #[test]
    fn tie_break_prefers_lowest_feature_then_smallest_threshold() {
        // Both features separate the classes perfectly; feature 0 must win.
        let (x, y) = toy_matrix(
            &["a", "b"],
            &[(&[1.0, 10.0], 0), (&[2.0, 20.0], 0), (&[3.0, 30.0], 1), (&[4.0, 40.0], 1)],
        );
        let t = fit_tree(&x, &y, &TreeParams::default()).unwrap();
        assert_eq!(t.root_split(), Some((0, 2.5)));
    }

    #[test]
    fn max_depth_one_gives_a_stump() {
        let (x, y) = toy_matrix(
            &["f"],
            &[(&[1.0], 0), (&[2.0], 1), (&[3.0], 0), (&[4.0], 1)],
        );
        let t = fit_tree(
            &x,
            &y,
            &TreeParams {
                max_depth: 1,
                min_leaf: 1,
            },
        )
        .unwrap();
        assert!(t.n_nodes() <= 3);
    }

    #[test]
    fn min_leaf_blocks_unbalanced_splits() {
        let (x, y) = toy_matrix(
            &["f"],
            &[(&[1.0], 0), (&[2.0], 1), (&[3.0], 1), (&[4.0], 1)],
        );
        let t = fit_tree(
            &x,
            &y,
            &TreeParams {
                max_depth: 10,
                min_leaf: 2,
            },
        )
        .unwrap();
        // the perfect split (1 | 2,3,4) violates min_leaf=2, so the 2/2
        // split at 2.5 wins instead
        assert_eq!(t.root_split(), Some((0, 2.5)));
        assert_eq!(t.n_nodes(), 3);
    }

    #[test]
    fn rejects_column_mismatch_at_prediction() {
        let (x, y) = toy_matrix(&["f"], &[(&[1.0], 0), (&[2.0], 1)]);
        let t = fit_tree(&x, &y, &TreeParams::default()).unwrap();
        let (other, _) = toy_matrix(&["g"], &[(&[1.0], 0)]);
        assert!(t.predict_proba(&other).is_err());
    }

    #[test]
    fn scale_invariance_under_power_of_two_column_scaling() {
        let (x, y) = toy_matrix(
            &["a", "b"],
            &[
                (&[1.0, 4.0], 0),
                (&[2.0, 3.0], 1),
                (&[3.0, 7.0], 2),
                (&[4.0, 1.0], 3),
                (&[1.5, 6.0], 0),
                (&[2.5, 2.0], 1),
            ],
        );
        let t = fit_tree(&x, &y, &TreeParams::default()).unwrap();

        // scale column a by 4 (exact in binary floating point), refit
        let scaled_rows: Vec<Vec<f64>> = (0..x.n_rows())
            .map(|i| vec![x.get(i, 0) * 4.0, x.get(i, 1)])
            .collect();
        let pairs: Vec<(&[f64], usize)> = scaled_rows
            .iter()
            .zip(&y)
            .map(|(r, l)| (r.as_slice(), l.code()))
            .collect();
        let (xs, ys) = toy_matrix(&["a", "b"], &pairs);
        let ts = fit_tree(&xs, &ys, &TreeParams::default()).unwrap();

        assert_eq!(t.predict_proba(&x).unwrap(), ts.predict_proba(&xs).unwrap());
    }
}
