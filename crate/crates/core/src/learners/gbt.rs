//! Multiclass gradient boosting.
//!
//! Per round and per class, a depth-limited regression tree is fit to the
//! negative gradient of softmax cross-entropy (residual `y_ic - p_ic`);
//! leaf values take the Newton step `sum(residual) / (sum(hessian) + lambda)`
//! with `h = p (1 - p)`. Scores start at zero and the final probabilities
//! are the softmax of `lr` times the summed leaf values.

use serde::{Deserialize, Serialize};

use crate::corpus::ModeLabel;
use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::learners::{
    check_features, check_labels, softmax_in_place, Learner, ProbRow, N_CLASSES,
};
use crate::scalar::{count, lit, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub rounds: usize,
    pub lr: f64,
    pub depth: usize,
    /// L2 regularization on leaf weights.
    pub lambda: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            rounds: 100,
            lr: 0.1,
            depth: 3,
            lambda: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum RegNode<T> {
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
    Leaf {
        value: T,
    },
}

fn reg_predict<T: Scalar>(nodes: &[RegNode<T>], row: &[T]) -> T {
    let mut i = 0usize;
    loop {
        match &nodes[i] {
            RegNode::Leaf { value } => return *value,
            RegNode::Split {
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

struct RegGrower<'a, T: Scalar> {
    x: &'a FeatureMatrix<T>,
    residuals: &'a [T],
    hessians: &'a [T],
    max_depth: usize,
    lambda: T,
    nodes: Vec<RegNode<T>>,
}

impl<'a, T: Scalar> RegGrower<'a, T> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let mut g = T::zero();
        let mut h = T::zero();
        for &r in rows {
            g += self.residuals[r];
            h += self.hessians[r];
        }
        self.nodes.push(RegNode::Leaf {
            value: g / (h + self.lambda),
        });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        if depth >= self.max_depth || rows.len() < 2 {
            return self.leaf(&rows);
        }
        let Some((feature, threshold)) = self.best_split(&rows) else {
            return self.leaf(&rows);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x.get(r, feature) <= threshold);
        let idx = self.nodes.len();
        self.nodes.push(RegNode::Leaf { value: T::zero() });
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[idx] = RegNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        idx
    }

    /// Maximizes the squared-error reduction of the residual targets, with
    /// the same midpoint-candidate and tie-break discipline as the
    /// classification tree.
    fn best_split(&self, rows: &[usize]) -> Option<(usize, T)> {
        let n = rows.len();
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        for &r in rows {
            sum += self.residuals[r];
            sum_sq += self.residuals[r] * self.residuals[r];
        }
        let parent_sse = sum_sq - sum * sum / count::<T>(n);

        let mut best: Option<(T, usize, T)> = None;
        let mut order: Vec<(T, T)> = Vec::with_capacity(n); // (value, residual)
        for f in 0..self.x.n_cols() {
            order.clear();
            order.extend(rows.iter().map(|&r| (self.x.get(r, f), self.residuals[r])));
            order.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

            let mut left_sum = T::zero();
            let mut left_sq = T::zero();
            for i in 0..n - 1 {
                left_sum += order[i].1;
                left_sq += order[i].1 * order[i].1;
                let (v, next) = (order[i].0, order[i + 1].0);
                if v == next {
                    continue;
                }
                let threshold = (v + next) / count::<T>(2);
                let mut n_left = i + 1;
                let mut ls = left_sum;
                let mut lq = left_sq;
                while n_left < n && order[n_left].0 <= threshold {
                    ls += order[n_left].1;
                    lq += order[n_left].1 * order[n_left].1;
                    n_left += 1;
                }
                if n_left == n {
                    continue;
                }
                let rs = sum - ls;
                let rq = sum_sq - lq;
                let sse_l = lq - ls * ls / count::<T>(n_left);
                let sse_r = rq - rs * rs / count::<T>(n - n_left);
                let reduction = parent_sse - sse_l - sse_r;
                if reduction <= T::zero() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((b, _, _)) => reduction > *b,
                };
                if better {
                    best = Some((reduction, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// A fitted multiclass gradient-boosting model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientBoost<T> {
    /// `trees[round][class]`
    trees: Vec<[Vec<RegNode<T>>; N_CLASSES]>,
    lr: f64,
    feature_names: Vec<String>,
}

impl<T: Scalar> GradientBoost<T> {
    pub fn rounds(&self) -> usize {
        self.trees.len()
    }

    /// Probabilities using only the first `rounds` boosting rounds.
    pub fn predict_proba_with_rounds(
        &self,
        x: &FeatureMatrix<T>,
        rounds: usize,
    ) -> Result<Vec<ProbRow<T>>> {
        check_features(&self.feature_names, x)?;
        let lr = lit::<T>(self.lr);
        Ok((0..x.n_rows())
            .map(|i| {
                let row = x.row(i);
                let mut scores = [T::zero(); N_CLASSES];
                for round in &self.trees[..rounds] {
                    for c in 0..N_CLASSES {
                        scores[c] += lr * reg_predict(&round[c], row);
                    }
                }
                softmax_in_place(&mut scores);
                scores
            })
            .collect())
    }
}

/// Fits the boosting model. Fully deterministic: no sampling is involved.
pub fn fit_gbt<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    params: &GbtParams,
) -> Result<GradientBoost<T>> {
    check_labels(x, y)?;
    let n = x.n_rows();
    let lr = lit::<T>(params.lr);
    let lambda = lit::<T>(params.lambda);

    let mut scores: Vec<ProbRow<T>> = vec![[T::zero(); N_CLASSES]; n];
    let mut trees = Vec::with_capacity(params.rounds);
    let mut residuals = vec![T::zero(); n];
    let mut hessians = vec![T::zero(); n];

    for _ in 0..params.rounds {
        let probs: Vec<ProbRow<T>> = scores
            .iter()
            .map(|s| {
                let mut p = *s;
                softmax_in_place(&mut p);
                p
            })
            .collect();

        let mut round_trees: Vec<Vec<RegNode<T>>> = Vec::with_capacity(N_CLASSES);
        for c in 0..N_CLASSES {
            for i in 0..n {
                let p = probs[i][c];
                let target = if y[i].code() == c { T::one() } else { T::zero() };
                residuals[i] = target - p;
                hessians[i] = p * (T::one() - p);
            }
            let mut grower = RegGrower {
                x,
                residuals: &residuals,
                hessians: &hessians,
                max_depth: params.depth,
                lambda,
                nodes: Vec::new(),
            };
            grower.grow((0..n).collect(), 0);
            let nodes = grower.nodes;
            for i in 0..n {
                scores[i][c] += lr * reg_predict(&nodes, x.row(i));
            }
            round_trees.push(nodes);
        }
        let arr: [Vec<RegNode<T>>; N_CLASSES] =
            round_trees.try_into().expect("one tree per class");
        trees.push(arr);
    }

    Ok(GradientBoost {
        trees,
        lr: params.lr,
        feature_names: x.names().to_vec(),
    })
}

impl<T: Scalar> Learner<T> for GradientBoost<T> {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>> {
        self.predict_proba_with_rounds(x, self.trees.len())
    }
}
