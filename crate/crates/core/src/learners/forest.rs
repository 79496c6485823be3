//! Random forest: bagged CART trees with per-split feature subsampling,
//! soft-voted by averaging leaf class-frequency vectors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::ModeLabel;
use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::learners::tree::{predict_row, Grower, TreeNode};
use crate::learners::{check_features, check_labels, Learner, ProbRow, N_CLASSES};
use crate::rng::{mix_seed, seeded};
use crate::scalar::{count, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Bootstrap-resample the rows of each tree (size N, with replacement).
    pub bootstrap: bool,
    /// Features drawn per split; `None` means `floor(sqrt(d))`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 10,
            min_leaf: 1,
            bootstrap: true,
            max_features: None,
        }
    }
}

/// A fitted random forest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest<T> {
    trees: Vec<Vec<TreeNode<T>>>,
    feature_names: Vec<String>,
}

impl<T: Scalar> RandomForest<T> {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Fits `n_trees` CART trees; tree `i` owns the RNG stream `(seed, i)`, so
/// trees are independent of each other and of fit order.
pub fn fit_forest<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest<T>> {
    check_labels(x, y)?;
    let n = x.n_rows();
    let d = x.n_cols();
    let m = params
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().floor() as usize)
        .max(1);

    let mut trees = Vec::with_capacity(params.n_trees);
    for i in 0..params.n_trees {
        let mut rng = seeded(mix_seed(seed, i as u64));
        let rows: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let grower = Grower {
            x,
            y,
            max_depth: params.max_depth,
            min_leaf: params.min_leaf.max(1),
            feature_sample: Some((&mut rng, m)),
            nodes: Vec::new(),
        };
        trees.push(grower.grow(rows));
    }
    Ok(RandomForest {
        trees,
        feature_names: x.names().to_vec(),
    })
}

impl<T: Scalar> Learner<T> for RandomForest<T> {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>> {
        check_features(&self.feature_names, x)?;
        let n_trees = count::<T>(self.trees.len());
        Ok((0..x.n_rows())
            .map(|i| {
                let row = x.row(i);
                let mut acc = [T::zero(); N_CLASSES];
                for tree in &self.trees {
                    let probs = predict_row(tree, row);
                    for c in 0..N_CLASSES {
                        acc[c] += probs[c];
                    }
                }
                for p in &mut acc {
                    *p = *p / n_trees;
                }
                acc
            })
            .collect())
    }
}
