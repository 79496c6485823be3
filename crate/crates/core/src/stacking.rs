//! Stacked ensemble: K-fold out-of-fold meta-feature generation, a
//! second-level gradient-boosting meta-model, and full-pipeline inference.
//!
//! Base learners are gradient boosting, random forest and the perceptron, in
//! that fixed order; meta-features are their class probabilities, giving 12
//! meta columns (3 bases x 4 classes). Each train row's meta-features come
//! from base models fitted without that row's fold, so no label information
//! leaks into the meta-model. Inference uses base models refit on the full
//! train set.

use serde::{Deserialize, Serialize};

use crate::corpus::{GasRecord, LabeledCorpus, ModeLabel};
use crate::error::Result;
use crate::features::{extract_matrix, fit_preprocessor, FeatureMatrix, FittedPreprocessor};
use crate::learners::{
    fit_forest, fit_gbt, fit_mlp, ForestParams, GbtParams, GradientBoost, Learner, Mlp,
    MlpParams, ProbRow, RandomForest, N_CLASSES,
};
use crate::metrics::stratified_folds;
use crate::rng::mix_seed;
use crate::scalar::Scalar;

const N_BASES: usize = 3;
const BASE_NAMES: [&str; N_BASES] = ["gbt", "forest", "mlp"];

/// Width of the meta-feature matrix.
pub const META_WIDTH: usize = N_BASES * N_CLASSES;

/// Stacking hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackParams {
    /// Fold count for out-of-fold meta-feature generation.
    pub k: usize,
    /// Correlation threshold for feature pruning.
    pub threshold: f64,
    pub gbt: GbtParams,
    pub forest: ForestParams,
    pub mlp: MlpParams,
    /// Second-level gradient-boosting model.
    pub meta: GbtParams,
}

impl Default for StackParams {
    fn default() -> Self {
        StackParams {
            k: 5,
            threshold: 0.9,
            gbt: GbtParams::default(),
            forest: ForestParams::default(),
            mlp: MlpParams::default(),
            meta: GbtParams {
                rounds: 50,
                lr: 0.1,
                depth: 2,
                lambda: 1.0,
            },
        }
    }
}

/// Fixed meta-feature column names: base-major, class-minor.
pub fn meta_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(META_WIDTH);
    for base in BASE_NAMES {
        for c in 0..N_CLASSES {
            names.push(format!("{base}_p{c}"));
        }
    }
    names
}

// Seed streams: fold f, base b -> f * N_BASES + b; the full-train refits use
// the streams directly after the last fold's.
fn fit_seed(seed: u64, fold: usize, base: usize) -> u64 {
    mix_seed(seed, (fold * N_BASES + base) as u64)
}

struct BaseTrio<T> {
    gbt: GradientBoost<T>,
    forest: RandomForest<T>,
    mlp: Mlp<T>,
}

fn fit_bases<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    params: &StackParams,
    seed: u64,
    fold: usize,
) -> Result<BaseTrio<T>> {
    Ok(BaseTrio {
        gbt: fit_gbt(x, y, &params.gbt)?,
        forest: fit_forest(x, y, &params.forest, fit_seed(seed, fold, 1))?,
        mlp: fit_mlp(x, y, &params.mlp, fit_seed(seed, fold, 2))?,
    })
}

fn base_probas<T: Scalar>(bases: &BaseTrio<T>, x: &FeatureMatrix<T>) -> Result<[Vec<ProbRow<T>>; 3]> {
    Ok([
        bases.gbt.predict_proba(x)?,
        bases.forest.predict_proba(x)?,
        bases.mlp.predict_proba(x)?,
    ])
}

/// Out-of-fold meta-features for a fixed fold assignment. Row order equals
/// the input row order regardless of fold membership.
pub fn oof_from_folds<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    assignment: &[usize],
    seed: u64,
    params: &StackParams,
) -> Result<FeatureMatrix<T>> {
    let n = x.n_rows();
    let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut data = vec![T::zero(); n * META_WIDTH];
    for fold in 0..k {
        let train_rows: Vec<usize> = (0..n).filter(|i| assignment[*i] != fold).collect();
        let test_rows: Vec<usize> = (0..n).filter(|i| assignment[*i] == fold).collect();
        if test_rows.is_empty() {
            continue;
        }
        let x_train = x.select_rows(&train_rows);
        let y_train: Vec<ModeLabel> = train_rows.iter().map(|&i| y[i]).collect();
        let x_test = x.select_rows(&test_rows);

        let bases = fit_bases(&x_train, &y_train, params, seed, fold)?;
        let probas = base_probas(&bases, &x_test)?;
        for (slot, &row) in test_rows.iter().enumerate() {
            for (b, block) in probas.iter().enumerate() {
                for c in 0..N_CLASSES {
                    data[row * META_WIDTH + b * N_CLASSES + c] = block[slot][c];
                }
            }
        }
    }
    FeatureMatrix::new(x.ids().to_vec(), meta_feature_names(), data)
}

/// Stratified-fold out-of-fold meta-features (assignment derived from
/// `(y, k, seed)`).
pub fn generate_oof<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    k: usize,
    seed: u64,
    params: &StackParams,
) -> Result<FeatureMatrix<T>> {
    let assignment = stratified_folds(y, k, seed)?;
    oof_from_folds(x, y, &assignment, seed, params)
}

/// Fitted stacking ensemble: preprocessing, full-train base learners and the
/// meta-model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackedEnsemble<T> {
    preprocessor: FittedPreprocessor<T>,
    gbt: GradientBoost<T>,
    forest: RandomForest<T>,
    mlp: Mlp<T>,
    meta: GradientBoost<T>,
    k: usize,
    seed: u64,
}

impl<T: Scalar> StackedEnsemble<T> {
    pub fn preprocessor(&self) -> &FittedPreprocessor<T> {
        &self.preprocessor
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn meta_matrix(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        let mut data = vec![T::zero(); x.n_rows() * META_WIDTH];
        let probas = [
            self.gbt.predict_proba(x)?,
            self.forest.predict_proba(x)?,
            self.mlp.predict_proba(x)?,
        ];
        for row in 0..x.n_rows() {
            for (b, block) in probas.iter().enumerate() {
                for c in 0..N_CLASSES {
                    data[row * META_WIDTH + b * N_CLASSES + c] = block[row][c];
                }
            }
        }
        FeatureMatrix::new(x.ids().to_vec(), meta_feature_names(), data)
    }

    /// Full-pipeline probabilities for raw records.
    pub fn predict_proba(&self, records: &[GasRecord<T>]) -> Result<Vec<ProbRow<T>>> {
        let raw = extract_matrix(records)?;
        let x = self.preprocessor.apply(&raw)?;
        let meta_x = self.meta_matrix(&x)?;
        self.meta.predict_proba(&meta_x)
    }

    /// Full-pipeline labels and probabilities.
    pub fn predict(&self, records: &[GasRecord<T>]) -> Result<(Vec<ModeLabel>, Vec<ProbRow<T>>)> {
        let probs = self.predict_proba(records)?;
        let labels = probs.iter().map(crate::learners::argmax_row).collect();
        Ok((labels, probs))
    }
}

/// Trains the full stack on a labeled corpus: extraction, preprocessing,
/// out-of-fold meta-features, meta-model, then full-train base refits.
pub fn fit_stack<T: Scalar>(
    corpus: &LabeledCorpus<T>,
    params: &StackParams,
    seed: u64,
) -> Result<StackedEnsemble<T>> {
    let raw = extract_matrix(corpus.records())?;
    let y = corpus.labels_in_order();
    let preprocessor = fit_preprocessor(&raw, params.threshold)?;
    let x = preprocessor.apply(&raw)?;

    let assignment = stratified_folds(&y, params.k, seed)?;
    let meta_x = oof_from_folds(&x, &y, &assignment, seed, params)?;
    let meta = fit_gbt(&meta_x, &y, &params.meta)?;

    let bases = fit_bases(&x, &y, params, seed, params.k)?;
    Ok(StackedEnsemble {
        preprocessor,
        gbt: bases.gbt,
        forest: bases.forest,
        mlp: bases.mlp,
        meta,
        k: params.k,
        seed,
    })
}
