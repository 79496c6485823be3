//! Five multiclass classifier families behind one train/predict-probability
//! contract.
//!
//! All learners emit rows on the 4-class simplex in [`ModeLabel`] order and
//! record their training feature names; prediction on a matrix with
//! different columns is an error. Class labels are used densely as codes
//! 0..=3.

mod forest;
mod gbt;
mod logreg;
mod mlp;
mod tree;

pub use forest::{fit_forest, ForestParams, RandomForest};
pub use gbt::{fit_gbt, GbtParams, GradientBoost};
pub use logreg::{fit_logreg, LogReg, LogRegParams};
pub use mlp::{fit_mlp, Mlp, MlpParams};
pub use tree::{fit_tree, DecisionTree, TreeParams};

use serde::{Deserialize, Serialize};

use crate::corpus::ModeLabel;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::scalar::Scalar;

/// Number of target classes.
pub const N_CLASSES: usize = ModeLabel::COUNT;

/// One row of class probabilities, in [`ModeLabel`] order.
pub type ProbRow<T> = [T; N_CLASSES];

/// Uniform prediction contract implemented by every fitted classifier.
pub trait Learner<T: Scalar> {
    /// Feature names the model was trained on.
    fn feature_names(&self) -> &[String];

    /// Per-class probabilities, one row per input row.
    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>>;

    /// Argmax of [`predict_proba`](Self::predict_proba), lowest class index
    /// on ties.
    fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<ModeLabel>> {
        Ok(self.predict_proba(x)?.iter().map(argmax_row).collect())
    }
}

/// Lowest-index argmax over a probability row.
pub fn argmax_row<T: Scalar>(row: &ProbRow<T>) -> ModeLabel {
    let mut best = 0;
    for c in 1..N_CLASSES {
        if row[c] > row[best] {
            best = c;
        }
    }
    ModeLabel::from_code(best).expect("class index in range")
}

/// Numerically stable in-place softmax.
pub fn softmax_in_place<T: Scalar>(scores: &mut [T]) {
    let max = scores
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    let mut sum = T::zero();
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s = *s / sum;
    }
}

/// Softmax cross-entropy of one score row against a true class.
pub fn softmax_cross_entropy<T: Scalar>(scores: &ProbRow<T>, class: ModeLabel) -> T {
    let mut p = *scores;
    softmax_in_place(&mut p);
    -p[class.code()].ln()
}

/// Per-sample gradient and diagonal Hessian of softmax cross-entropy with
/// respect to the scores: `g_c = p_c - 1[c = y]`, `h_c = p_c (1 - p_c)`.
pub fn softmax_grad_hess<T: Scalar>(
    scores: &ProbRow<T>,
    class: ModeLabel,
) -> (ProbRow<T>, ProbRow<T>) {
    let mut p = *scores;
    softmax_in_place(&mut p);
    let mut grad = p;
    grad[class.code()] = grad[class.code()] - T::one();
    let mut hess = [T::zero(); N_CLASSES];
    for c in 0..N_CLASSES {
        hess[c] = p[c] * (T::one() - p[c]);
    }
    (grad, hess)
}

pub(crate) fn check_labels<T: Scalar>(x: &FeatureMatrix<T>, y: &[ModeLabel]) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::LabelCount {
            rows: x.n_rows(),
            labels: y.len(),
        });
    }
    if x.n_rows() == 0 {
        return Err(Error::TooFewRows { got: 0, needed: 1 });
    }
    Ok(())
}

pub(crate) fn require_multiclass(y: &[ModeLabel]) -> Result<()> {
    let first = y.first().copied();
    if y.iter().all(|&l| Some(l) == first) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub(crate) fn check_features<T: Scalar>(names: &[String], x: &FeatureMatrix<T>) -> Result<()> {
    if names != x.names() {
        return Err(Error::ColumnMismatch {
            expected: names.len(),
            head: names.first().cloned().unwrap_or_default(),
        });
    }
    Ok(())
}

/// Hyperparameters for one learner family, with the artifact defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LearnerConfig {
    LogReg(LogRegParams),
    Tree(TreeParams),
    Forest(ForestParams),
    Gbt(GbtParams),
    Mlp(MlpParams),
}

impl LearnerConfig {
    /// Config with family defaults, by CLI name.
    pub fn from_name(name: &str) -> Option<LearnerConfig> {
        match name {
            "logreg" => Some(LearnerConfig::LogReg(LogRegParams::default())),
            "tree" => Some(LearnerConfig::Tree(TreeParams::default())),
            "forest" => Some(LearnerConfig::Forest(ForestParams::default())),
            "gbt" => Some(LearnerConfig::Gbt(GbtParams::default())),
            "mlp" => Some(LearnerConfig::Mlp(MlpParams::default())),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerConfig::LogReg(_) => "logreg",
            LearnerConfig::Tree(_) => "tree",
            LearnerConfig::Forest(_) => "forest",
            LearnerConfig::Gbt(_) => "gbt",
            LearnerConfig::Mlp(_) => "mlp",
        }
    }

    /// Fits this family on the given matrix. `seed` is ignored by the
    /// deterministic families (logreg, tree, gbt).
    pub fn fit<T: Scalar>(
        &self,
        x: &FeatureMatrix<T>,
        y: &[ModeLabel],
        seed: u64,
    ) -> Result<FittedLearner<T>> {
        Ok(match self {
            LearnerConfig::LogReg(p) => FittedLearner::LogReg(fit_logreg(x, y, p)?),
            LearnerConfig::Tree(p) => FittedLearner::Tree(fit_tree(x, y, p)?),
            LearnerConfig::Forest(p) => FittedLearner::Forest(fit_forest(x, y, p, seed)?),
            LearnerConfig::Gbt(p) => FittedLearner::Gbt(fit_gbt(x, y, p)?),
            LearnerConfig::Mlp(p) => FittedLearner::Mlp(fit_mlp(x, y, p, seed)?),
        })
    }
}

/// A fitted classifier of any family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FittedLearner<T> {
    LogReg(LogReg<T>),
    Tree(DecisionTree<T>),
    Forest(RandomForest<T>),
    Gbt(GradientBoost<T>),
    Mlp(Mlp<T>),
}

impl<T: Scalar> Learner<T> for FittedLearner<T> {
    fn feature_names(&self) -> &[String] {
        match self {
            FittedLearner::LogReg(m) => m.feature_names(),
            FittedLearner::Tree(m) => m.feature_names(),
            FittedLearner::Forest(m) => m.feature_names(),
            FittedLearner::Gbt(m) => m.feature_names(),
            FittedLearner::Mlp(m) => m.feature_names(),
        }
    }

    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>> {
        match self {
            FittedLearner::LogReg(m) => m.predict_proba(x),
            FittedLearner::Tree(m) => m.predict_proba(x),
            FittedLearner::Forest(m) => m.predict_proba(x),
            FittedLearner::Gbt(m) => m.predict_proba(x),
            FittedLearner::Mlp(m) => m.predict_proba(x),
        }
    }
}
