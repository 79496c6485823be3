//! End-to-end record classifiers: raw gas records in, mode labels out.
//!
//! [`SinglePipeline`] couples one fitted preprocessor with one learner;
//! [`FittedPipeline`] is the serializable sum of that and the stacked
//! ensemble, and is what model persistence stores.

use serde::{Deserialize, Serialize};

use crate::corpus::{GasRecord, LabeledCorpus, ModeLabel};
use crate::error::Result;
use crate::features::{extract_matrix, fit_preprocessor, FittedPreprocessor};
use crate::learners::{argmax_row, FittedLearner, Learner, LearnerConfig, ProbRow};
use crate::scalar::Scalar;
use crate::stacking::{fit_stack, StackParams, StackedEnsemble};

/// Anything that classifies raw records end to end.
pub trait Predictor<T: Scalar> {
    fn predict_labels(&self, records: &[GasRecord<T>]) -> Result<Vec<ModeLabel>>;
}

/// Preprocessor plus a single fitted learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglePipeline<T> {
    pub preprocessor: FittedPreprocessor<T>,
    pub learner: FittedLearner<T>,
}

impl<T: Scalar> SinglePipeline<T> {
    /// Extraction, preprocessor fit and learner fit on one corpus.
    pub fn fit(
        corpus: &LabeledCorpus<T>,
        config: &LearnerConfig,
        threshold: f64,
        seed: u64,
    ) -> Result<SinglePipeline<T>> {
        let raw = extract_matrix(corpus.records())?;
        let preprocessor = fit_preprocessor(&raw, threshold)?;
        let x = preprocessor.apply(&raw)?;
        let learner = config.fit(&x, &corpus.labels_in_order(), seed)?;
        Ok(SinglePipeline {
            preprocessor,
            learner,
        })
    }

    pub fn predict_proba(&self, records: &[GasRecord<T>]) -> Result<Vec<ProbRow<T>>> {
        let raw = extract_matrix(records)?;
        let x = self.preprocessor.apply(&raw)?;
        self.learner.predict_proba(&x)
    }
}

impl<T: Scalar> Predictor<T> for SinglePipeline<T> {
    fn predict_labels(&self, records: &[GasRecord<T>]) -> Result<Vec<ModeLabel>> {
        Ok(self.predict_proba(records)?.iter().map(argmax_row).collect())
    }
}

impl<T: Scalar> Predictor<T> for StackedEnsemble<T> {
    fn predict_labels(&self, records: &[GasRecord<T>]) -> Result<Vec<ModeLabel>> {
        Ok(self.predict(records)?.0)
    }
}

/// A fitted end-to-end pipeline of either kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FittedPipeline<T> {
    Single(SinglePipeline<T>),
    Stacked(StackedEnsemble<T>),
}

impl<T: Scalar> FittedPipeline<T> {
    /// Fits the full stacking pipeline (the artifact's main model).
    pub fn fit_stacked(
        corpus: &LabeledCorpus<T>,
        params: &StackParams,
        seed: u64,
    ) -> Result<FittedPipeline<T>> {
        Ok(FittedPipeline::Stacked(fit_stack(corpus, params, seed)?))
    }

    pub fn predict_proba(&self, records: &[GasRecord<T>]) -> Result<Vec<ProbRow<T>>> {
        match self {
            FittedPipeline::Single(p) => p.predict_proba(records),
            FittedPipeline::Stacked(s) => s.predict_proba(records),
        }
    }

    /// Labels and probabilities in one pass.
    pub fn predict(&self, records: &[GasRecord<T>]) -> Result<(Vec<ModeLabel>, Vec<ProbRow<T>>)> {
        let probs = self.predict_proba(records)?;
        let labels = probs.iter().map(argmax_row).collect();
        Ok((labels, probs))
    }
}

impl<T: Scalar> Predictor<T> for FittedPipeline<T> {
    fn predict_labels(&self, records: &[GasRecord<T>]) -> Result<Vec<ModeLabel>> {
        Ok(self.predict(records)?.0)
    }
}
