//! Fault diagnosis for power transformers from dissolved-gas time series.
//!
//! The pipeline mirrors a dissolved-gas monitoring workflow: 4-channel
//! concentration series (H2, CO, C2H4, C2H2) are aggregated into statistical
//! features, pruned by Pearson correlation, standardized with train
//! statistics, and classified into one of four operating modes by five
//! learner families or by a stacked ensemble with out-of-fold meta-features
//! and a gradient-boosting meta-model.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the width. Every fit is deterministic for a
//! fixed seed.

pub mod corpus;
pub mod features;
pub mod learners;
pub mod metrics;
pub mod pipeline;
pub mod stacking;

mod error;
mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type GasRecord64 = corpus::GasRecord<f64>;
pub type LabeledCorpus64 = corpus::LabeledCorpus<f64>;
pub type FeatureMatrix64 = features::FeatureMatrix<f64>;
pub type FittedPreprocessor64 = features::FittedPreprocessor<f64>;
pub type FittedLearner64 = learners::FittedLearner<f64>;
pub type StackedEnsemble64 = stacking::StackedEnsemble<f64>;
pub type FittedPipeline64 = pipeline::FittedPipeline<f64>;

pub type GasRecord32 = corpus::GasRecord<f32>;
pub type LabeledCorpus32 = corpus::LabeledCorpus<f32>;
pub type FeatureMatrix32 = features::FeatureMatrix<f32>;
pub type FittedPipeline32 = pipeline::FittedPipeline<f32>;
