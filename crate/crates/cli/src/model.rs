//! Versioned model persistence.
//!
//! Models are stored as pretty-printed JSON: a self-describing key-value
//! tree holding the format tag, version, the run parameters and every
//! fitted array in shortest round-trip decimal. Loading checks the tag and
//! rejects unknown versions; round-trips reproduce predictions bit for bit.

use std::path::Path;

use dga_core::FittedPipeline64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_TAG: &str = "dga-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub created_by: String,
    pub seed: u64,
    pub folds: usize,
    pub test_fraction: f64,
    pub threshold: f64,
    pub pipeline: FittedPipeline64,
}

impl ModelFile {
    pub fn new(
        pipeline: FittedPipeline64,
        seed: u64,
        folds: usize,
        test_fraction: f64,
        threshold: f64,
    ) -> ModelFile {
        ModelFile {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            created_by: format!("dga {}", env!("CARGO_PKG_VERSION")),
            seed,
            folds,
            test_fraction,
            threshold,
            pipeline,
        }
    }
}

pub fn save_model(model: &ModelFile, path: &Path) -> Result<(), CliError> {
    let mut json = serde_json::to_string_pretty(model)
        .map_err(|e| CliError::input(format!("serializing model: {e}")))?;
    json.push('\n');
    std::fs::write(path, json).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: model parse failed: {e}", path.display())))?;
    if model.format != FORMAT_TAG {
        return Err(CliError::input(format!(
            "{}: not a {FORMAT_TAG} file (format tag {:?})",
            path.display(),
            model.format
        )));
    }
    if model.version != FORMAT_VERSION {
        return Err(CliError::input(format!(
            "{}: unsupported model version {} (this build reads version {FORMAT_VERSION})",
            path.display(),
            model.version
        )));
    }
    Ok(model)
}
