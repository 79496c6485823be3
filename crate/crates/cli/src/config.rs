//! Run configuration with the precedence flags > config file > defaults.
//!
//! The config file is flat `key = value` text; blank lines and lines
//! starting with `#` are ignored.

use std::path::Path;

use dga_core::learners::{ForestParams, GbtParams, LogRegParams, MlpParams, TreeParams};
use dga_core::stacking::StackParams;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub test_fraction: f64,
    pub folds: usize,
    pub threshold: f64,
    pub logreg: LogRegParams,
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub gbt: GbtParams,
    pub mlp: MlpParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            test_fraction: 0.2,
            folds: 5,
            threshold: 0.9,
            logreg: LogRegParams::default(),
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            gbt: GbtParams::default(),
            mlp: MlpParams::default(),
        }
    }
}

const KEYS: &[&str] = &[
    "seed",
    "test_fraction",
    "folds",
    "threshold",
    "logreg_lr",
    "logreg_l2",
    "logreg_epochs",
    "tree_max_depth",
    "tree_min_leaf",
    "forest_trees",
    "gbt_rounds",
    "gbt_lr",
    "gbt_depth",
    "gbt_lambda",
    "mlp_hidden",
    "mlp_lr",
    "mlp_momentum",
    "mlp_epochs",
    "mlp_batch",
];

impl RunConfig {
    /// Applies a config file on top of the current values.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::input(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            self.set(key.trim(), value.trim()).map_err(|msg| {
                CliError::input(format!("{}:{}: {msg}", path.display(), lineno + 1))
            })?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("invalid value {value:?} for key {key}"))
        }
        match key {
            "seed" => self.seed = parse(key, value)?,
            "test_fraction" => self.test_fraction = parse(key, value)?,
            "folds" => self.folds = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "logreg_lr" => self.logreg.lr = parse(key, value)?,
            "logreg_l2" => self.logreg.l2 = parse(key, value)?,
            "logreg_epochs" => self.logreg.epochs = parse(key, value)?,
            "tree_max_depth" => self.tree.max_depth = parse(key, value)?,
            "tree_min_leaf" => self.tree.min_leaf = parse(key, value)?,
            "forest_trees" => self.forest.n_trees = parse(key, value)?,
            "gbt_rounds" => self.gbt.rounds = parse(key, value)?,
            "gbt_lr" => self.gbt.lr = parse(key, value)?,
            "gbt_depth" => self.gbt.depth = parse(key, value)?,
            "gbt_lambda" => self.gbt.lambda = parse(key, value)?,
            "mlp_hidden" => self.mlp.hidden = parse(key, value)?,
            "mlp_lr" => self.mlp.lr = parse(key, value)?,
            "mlp_momentum" => self.mlp.momentum = parse(key, value)?,
            "mlp_epochs" => self.mlp.epochs = parse(key, value)?,
            "mlp_batch" => self.mlp.batch = parse(key, value)?,
            _ => {
                return Err(format!(
                    "unknown config key {key:?}; valid keys: {}",
                    KEYS.join(", ")
                ))
            }
        }
        Ok(())
    }

    /// Stacking parameters implied by this configuration. The meta-model
    /// keeps its fixed defaults (rounds 50, depth 2, lr 0.1).
    pub fn stack_params(&self) -> StackParams {
        StackParams {
            k: self.folds,
            threshold: self.threshold,
            gbt: self.gbt.clone(),
            forest: self.forest.clone(),
            mlp: self.mlp.clone(),
            ..StackParams::default()
        }
    }
}
