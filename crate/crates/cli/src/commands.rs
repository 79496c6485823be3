//! Implementations of the CLI subcommands.

use std::path::Path;

use dga_core::corpus::{
    load_corpus, read_record_csv, read_records_dir, save_corpus, stratified_split,
    synthesize_corpus, GasRecord, ModeLabel,
};
use dga_core::features::extract_matrix;
use dga_core::metrics::{cross_validate, ConfusionMatrix, MetricsReport};
use dga_core::pipeline::{FittedPipeline, SinglePipeline};
use dga_core::learners::LearnerConfig;
use dga_core::stacking::fit_stack;

use crate::config::RunConfig;
use crate::model::{load_model, save_model, ModelFile};
use crate::CliError;

pub fn cmd_synth(
    out: &Path,
    per_class: usize,
    length: usize,
    force: bool,
    config: &RunConfig,
) -> Result<(), CliError> {
    if out.exists() {
        let non_empty = std::fs::read_dir(out)
            .map_err(|e| CliError::input(format!("{}: {e}", out.display())))?
            .next()
            .is_some();
        if non_empty && !force {
            return Err(CliError::input(format!(
                "{} exists and is not empty; pass --force to overwrite",
                out.display()
            )));
        }
        if non_empty {
            // replace any previous corpus content
            let data = out.join("data");
            if data.is_dir() {
                std::fs::remove_dir_all(&data)
                    .map_err(|e| CliError::input(format!("{}: {e}", data.display())))?;
            }
        }
    }
    let corpus = synthesize_corpus::<f64>(per_class, length, config.seed)?;
    save_corpus(&corpus, out)?;
    println!(
        "wrote corpus: {} records, series length {}, seed {}",
        corpus.len(),
        length,
        config.seed
    );
    Ok(())
}

pub fn cmd_featurize(corpus_dir: &Path, out: &Path) -> Result<(), CliError> {
    let corpus = load_corpus::<f64>(corpus_dir)?;
    let matrix = extract_matrix(corpus.records())?;
    std::fs::write(out, matrix.to_csv_string())
        .map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;
    println!(
        "wrote features: {} rows x {} columns",
        matrix.n_rows(),
        matrix.n_cols()
    );
    Ok(())
}

fn print_evaluation(truth: &[ModeLabel], predicted: &[ModeLabel]) -> Result<MetricsReport, CliError> {
    let cm = ConfusionMatrix::from_labels(truth, predicted)?;
    let report = MetricsReport::from_confusion(&cm);
    println!("{report}");
    println!();
    println!("{cm}");
    Ok(report)
}

pub fn cmd_train(corpus_dir: &Path, model_out: &Path, config: &RunConfig) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let corpus = load_corpus::<f64>(corpus_dir)?;
    let (train, test) = stratified_split(&corpus, config.test_fraction, config.seed)?;
    println!("train records: {}", train.len());
    println!("test records: {}", test.len());

    let params = config.stack_params();
    let ensemble = fit_stack(&train, &params, config.seed)?;
    let (predicted, _) = ensemble.predict(test.records())?;
    print_evaluation(&test.labels_in_order(), &predicted)?;

    let model = ModelFile::new(
        FittedPipeline::Stacked(ensemble),
        config.seed,
        config.folds,
        config.test_fraction,
        config.threshold,
    );
    save_model(&model, model_out)?;
    println!("model written: {}", model_out.display());
    eprintln!("# elapsed_ms: {}", started.elapsed().as_millis());
    Ok(())
}

pub fn cmd_evaluate(
    model_path: &Path,
    corpus_dir: &Path,
    metrics_out: Option<&Path>,
) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let corpus = load_corpus::<f64>(corpus_dir)?;
    if corpus.is_empty() {
        return Err(CliError::input(format!(
            "{}: corpus is empty",
            corpus_dir.display()
        )));
    }
    let (predicted, _) = model.pipeline.predict(corpus.records())?;
    let report = print_evaluation(&corpus.labels_in_order(), &predicted)?;

    if let Some(path) = metrics_out {
        let mut out = String::new();
        out.push_str(&format!("total = {}\n", report.total));
        out.push_str(&format!("accuracy = {}\n", report.accuracy));
        for (c, m) in report.per_class.iter().enumerate() {
            out.push_str(&format!("precision_{c} = {}\n", m.precision));
            out.push_str(&format!("recall_{c} = {}\n", m.recall));
            out.push_str(&format!("f1_{c} = {}\n", m.f1));
            out.push_str(&format!("support_{c} = {}\n", m.support));
        }
        out.push_str(&format!("macro_precision = {}\n", report.macro_precision));
        out.push_str(&format!("macro_recall = {}\n", report.macro_recall));
        out.push_str(&format!("macro_f1 = {}\n", report.macro_f1));
        out.push_str(&format!("weighted_precision = {}\n", report.weighted_precision));
        out.push_str(&format!("weighted_recall = {}\n", report.weighted_recall));
        out.push_str(&format!("weighted_f1 = {}\n", report.weighted_f1));
        std::fs::write(path, out)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn load_prediction_records(input: &Path) -> Result<Vec<GasRecord<f64>>, CliError> {
    if input.is_file() {
        let id = input
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("record")
            .to_string();
        return Ok(vec![read_record_csv(input, id)?]);
    }
    let data = input.join("data");
    let dir = if data.is_dir() { data } else { input.to_path_buf() };
    let records = read_records_dir(&dir)?;
    if records.is_empty() {
        return Err(CliError::input(format!(
            "{}: no record files found",
            input.display()
        )));
    }
    Ok(records)
}

pub fn cmd_predict(model_path: &Path, input: &Path) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let records = load_prediction_records(input)?;
    let (labels, probs) = model.pipeline.predict(&records)?;
    println!("id,code,class,p0,p1,p2,p3");
    for ((rec, label), p) in records.iter().zip(&labels).zip(&probs) {
        println!(
            "{},{},{},{},{},{},{}",
            rec.id(),
            label.code(),
            label.name(),
            p[0],
            p[1],
            p[2],
            p[3]
        );
    }
    Ok(())
}

pub fn cmd_cv(
    corpus_dir: &Path,
    learner: &str,
    config: &RunConfig,
) -> Result<(), CliError> {
    let corpus = load_corpus::<f64>(corpus_dir)?;
    let k = config.folds;
    let result = if learner == "stack" {
        let params = config.stack_params();
        cross_validate(&corpus, k, config.seed, |train, seed| {
            fit_stack(train, &params, seed)
        })?
    } else {
        let mut learner_config =
            LearnerConfig::from_name(learner).ok_or_else(|| {
                CliError::input(format!(
                    "unknown learner {learner:?}; valid names: logreg, tree, forest, gbt, mlp, stack"
                ))
            })?;
        match &mut learner_config {
            LearnerConfig::LogReg(p) => *p = config.logreg.clone(),
            LearnerConfig::Tree(p) => *p = config.tree.clone(),
            LearnerConfig::Forest(p) => *p = config.forest.clone(),
            LearnerConfig::Gbt(p) => *p = config.gbt.clone(),
            LearnerConfig::Mlp(p) => *p = config.mlp.clone(),
        }
        let threshold = config.threshold;
        cross_validate(&corpus, k, config.seed, move |train, seed| {
            SinglePipeline::fit(train, &learner_config, threshold, seed)
        })?
    };

    println!("learner: {learner}");
    println!("folds: {k}");
    for (i, score) in result.fold_scores.iter().enumerate() {
        println!("fold {}: {:.4}", i + 1, score);
    }
    println!("mean: {:.4}", result.mean);
    println!("std: {:.4}", result.std);
    Ok(())
}
