//! End-to-end tests of the `dga` binary: happy paths, exit codes, output
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

fn dga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dga"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout(out),
        stderr(out)
    );
}

fn synth(dir: &Path, per_class: usize, length: usize, seed: u64) {
    let out = dga(&[
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--per-class",
        &per_class.to_string(),
        "--length",
        &length.to_string(),
        "--seed",
        &seed.to_string(),
    ]);
    assert_code(&out, 0);
}

/// Small hyperparameters so the CLI tests stay fast.
fn write_quick_config(path: &Path) {
    std::fs::write(
        path,
        "gbt_rounds = 15\nforest_trees = 20\nmlp_hidden = 8\nmlp_epochs = 30\n",
    )
    .unwrap();
}

#[test]
fn synth_round_trips_and_respects_force() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 3, 32, 1);
    assert!(corpus_dir.join("labels.csv").is_file());
    assert!(corpus_dir.join("data/normal_0000.csv").is_file());

    // two runs with identical flags produce byte-identical corpora
    let corpus_dir2 = dir.path().join("corpus2");
    synth(&corpus_dir2, 3, 32, 1);
    let a = std::fs::read(corpus_dir.join("data/pd_0002.csv")).unwrap();
    let b = std::fs::read(corpus_dir2.join("data/pd_0002.csv")).unwrap();
    assert_eq!(a, b);

    // refusing to overwrite without --force
    let out = dga(&[
        "synth",
        "--out",
        corpus_dir.to_str().unwrap(),
        "--per-class",
        "3",
        "--length",
        "32",
    ]);
    assert_code(&out, 2);
    assert!(stderr(&out).contains("--force"));

    let out = dga(&[
        "synth",
        "--out",
        corpus_dir.to_str().unwrap(),
        "--per-class",
        "2",
        "--length",
        "32",
        "--force",
    ]);
    assert_code(&out, 0);
}

#[test]
fn featurize_writes_canonical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 5, 32, 2);
    let out_csv = dir.path().join("features.csv");
    let out = dga(&[
        "featurize",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21); // header + 20 records
    let header = lines[0];
    assert!(header.starts_with("id,H2_mean,H2_median,H2_min,H2_max,H2_std"));
    assert!(header.ends_with("C2H2_skewness,C2H2_kurtosis,C2H2_rms"));
    assert_eq!(header.split(',').count(), 33);
}

#[test]
fn featurize_zeroes_shape_stats_of_constant_channels() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    std::fs::create_dir_all(corpus_dir.join("data")).unwrap();
    std::fs::write(corpus_dir.join("labels.csv"), "id,label\nflat,0\n").unwrap();
    let mut rows = String::from("H2,CO,C2H4,C2H2\n");
    for _ in 0..8 {
        rows.push_str("5,300,15,1\n");
    }
    std::fs::write(corpus_dir.join("data/flat.csv"), rows).unwrap();

    let out_csv = dir.path().join("features.csv");
    let out = dga(&[
        "featurize",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    for stat in ["std", "skewness", "kurtosis"] {
        for gas in ["H2", "CO", "C2H4", "C2H2"] {
            let col = header
                .iter()
                .position(|h| *h == format!("{gas}_{stat}"))
                .unwrap();
            assert_eq!(row[col], "0", "{gas}_{stat}");
        }
    }
}

#[test]
fn train_evaluate_predict_flow() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 15, 48, 3);
    let config = dir.path().join("quick.conf");
    write_quick_config(&config);
    let model = dir.path().join("model.json");

    let out = dga(&[
        "train",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "42",
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    assert!(text.contains("train records: 48"), "{text}");
    assert!(text.contains("test records: 12"), "{text}");
    assert!(text.contains("Weighted average"), "{text}");
    assert!(text.contains("model written:"), "{text}");
    assert!(model.is_file());

    // evaluate against the full corpus
    let metrics_out = dir.path().join("metrics.txt");
    let out = dga(&[
        "evaluate",
        "--model",
        model.to_str().unwrap(),
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--metrics-out",
        metrics_out.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains("predicted"));
    let metrics = std::fs::read_to_string(&metrics_out).unwrap();
    assert!(metrics.contains("weighted_f1 = "), "{metrics}");
    assert!(metrics.contains("support_3 = 15"), "{metrics}");

    // predict over the corpus directory
    let out = dga(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        corpus_dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,code,class,p0,p1,p2,p3");
    assert_eq!(lines.len(), 61); // header + 60 records
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first.len(), 7);
    let probs: Vec<f64> = first[3..].iter().map(|s| s.parse().unwrap()).collect();
    let sum: f64 = probs.iter().sum();
    assert!((sum - 1.0).abs() < 1e-9);

    // predict a single record file
    let single = corpus_dir.join("data/lto_0001.csv");
    let out = dga(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        single.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().starts_with("lto_0001,"), "{text}");
}

#[test]
fn train_is_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 10, 32, 5);
    let config = dir.path().join("quick.conf");
    write_quick_config(&config);

    let run = |name: &str| {
        let model = dir.path().join(name);
        let out = dga(&[
            "train",
            "--corpus",
            corpus_dir.to_str().unwrap(),
            "--model-out",
            model.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
        ]);
        assert_code(&out, 0);
        (std::fs::read(model).unwrap(), stdout(&out))
    };
    let (model_a, stdout_a) = run("a.json");
    let (model_b, stdout_b) = run("b.json");
    assert_eq!(model_a, model_b, "model files differ between identical runs");
    let normalize = |s: &str| s.replace("a.json", "M").replace("b.json", "M");
    assert_eq!(normalize(&stdout_a), normalize(&stdout_b));
}

#[test]
fn cv_prints_per_fold_scores_for_each_learner_name() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 10, 32, 7);
    let config = dir.path().join("quick.conf");
    write_quick_config(&config);

    let out = dga(&[
        "cv",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--learner",
        "forest",
        "--folds",
        "5",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    for i in 1..=5 {
        assert!(text.contains(&format!("fold {i}: ")), "{text}");
    }
    assert!(text.contains("mean: "), "{text}");
    assert!(text.contains("std: "), "{text}");

    let out = dga(&[
        "cv",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--learner",
        "bogus",
    ]);
    assert_code(&out, 2);
    assert!(stderr(&out).contains("valid names"), "{}", stderr(&out));
}

#[test]
fn exit_codes_follow_the_error_taxonomy() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 3, 32, 1);

    // class smaller than K: remove most of one class -> exit 3
    let labels = corpus_dir.join("labels.csv");
    let text = std::fs::read_to_string(&labels).unwrap();
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with("lto_0001") && !l.starts_with("lto_0002"))
        .collect();
    std::fs::write(&labels, kept.join("\n") + "\n").unwrap();
    std::fs::remove_file(corpus_dir.join("data/lto_0001.csv")).unwrap();
    std::fs::remove_file(corpus_dir.join("data/lto_0002.csv")).unwrap();

    let model = dir.path().join("model.json");
    let out = dga(&[
        "train",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
    ]);
    assert_code(&out, 3);

    // corrupt model file -> exit 2 naming the parse failure
    std::fs::write(&model, "{ not json").unwrap();
    let out = dga(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        corpus_dir.to_str().unwrap(),
    ]);
    assert_code(&out, 2);
    assert!(stderr(&out).contains("parse failed"), "{}", stderr(&out));

    // missing corpus -> exit 2
    let out = dga(&[
        "featurize",
        "--corpus",
        dir.path().join("nope").to_str().unwrap(),
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_code(&out, 2);

    // usage error -> exit 2
    let out = dga(&["train"]);
    assert_code(&out, 2);
}

#[test]
fn config_precedence_is_flags_over_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_a = dir.path().join("a");
    let corpus_b = dir.path().join("b");
    let corpus_c = dir.path().join("c");

    // config file seed beats the default...
    let config = dir.path().join("cfg.conf");
    std::fs::write(&config, "seed = 9\n").unwrap();
    let out = dga(&[
        "synth",
        "--out",
        corpus_a.to_str().unwrap(),
        "--per-class",
        "2",
        "--length",
        "16",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let out = dga(&[
        "synth",
        "--out",
        corpus_b.to_str().unwrap(),
        "--per-class",
        "2",
        "--length",
        "16",
        "--seed",
        "9",
    ]);
    assert_code(&out, 0);
    let a = std::fs::read(corpus_a.join("data/led_0000.csv")).unwrap();
    let b = std::fs::read(corpus_b.join("data/led_0000.csv")).unwrap();
    assert_eq!(a, b);

    // ...and an explicit flag beats the config file
    let out = dga(&[
        "synth",
        "--out",
        corpus_c.to_str().unwrap(),
        "--per-class",
        "2",
        "--length",
        "16",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "11",
    ]);
    assert_code(&out, 0);
    let c = std::fs::read(corpus_c.join("data/led_0000.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn predict_rejects_too_short_series_but_not_length_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    synth(&corpus_dir, 10, 32, 3);
    let config = dir.path().join("quick.conf");
    write_quick_config(&config);
    let model = dir.path().join("model.json");
    let out = dga(&[
        "train",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_code(&out, 0);

    // a record with a different series length is fine (aggregations are
    // length-agnostic)
    let longer = dir.path().join("longer.csv");
    let mut text = String::from("H2,CO,C2H4,C2H2\n");
    for t in 0..64 {
        text.push_str(&format!("{},300,15,1\n", 20 + (t % 3)));
    }
    std::fs::write(&longer, text).unwrap();
    let out = dga(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        longer.to_str().unwrap(),
    ]);
    assert_code(&out, 0);

    // a single-point series cannot be aggregated
    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "H2,CO,C2H4,C2H2\n20,300,15,1\n").unwrap();
    let out = dga(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        tiny.to_str().unwrap(),
    ]);
    assert_code(&out, 2);
}
