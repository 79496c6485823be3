//! Data model, on-disk corpus format, stratified splitting and a seeded
//! synthetic-corpus generator.
//!
//! A corpus on disk is a directory containing `labels.csv` (header
//! `id,label`, label = integer mode code 0..=3) and `data/<id>.csv` files
//! (header `H2,CO,C2H4,C2H2`, one non-negative concentration per channel per
//! row). All records in one corpus share the same series length.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{mix_seed, seeded, standard_normal};
use crate::scalar::Scalar;

/// Fixed channel order of every gas series.
pub const GAS_NAMES: [&str; 4] = ["H2", "CO", "C2H4", "C2H2"];

/// Number of gas channels per record.
pub const N_CHANNELS: usize = 4;

/// Operating mode assigned to a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ModeLabel {
    Normal = 0,
    PartialDischarge = 1,
    LowEnergyDischarge = 2,
    LowTempOverheating = 3,
}

impl ModeLabel {
    pub const COUNT: usize = 4;

    pub const ALL: [ModeLabel; 4] = [
        ModeLabel::Normal,
        ModeLabel::PartialDischarge,
        ModeLabel::LowEnergyDischarge,
        ModeLabel::LowTempOverheating,
    ];

    /// Integer code, stable across serialization.
    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<ModeLabel> {
        ModeLabel::ALL.get(code).copied()
    }

    /// Human-readable mode name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            ModeLabel::Normal => "Normal mode",
            ModeLabel::PartialDischarge => "Partial discharge",
            ModeLabel::LowEnergyDischarge => "Low energy discharge",
            ModeLabel::LowTempOverheating => "Low-temperature overheating",
        }
    }
}

impl From<ModeLabel> for u8 {
    fn from(m: ModeLabel) -> u8 {
        m as u8
    }
}

impl TryFrom<u8> for ModeLabel {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<ModeLabel, String> {
        ModeLabel::from_code(v as usize).ok_or_else(|| format!("invalid mode code {v}"))
    }
}

/// One observation window: four gas-concentration series of equal length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasRecord<T> {
    id: String,
    channels: [Vec<T>; 4],
}

impl<T: Scalar> GasRecord<T> {
    /// Builds a record, validating that all channels have equal length and
    /// every value is finite and non-negative.
    pub fn new(id: impl Into<String>, channels: [Vec<T>; 4]) -> Result<Self> {
        let id = id.into();
        let len = channels[0].len();
        for (c, series) in channels.iter().enumerate() {
            if series.len() != len {
                return Err(Error::SeriesLengthMismatch {
                    file: format!("{id} ({})", GAS_NAMES[c]),
                    expected: len,
                    found: series.len(),
                });
            }
            for (t, &v) in series.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::BadValue {
                        file: id.clone(),
                        row: t + 1,
                        column: GAS_NAMES[c].to_string(),
                        value: format!("{v}"),
                        reason: "non-finite",
                    });
                }
                if v < T::zero() {
                    return Err(Error::BadValue {
                        file: id.clone(),
                        row: t + 1,
                        column: GAS_NAMES[c].to_string(),
                        value: format!("{v}"),
                        reason: "negative",
                    });
                }
            }
        }
        Ok(GasRecord { id, channels })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Series length (number of time points).
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, index: usize) -> &[T] {
        &self.channels[index]
    }
}

/// Records plus their mode labels; records are kept sorted by id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledCorpus<T> {
    records: Vec<GasRecord<T>>,
    labels: BTreeMap<String, ModeLabel>,
}

impl<T: Scalar> LabeledCorpus<T> {
    /// Assembles a corpus, enforcing unique ids, exact label cover and a
    /// shared series length.
    pub fn new(mut records: Vec<GasRecord<T>>, labels: BTreeMap<String, ModeLabel>) -> Result<Self> {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in records.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateId(pair[0].id.clone()));
            }
        }
        for rec in &records {
            if !labels.contains_key(&rec.id) {
                return Err(Error::MissingLabel(rec.id.clone()));
            }
        }
        if labels.len() != records.len() {
            let known: std::collections::BTreeSet<&str> =
                records.iter().map(|r| r.id.as_str()).collect();
            let orphan = labels
                .keys()
                .find(|id| !known.contains(id.as_str()))
                .expect("label count exceeds record count");
            return Err(Error::OrphanLabel(orphan.clone()));
        }
        if let Some(first) = records.first() {
            let len = first.len();
            for rec in &records[1..] {
                if rec.len() != len {
                    return Err(Error::SeriesLengthMismatch {
                        file: rec.id.clone(),
                        expected: len,
                        found: rec.len(),
                    });
                }
            }
        }
        Ok(LabeledCorpus { records, labels })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in lexicographic id order.
    pub fn records(&self) -> &[GasRecord<T>] {
        &self.records
    }

    pub fn label_of(&self, id: &str) -> Option<ModeLabel> {
        self.labels.get(id).copied()
    }

    /// Labels aligned with [`records`](Self::records) order.
    pub fn labels_in_order(&self) -> Vec<ModeLabel> {
        self.records.iter().map(|r| self.labels[&r.id]).collect()
    }

    /// Shared series length, or `None` for an empty corpus.
    pub fn series_len(&self) -> Option<usize> {
        self.records.first().map(|r| r.len())
    }

    /// Number of records per mode, in mode order.
    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for label in self.labels.values() {
            counts[label.code()] += 1;
        }
        counts
    }

    /// Sub-corpus from record indices (indices refer to record order).
    pub fn subset(&self, indices: &[usize]) -> LabeledCorpus<T> {
        let mut records = Vec::with_capacity(indices.len());
        let mut labels = BTreeMap::new();
        for &i in indices {
            let rec = &self.records[i];
            labels.insert(rec.id.clone(), self.labels[&rec.id]);
            records.push(rec.clone());
        }
        records.sort_by(|a, b| a.id.cmp(&b.id));
        LabeledCorpus { records, labels }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads one record file (`H2,CO,C2H4,C2H2` header plus numeric rows).
pub fn read_record_csv<T: Scalar>(path: &Path, id: impl Into<String>) -> Result<GasRecord<T>> {
    let file_label = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;

    let headers = reader.headers().map_err(|e| csv_err(path, e))?;
    let expected = GAS_NAMES.join(",");
    let found: Vec<&str> = headers.iter().collect();
    if found != GAS_NAMES {
        return Err(Error::BadHeader {
            file: file_label,
            expected,
            found: found.join(","),
        });
    }

    let mut channels: [Vec<T>; 4] = Default::default();
    for (row_idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_err(path, e))?;
        if row.len() != N_CHANNELS {
            return Err(Error::BadHeader {
                file: file_label,
                expected: format!("{N_CHANNELS} columns"),
                found: format!("{} columns at row {}", row.len(), row_idx + 1),
            });
        }
        for (col, cell) in row.iter().enumerate() {
            let bad = |reason| Error::BadValue {
                file: file_label.clone(),
                row: row_idx + 1,
                column: GAS_NAMES[col].to_string(),
                value: cell.to_string(),
                reason,
            };
            let v: T = cell.parse().map_err(|_| bad("non-numeric"))?;
            if !v.is_finite() {
                return Err(bad("non-finite"));
            }
            if v < T::zero() {
                return Err(bad("negative"));
            }
            channels[col].push(v);
        }
    }
    GasRecord::new(id, channels)
}

/// Reads all record files from a directory of per-record CSVs, without
/// requiring labels. Record order is lexicographic by id.
pub fn read_records_dir<T: Scalar>(dir: &Path) -> Result<Vec<GasRecord<T>>> {
    let mut paths: Vec<(String, std::path::PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            paths.push((id, path));
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|(id, path)| read_record_csv(&path, id))
        .collect()
}

/// Loads a corpus directory (`labels.csv` + `data/*.csv`).
pub fn load_corpus<T: Scalar>(root: &Path) -> Result<LabeledCorpus<T>> {
    let labels_path = root.join("labels.csv");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(&labels_path)
        .map_err(|e| csv_err(&labels_path, e))?;

    let headers = reader.headers().map_err(|e| csv_err(&labels_path, e))?;
    let found: Vec<&str> = headers.iter().collect();
    if found != ["id", "label"] {
        return Err(Error::BadHeader {
            file: labels_path.display().to_string(),
            expected: "id,label".to_string(),
            found: found.join(","),
        });
    }

    let mut labels: BTreeMap<String, ModeLabel> = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(&labels_path, e))?;
        let id = row.get(0).unwrap_or_default().to_string();
        let code_str = row.get(1).unwrap_or_default();
        let label = code_str
            .parse::<usize>()
            .ok()
            .and_then(ModeLabel::from_code)
            .ok_or_else(|| Error::InvalidLabelCode {
                id: id.clone(),
                code: code_str.to_string(),
            })?;
        if labels.insert(id.clone(), label).is_some() {
            return Err(Error::DuplicateId(id));
        }
    }

    let records = read_records_dir(&root.join("data"))?;
    LabeledCorpus::new(records, labels)
}

/// Writes a corpus directory; numbers are serialized in shortest round-trip
/// decimal form so that save/load round-trips are byte-identical.
pub fn save_corpus<T: Scalar>(corpus: &LabeledCorpus<T>, root: &Path) -> Result<()> {
    let data_dir = root.join("data");
    fs::create_dir_all(&data_dir).map_err(|e| io_err(&data_dir, e))?;

    let mut labels_out = String::from("id,label\n");
    for rec in corpus.records() {
        let label = corpus.label_of(rec.id()).expect("corpus invariant");
        labels_out.push_str(&format!("{},{}\n", rec.id(), label.code()));
    }
    let labels_path = root.join("labels.csv");
    fs::write(&labels_path, labels_out).map_err(|e| io_err(&labels_path, e))?;

    for rec in corpus.records() {
        let mut out = String::from("H2,CO,C2H4,C2H2\n");
        for t in 0..rec.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                rec.channel(0)[t],
                rec.channel(1)[t],
                rec.channel(2)[t],
                rec.channel(3)[t]
            ));
        }
        let path = data_dir.join(format!("{}.csv", rec.id()));
        fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

/// Splits a corpus into train and test, per class: `round(fraction * n)`
/// records (at least 1) go to test, chosen by a seeded shuffle.
pub fn stratified_split<T: Scalar>(
    corpus: &LabeledCorpus<T>,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus<T>, LabeledCorpus<T>)> {
    if !(test_fraction.is_finite() && 0.0 < test_fraction && test_fraction < 1.0) {
        return Err(Error::InvalidFraction(test_fraction));
    }
    let labels = corpus.labels_in_order();
    let mut rng = seeded(seed);
    let mut test_idx: Vec<usize> = Vec::new();
    let mut train_idx: Vec<usize> = Vec::new();
    for mode in ModeLabel::ALL {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == mode)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: mode.name().to_string(),
                count: members.len(),
                needed: 2,
            });
        }
        members.shuffle(&mut rng);
        let n_test = ((test_fraction * members.len() as f64).round() as usize).max(1);
        test_idx.extend_from_slice(&members[..n_test]);
        train_idx.extend_from_slice(&members[n_test..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((corpus.subset(&train_idx), corpus.subset(&test_idx)))
}

/// Per-channel generative recipe: AR(1) around a baseline plus an optional
/// additive effect. Effects act on the output only, not on the AR state.
struct ChannelRecipe {
    mu: f64,
    sigma: f64,
    /// (amplitude, probability per step)
    spikes: Option<(f64, f64)>,
    /// (offset, start probability per step, duration in steps)
    bursts: Option<(f64, f64, usize)>,
    /// additive drift per step
    drift: f64,
}

impl ChannelRecipe {
    fn plain(mu: f64, sigma: f64) -> Self {
        ChannelRecipe {
            mu,
            sigma,
            spikes: None,
            bursts: None,
            drift: 0.0,
        }
    }
}

const AR_PHI: f64 = 0.9;

/// Baselines mu = (20, 300, 15, 1), noise sigma = (2, 10, 2, 0.3) for the
/// normal mode; fault modes scale the affected channels and add their
/// characteristic effect.
fn mode_recipes(mode: ModeLabel) -> [ChannelRecipe; 4] {
    let normal = || {
        [
            ChannelRecipe::plain(20.0, 2.0),
            ChannelRecipe::plain(300.0, 10.0),
            ChannelRecipe::plain(15.0, 2.0),
            ChannelRecipe::plain(1.0, 0.3),
        ]
    };
    let mut recipes = normal();
    match mode {
        ModeLabel::Normal => {}
        ModeLabel::PartialDischarge => {
            // H2 x6 with Poisson-timed spikes
            recipes[0] = ChannelRecipe {
                mu: 120.0,
                sigma: 12.0,
                spikes: Some((50.0, 0.02)),
                bursts: None,
                drift: 0.0,
            };
        }
        ModeLabel::LowEnergyDischarge => {
            // H2 x3 and C2H2 x20, both with burst segments
            recipes[0] = ChannelRecipe {
                mu: 60.0,
                sigma: 6.0,
                spikes: None,
                bursts: Some((45.0, 0.01, 25)),
                drift: 0.0,
            };
            recipes[3] = ChannelRecipe {
                mu: 20.0,
                sigma: 6.0,
                spikes: None,
                bursts: Some((15.0, 0.01, 25)),
                drift: 0.0,
            };
        }
        ModeLabel::LowTempOverheating => {
            // CO x2 and C2H4 x8 with linear upward drift (+0.05*mu per 100 steps)
            recipes[1] = ChannelRecipe {
                mu: 600.0,
                sigma: 20.0,
                spikes: None,
                bursts: None,
                drift: 600.0 * 0.05 / 100.0,
            };
            recipes[2] = ChannelRecipe {
                mu: 120.0,
                sigma: 16.0,
                spikes: None,
                bursts: None,
                drift: 120.0 * 0.05 / 100.0,
            };
        }
    }
    recipes
}

fn gen_channel<T: Scalar>(
    recipe: &ChannelRecipe,
    length: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<T> {
    let mut out = Vec::with_capacity(length);
    let mut state = recipe.mu;
    let mut burst_left = 0usize;
    for t in 0..length {
        let eps = recipe.sigma * standard_normal(rng);
        state = if t == 0 {
            recipe.mu + eps
        } else {
            recipe.mu + AR_PHI * (state - recipe.mu) + eps
        };
        let mut value = state + recipe.drift * t as f64;
        if let Some((amp, rate)) = recipe.spikes {
            if rng.gen::<f64>() < rate {
                value += amp;
            }
        }
        if let Some((offset, start_rate, duration)) = recipe.bursts {
            if burst_left == 0 && rng.gen::<f64>() < start_rate {
                burst_left = duration;
            }
            if burst_left > 0 {
                value += offset;
                burst_left -= 1;
            }
        }
        out.push(T::from_f64(value.max(0.0)).expect("synthetic value fits scalar"));
    }
    out
}

/// Generates `4 * per_class` labeled records with statistically separable
/// classes. Deterministic for a fixed seed.
pub fn synthesize_corpus<T: Scalar>(
    per_class: usize,
    length: usize,
    seed: u64,
) -> Result<LabeledCorpus<T>> {
    if per_class < 1 {
        return Err(Error::InvalidParameter(format!(
            "per_class must be at least 1, got {per_class}"
        )));
    }
    if length < 16 {
        return Err(Error::InvalidParameter(format!(
            "length must be at least 16, got {length}"
        )));
    }
    let prefixes = ["normal", "pd", "led", "lto"];
    let mut records = Vec::with_capacity(4 * per_class);
    let mut labels = BTreeMap::new();
    for mode in ModeLabel::ALL {
        let recipes = mode_recipes(mode);
        for i in 0..per_class {
            let id = format!("{}_{:04}", prefixes[mode.code()], i);
            // Per-record stream: content does not depend on per_class.
            let mut rng = seeded(mix_seed(seed, (mode.code() * 1_000_003 + i) as u64));
            let channels: [Vec<T>; 4] = [
                gen_channel(&recipes[0], length, &mut rng),
                gen_channel(&recipes[1], length, &mut rng),
                gen_channel(&recipes[2], length, &mut rng),
                gen_channel(&recipes[3], length, &mut rng),
            ];
            labels.insert(id.clone(), mode);
            records.push(GasRecord::new(id, channels)?);
        }
    }
    LabeledCorpus::new(records, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn toy_corpus() -> LabeledCorpus<f64> {
        synthesize_corpus(3, 16, 7).unwrap()
    }

    #[test]
    fn mode_label_round_trips_through_codes() {
        for mode in ModeLabel::ALL {
            assert_eq!(ModeLabel::from_code(mode.code()), Some(mode));
        }
        assert_eq!(ModeLabel::from_code(4), None);
    }

    #[test]
    fn record_rejects_negative_and_non_finite() {
        let bad = GasRecord::new(
            "r",
            [vec![1.0, -1.5], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]],
        );
        match bad {
            Err(Error::BadValue { row, column, reason, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "H2");
                assert_eq!(reason, "negative");
            }
            other => panic!("expected BadValue, got {other:?}"),
        }
        let nan = GasRecord::new(
            "r",
            [vec![f64::NAN, 1.0], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]],
        );
        assert!(matches!(nan, Err(Error::BadValue { reason: "non-finite", .. })));
    }

    #[test]
    fn corpus_requires_exact_label_cover() {
        let rec = |id: &str| {
            GasRecord::<f64>::new(id, [vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]])
                .unwrap()
        };
        let mut labels = BTreeMap::new();
        labels.insert("a".to_string(), ModeLabel::Normal);
        let err = LabeledCorpus::new(vec![rec("a"), rec("b")], labels.clone());
        assert!(matches!(err, Err(Error::MissingLabel(id)) if id == "b"));

        labels.insert("ghost".to_string(), ModeLabel::Normal);
        let err = LabeledCorpus::new(vec![rec("a")], labels);
        assert!(matches!(err, Err(Error::OrphanLabel(id)) if id == "ghost"));
    }

    #[test]
    fn load_save_round_trip_is_byte_identical() {
        let dir = tempdir().unwrap();
        let corpus = toy_corpus();
        save_corpus(&corpus, dir.path()).unwrap();
        let loaded: LabeledCorpus<f64> = load_corpus(dir.path()).unwrap();
        assert_eq!(loaded, corpus);

        let dir2 = tempdir().unwrap();
        save_corpus(&loaded, dir2.path()).unwrap();
        let a = std::fs::read(dir.path().join("data/normal_0000.csv")).unwrap();
        let b = std::fs::read(dir2.path().join("data/normal_0000.csv")).unwrap();
        assert_eq!(a, b);
        let a = std::fs::read(dir.path().join("labels.csv")).unwrap();
        let b = std::fs::read(dir2.path().join("labels.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn load_reports_length_mismatch_with_file_name() {
        let dir = tempdir().unwrap();
        let corpus = toy_corpus();
        save_corpus(&corpus, dir.path()).unwrap();
        // truncate one record to 15 rows (header + 15)
        let victim = dir.path().join("data/pd_0001.csv");
        let text = std::fs::read_to_string(&victim).unwrap();
        let truncated: Vec<&str> = text.lines().take(16).collect();
        std::fs::write(&victim, truncated.join("\n") + "\n").unwrap();
        let err = load_corpus::<f64>(dir.path()).unwrap_err();
        match err {
            Error::SeriesLengthMismatch { file, expected, found } => {
                assert!(file.contains("pd_0001"), "file was {file}");
                assert_eq!(expected, 16);
                assert_eq!(found, 15);
            }
            other => panic!("expected SeriesLengthMismatch, got {other:?}"),
        }
    }

    #[test]
    fn load_reports_negative_value_with_row_and_column() {
        let dir = tempdir().unwrap();
        save_corpus(&toy_corpus(), dir.path()).unwrap();
        let victim = dir.path().join("data/led_0000.csv");
        let text = std::fs::read_to_string(&victim).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let mut cells: Vec<String> = lines[3].split(',').map(str::to_string).collect();
        cells[0] = "-1.5".to_string();
        lines[3] = cells.join(",");
        std::fs::write(&victim, lines.join("\n") + "\n").unwrap();
        let err = load_corpus::<f64>(dir.path()).unwrap_err();
        match err {
            Error::BadValue { row, column, reason, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "H2");
                assert_eq!(reason, "negative");
            }
            other => panic!("expected BadValue, got {other:?}"),
        }
    }

    #[test]
    fn load_requires_label_for_every_data_file() {
        let dir = tempdir().unwrap();
        save_corpus(&toy_corpus(), dir.path()).unwrap();
        let labels = dir.path().join("labels.csv");
        let text = std::fs::read_to_string(&labels).unwrap();
        let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("lto_0002")).collect();
        std::fs::write(&labels, kept.join("\n") + "\n").unwrap();
        let err = load_corpus::<f64>(dir.path()).unwrap_err();
        assert!(matches!(err, Error::MissingLabel(id) if id == "lto_0002"));
    }

    #[test]
    fn load_rejects_label_code_out_of_range() {
        let dir = tempdir().unwrap();
        save_corpus(&toy_corpus(), dir.path()).unwrap();
        let labels = dir.path().join("labels.csv");
        let text = std::fs::read_to_string(&labels).unwrap();
        let patched = text.replace("normal_0000,0", "normal_0000,4");
        std::fs::write(&labels, patched).unwrap();
        let err = load_corpus::<f64>(dir.path()).unwrap_err();
        assert!(matches!(err, Error::InvalidLabelCode { code, .. } if code == "4"));
    }

    #[test]
    fn split_takes_rounded_fraction_per_class() {
        let corpus: LabeledCorpus<f64> = synthesize_corpus(25, 16, 1).unwrap();
        let (train, test) = stratified_split(&corpus, 0.2, 42).unwrap();
        assert_eq!(test.class_counts(), [5, 5, 5, 5]);
        assert_eq!(train.class_counts(), [20, 20, 20, 20]);
        assert_eq!(train.len() + test.len(), corpus.len());
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let corpus: LabeledCorpus<f64> = synthesize_corpus(10, 16, 3).unwrap();
        let (tr1, te1) = stratified_split(&corpus, 0.2, 42).unwrap();
        let (tr2, te2) = stratified_split(&corpus, 0.2, 42).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        for rec in te1.records() {
            assert!(tr1.label_of(rec.id()).is_none());
        }
    }

    #[test]
    fn split_of_3000_records_yields_600_test_rows() {
        // 4-class distribution summing to 3000; round(0.2 * n) per class
        // gives 400 + 80 + 70 + 50 = 600.
        let sizes = [2000usize, 400, 350, 250];
        let mut records = Vec::new();
        let mut labels = BTreeMap::new();
        for (mode, &n) in ModeLabel::ALL.iter().zip(&sizes) {
            for i in 0..n {
                let id = format!("c{}_{:05}", mode.code(), i);
                let base = 1.0 + i as f64 * 1e-3;
                records.push(
                    GasRecord::<f64>::new(
                        id.clone(),
                        [
                            vec![base, base + 1.0],
                            vec![base, base],
                            vec![base, base],
                            vec![base, base],
                        ],
                    )
                    .unwrap(),
                );
                labels.insert(id, *mode);
            }
        }
        let corpus = LabeledCorpus::new(records, labels).unwrap();
        let (train, test) = stratified_split(&corpus, 0.2, 42).unwrap();
        assert_eq!(test.len(), 600);
        assert_eq!(train.len(), 2400);
    }

    #[test]
    fn split_rejects_bad_fraction_and_tiny_class() {
        let corpus = toy_corpus();
        assert!(matches!(
            stratified_split(&corpus, 0.0, 1),
            Err(Error::InvalidFraction(_))
        ));
        assert!(matches!(
            stratified_split(&corpus, 1.0, 1),
            Err(Error::InvalidFraction(_))
        ));

        let one_of_a_kind = corpus.subset(&[0, 1, 2, 3, 4, 5, 6]); // 3/3/1/0 per class in id order
        let err = stratified_split(&one_of_a_kind, 0.2, 1);
        assert!(matches!(err, Err(Error::ClassTooSmall { .. })));
    }

    #[test]
    fn synthesize_shapes_and_determinism() {
        let a: LabeledCorpus<f64> = synthesize_corpus(5, 420, 1).unwrap();
        assert_eq!(a.len(), 20);
        assert_eq!(a.class_counts(), [5, 5, 5, 5]);
        assert_eq!(a.series_len(), Some(420));

        let b: LabeledCorpus<f64> = synthesize_corpus(5, 420, 1).unwrap();
        assert_eq!(a, b);

        let c: LabeledCorpus<f64> = synthesize_corpus(5, 420, 2).unwrap();
        assert_ne!(a, c);

        let tiny: LabeledCorpus<f64> = synthesize_corpus(1, 16, 9).unwrap();
        assert_eq!(tiny.len(), 4);
        assert_eq!(tiny.series_len(), Some(16));
    }

    #[test]
    fn synthesize_rejects_bad_parameters() {
        assert!(synthesize_corpus::<f64>(0, 420, 1).is_err());
        assert!(synthesize_corpus::<f64>(1, 15, 1).is_err());
    }

    #[test]
    fn partial_discharge_lifts_h2_mean_above_normal() {
        let corpus: LabeledCorpus<f64> = synthesize_corpus(50, 420, 1).unwrap();
        let mean_h2 = |mode: ModeLabel| {
            let mut total = 0.0;
            let mut n = 0usize;
            for rec in corpus.records() {
                if corpus.label_of(rec.id()) == Some(mode) {
                    total += rec.channel(0).iter().sum::<f64>() / rec.len() as f64;
                    n += 1;
                }
            }
            total / n as f64
        };
        assert!(mean_h2(ModeLabel::PartialDischarge) > mean_h2(ModeLabel::Normal));
    }

    #[test]
    fn all_synthetic_values_are_non_negative() {
        let corpus: LabeledCorpus<f64> = synthesize_corpus(2, 64, 5).unwrap();
        for rec in corpus.records() {
            for c in 0..N_CHANNELS {
                assert!(rec.channel(c).iter().all(|&v| v >= 0.0 && v.is_finite()));
            }
        }
    }
}
