//! Statistical feature extraction, correlation-based pruning and
//! train-statistics standardization.
//!
//! Each gas channel is aggregated into 8 statistics (population moments,
//! denominator N), giving 32 raw features per record in a fixed canonical
//! order: gas-major `[H2, CO, C2H4, C2H2]`, then stat-major.

use serde::{Deserialize, Serialize};

use crate::corpus::{GasRecord, GAS_NAMES, N_CHANNELS};
use crate::error::{Error, Result};
use crate::scalar::{count, lit, Scalar};

/// Fixed statistic order within each channel.
pub const STAT_NAMES: [&str; 8] = [
    "mean", "median", "min", "max", "std", "skewness", "kurtosis", "rms",
];

/// Number of raw features per record.
pub const N_RAW_FEATURES: usize = N_CHANNELS * STAT_NAMES.len();

/// The 32 canonical raw feature names, `<gas>_<stat>`.
pub fn canonical_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(N_RAW_FEATURES);
    for gas in GAS_NAMES {
        for stat in STAT_NAMES {
            names.push(format!("{gas}_{stat}"));
        }
    }
    names
}

/// The 8 aggregations of one channel, in [`STAT_NAMES`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelStats<T> {
    pub mean: T,
    pub median: T,
    pub min: T,
    pub max: T,
    /// Population standard deviation (denominator N).
    pub std: T,
    /// Population skewness, 0 when std is 0.
    pub skewness: T,
    /// Population excess kurtosis, 0 when std is 0.
    pub kurtosis: T,
    /// Root mean square of the raw values.
    pub rms: T,
}

impl<T: Scalar> ChannelStats<T> {
    pub fn to_array(self) -> [T; 8] {
        [
            self.mean,
            self.median,
            self.min,
            self.max,
            self.std,
            self.skewness,
            self.kurtosis,
            self.rms,
        ]
    }
}

/// Computes the 8 statistics of one series. Requires length >= 2 and finite
/// values.
pub fn channel_stats<T: Scalar>(series: &[T]) -> Result<ChannelStats<T>> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort(series.len()));
    }
    let n = count::<T>(series.len());
    let mut min = series[0];
    let mut max = series[0];
    let mut sum = T::zero();
    let mut sum_sq = T::zero();
    for &v in series {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / n;
    let rms = (sum_sq / n).sqrt();

    let mut sorted: Vec<T> = series.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / lit(2.0)
    };

    // Constant series: zero variance, higher moments defined as 0.
    if min == max {
        return Ok(ChannelStats {
            mean,
            median,
            min,
            max,
            std: T::zero(),
            skewness: T::zero(),
            kurtosis: T::zero(),
            rms,
        });
    }

    let mut m2 = T::zero();
    let mut m3 = T::zero();
    let mut m4 = T::zero();
    for &v in series {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 = m2 / n;
    m3 = m3 / n;
    m4 = m4 / n;
    let std = m2.sqrt();
    let (skewness, kurtosis) = if std > T::zero() {
        (m3 / (std * std * std), m4 / (m2 * m2) - lit(3.0))
    } else {
        (T::zero(), T::zero())
    };

    Ok(ChannelStats {
        mean,
        median,
        min,
        max,
        std,
        skewness,
        kurtosis,
        rms,
    })
}

/// One record's features in canonical name order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    names: Vec<String>,
    values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<T> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.values[i])
    }
}

/// Extracts the 32 canonical features of one record.
pub fn extract_features<T: Scalar>(record: &GasRecord<T>) -> Result<FeatureVector<T>> {
    let mut values = Vec::with_capacity(N_RAW_FEATURES);
    for c in 0..N_CHANNELS {
        values.extend_from_slice(&channel_stats(record.channel(c))?.to_array());
    }
    Ok(FeatureVector {
        names: canonical_feature_names(),
        values,
    })
}

/// Row-major matrix of named feature columns with row ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix<T> {
    ids: Vec<String>,
    names: Vec<String>,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(ids: Vec<String>, names: Vec<String>, data: Vec<T>) -> Result<Self> {
        if ids.len() * names.len() != data.len() {
            return Err(Error::InvalidParameter(format!(
                "matrix data length {} does not match {} rows x {} columns",
                data.len(),
                ids.len(),
                names.len()
            )));
        }
        Ok(FeatureMatrix { ids, names, data })
    }

    pub fn n_rows(&self) -> usize {
        self.ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[T] {
        let w = self.names.len();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.names.len() + col]
    }

    pub fn col_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn col_vec(&self, col: usize) -> Vec<T> {
        (0..self.n_rows()).map(|r| self.get(r, col)).collect()
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix<T> {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols());
        let mut ids = Vec::with_capacity(rows.len());
        for &r in rows {
            ids.push(self.ids[r].clone());
            data.extend_from_slice(self.row(r));
        }
        FeatureMatrix {
            ids,
            names: self.names.clone(),
            data,
        }
    }

    /// CSV rendering: header `id,<names...>`, shortest round-trip decimals.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("id");
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, id) in self.ids.iter().enumerate() {
            out.push_str(id);
            for &v in self.row(i) {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Extracts features for every record; rows follow record order.
pub fn extract_matrix<T: Scalar>(records: &[GasRecord<T>]) -> Result<FeatureMatrix<T>> {
    let names = canonical_feature_names();
    let mut data = Vec::with_capacity(records.len() * N_RAW_FEATURES);
    let mut ids = Vec::with_capacity(records.len());
    for rec in records {
        for c in 0..N_CHANNELS {
            data.extend_from_slice(&channel_stats(rec.channel(c))?.to_array());
        }
        ids.push(rec.id().to_string());
    }
    FeatureMatrix::new(ids, names, data)
}

fn all_equal<T: Scalar>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Pearson correlation coefficient; 0 when either vector has zero variance.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::SeriesTooShort(x.len()));
    }
    if all_equal(x) || all_equal(y) {
        return Ok(T::zero());
    }
    let n = count::<T>(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Ok(T::zero());
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.min(T::one()).max(-T::one()))
}

/// Feature selection and standardization statistics fitted on a train set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedPreprocessor<T> {
    kept_names: Vec<String>,
    means: Vec<T>,
    /// Train standard deviations; zeros are stored as 1 so application never
    /// divides by zero.
    stds: Vec<T>,
    threshold: f64,
}

impl<T: Scalar> FittedPreprocessor<T> {
    pub fn kept_names(&self) -> &[String] {
        &self.kept_names
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn mean(&self, i: usize) -> T {
        self.means[i]
    }

    pub fn std(&self, i: usize) -> T {
        self.stds[i]
    }

    /// Projects a matrix onto the kept columns and z-scores each with the
    /// stored train statistics.
    pub fn apply(&self, m: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        let mut cols = Vec::with_capacity(self.kept_names.len());
        for name in &self.kept_names {
            cols.push(
                m.col_index(name)
                    .ok_or_else(|| Error::MissingColumn(name.clone()))?,
            );
        }
        let mut data = Vec::with_capacity(m.n_rows() * cols.len());
        for r in 0..m.n_rows() {
            for (k, &c) in cols.iter().enumerate() {
                data.push((m.get(r, c) - self.means[k]) / self.stds[k]);
            }
        }
        FeatureMatrix::new(m.ids().to_vec(), self.kept_names.clone(), data)
    }
}

/// Drops zero-variance columns, then greedily keeps a column iff its
/// absolute Pearson correlation with every already-kept column stays at or
/// below `threshold`; records train mean/std for the kept columns.
pub fn fit_preprocessor<T: Scalar>(
    train: &FeatureMatrix<T>,
    threshold: f64,
) -> Result<FittedPreprocessor<T>> {
    if train.n_rows() < 2 {
        return Err(Error::TooFewRows {
            got: train.n_rows(),
            needed: 2,
        });
    }
    if !(threshold.is_finite() && 0.0 < threshold && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "correlation threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let thr = lit::<T>(threshold);
    let mut kept: Vec<usize> = Vec::new();
    let mut kept_cols: Vec<Vec<T>> = Vec::new();
    'cols: for j in 0..train.n_cols() {
        let col = train.col_vec(j);
        if all_equal(&col) {
            continue; // zero variance
        }
        for prev in &kept_cols {
            if pearson(&col, prev)?.abs() > thr {
                continue 'cols;
            }
        }
        kept.push(j);
        kept_cols.push(col);
    }

    let n = count::<T>(train.n_rows());
    let mut means = Vec::with_capacity(kept.len());
    let mut stds = Vec::with_capacity(kept.len());
    for col in &kept_cols {
        let mean = col.iter().copied().sum::<T>() / n;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
        let std = var.sqrt();
        means.push(mean);
        stds.push(if std > T::zero() { std } else { T::one() });
    }

    Ok(FittedPreprocessor {
        kept_names: kept.iter().map(|&j| train.names()[j].clone()).collect(),
        means,
        stds,
        threshold,
    })
}
