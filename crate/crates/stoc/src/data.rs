//! Dataset ingestion, the split/contamination protocol, feature
//! standardization, and a synthetic blob generator used as an oracle
//! fixture by the refinement tests.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StocError};
use crate::matrix::Matrix;

/// Raw tabular dataset with ground-truth labels. Labels are used only for
/// split construction and evaluation, never for training.
#[derive(Debug, Clone)]
pub struct LabeledTable {
    features: Matrix,
    labels: Vec<u8>,
    name: String,
}

impl LabeledTable {
    pub fn new(features: Matrix, labels: Vec<u8>, name: impl Into<String>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(StocError::DimensionMismatch {
                expected: features.rows(),
                actual: labels.len(),
            });
        }
        if !features.all_finite() {
            return Err(StocError::NonFinite {
                context: "table features".to_string(),
            });
        }
        Ok(LabeledTable {
            features,
            labels,
            name: name.into(),
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn anomaly_count(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }
}

/// Configuration record naming a delimiter-separated dataset file and how
/// to read its label column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub path: PathBuf,
    pub label_column: String,
    /// Label values mapped to 1 (anomaly). Everything else maps to 0
    /// unless `negative_labels` is non-empty.
    pub positive_labels: Vec<String>,
    /// When non-empty, any label outside positive + negative is an error.
    #[serde(default)]
    pub negative_labels: Vec<String>,
    /// Swap the 0/1 mapping after applying the positive set.
    #[serde(default)]
    pub reverse_labels: bool,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_delimiter() -> char {
    ','
}

impl DatasetDescriptor {
    pub fn new(path: impl Into<PathBuf>, label_column: &str, positive: &[&str]) -> Self {
        DatasetDescriptor {
            path: path.into(),
            label_column: label_column.to_string(),
            positive_labels: positive.iter().map(|s| s.to_string()).collect(),
            negative_labels: Vec::new(),
            reverse_labels: false,
            delimiter: ',',
        }
    }

    pub fn with_reverse(mut self, reverse: bool) -> Self {
        self.reverse_labels = reverse;
        self
    }
}

/// Load a delimiter-separated file with a header row. Numeric columns pass
/// through; any column with a non-numeric cell is one-hot encoded over the
/// category vocabulary of the full file. Rows with missing (empty) cells
/// are rejected.
pub fn load_csv(desc: &DatasetDescriptor) -> Result<LabeledTable> {
    let raw = fs::read_to_string(&desc.path).map_err(|source| StocError::Io {
        path: desc.path.clone(),
        source,
    })?;
    let parse_err = |line: usize, message: String| StocError::Parse {
        path: desc.path.clone(),
        line,
        message,
    };

    let mut lines = raw.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".to_string()))?;
    let columns: Vec<String> = header
        .split(desc.delimiter)
        .map(|c| c.trim().to_string())
        .collect();
    let label_idx = columns
        .iter()
        .position(|c| c == &desc.label_column)
        .ok_or_else(|| {
            StocError::invalid(
                "label_column",
                format!("column `{}` not found in header", desc.label_column),
            )
        })?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<String> = line
            .split(desc.delimiter)
            .map(|c| c.trim().to_string())
            .collect();
        if row.len() != columns.len() {
            return Err(parse_err(
                i + 1,
                format!("expected {} fields, found {}", columns.len(), row.len()),
            ));
        }
        if let Some(pos) = row.iter().position(String::is_empty) {
            return Err(parse_err(
                i + 1,
                format!("missing value in column `{}`", columns[pos]),
            ));
        }
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(parse_err(2, "no data rows".to_string()));
    }

    // Column typing over the full file: numeric iff every cell parses finite.
    let feature_columns: Vec<usize> = (0..columns.len()).filter(|&c| c != label_idx).collect();
    if feature_columns.is_empty() {
        return Err(StocError::invalid(
            "features",
            "zero-width feature matrix: file has only the label column",
        ));
    }
    enum ColumnKind {
        Numeric,
        Categorical(Vec<String>),
    }
    let mut kinds = Vec::with_capacity(feature_columns.len());
    for &c in &feature_columns {
        let numeric = cells
            .iter()
            .all(|row| row[c].parse::<f64>().is_ok_and(|v| v.is_finite()));
        if numeric {
            kinds.push(ColumnKind::Numeric);
        } else {
            let vocab: BTreeSet<String> = cells.iter().map(|row| row[c].clone()).collect();
            kinds.push(ColumnKind::Categorical(vocab.into_iter().collect()));
        }
    }

    let width: usize = kinds
        .iter()
        .map(|k| match k {
            ColumnKind::Numeric => 1,
            ColumnKind::Categorical(v) => v.len(),
        })
        .sum();

    let positive: BTreeSet<&str> = desc.positive_labels.iter().map(String::as_str).collect();
    let negative: BTreeSet<&str> = desc.negative_labels.iter().map(String::as_str).collect();

    let mut features = Matrix::zeros(0, width);
    let mut labels = Vec::with_capacity(cells.len());
    let mut buf = vec![0.0; width];
    for (r, row) in cells.iter().enumerate() {
        buf.iter_mut().for_each(|v| *v = 0.0);
        let mut at = 0;
        for (&c, kind) in feature_columns.iter().zip(&kinds) {
            match kind {
                ColumnKind::Numeric => {
                    buf[at] = row[c].parse::<f64>().expect("checked during typing");
                    at += 1;
                }
                ColumnKind::Categorical(vocab) => {
                    let pos = vocab
                        .binary_search(&row[c])
                        .expect("vocabulary built from the full file");
                    buf[at + pos] = 1.0;
                    at += vocab.len();
                }
            }
        }
        features.push_row(&buf);

        let value = row[label_idx].as_str();
        let mut y = if positive.contains(value) {
            1u8
        } else if negative.is_empty() || negative.contains(value) {
            0u8
        } else {
            return Err(parse_err(r + 2, format!("unknown label value `{value}`")));
        };
        if desc.reverse_labels {
            y = 1 - y;
        }
        labels.push(y);
    }

    let name = desc
        .path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    LabeledTable::new(features, labels, name)
}

/// Contaminated unlabeled training matrix plus held-out labeled test
/// matrix. Ground-truth labels of training rows are hidden behind an
/// explicitly named accessor so no fit path can take them by accident.
#[derive(Debug, Clone)]
pub struct ExperimentSplit {
    pub train_features: Matrix,
    train_true_labels: Vec<u8>,
    pub test_features: Matrix,
    pub test_labels: Vec<u8>,
    pub anomaly_ratio: f64,
    pub split_seed: u64,
    pub contamination_seed: u64,
    /// Table row indices of the training rows, in training order.
    pub train_indices: Vec<usize>,
    /// Table row indices of the test rows, in test order.
    pub test_indices: Vec<usize>,
    /// Normals swapped out to make room for contaminating anomalies.
    pub discarded_indices: Vec<usize>,
}

impl ExperimentSplit {
    /// Ground-truth labels of training rows, for diagnostics and
    /// refinement-efficacy measurement only.
    pub fn hidden_train_labels(&self) -> &[u8] {
        &self.train_true_labels
    }
}

pub const MAX_ANOMALY_RATIO: f64 = 0.10;

/// Build a contaminated training set and a held-out test set.
///
/// Half of the normals (chosen by `split_seed`) form the base training
/// pool; a swap driven by `contamination_seed` replaces `round(ratio *
/// pool)` normals with as many anomalies, keeping the pool size constant.
/// Swapped-in anomalies never appear in the test set; swapped-out normals
/// are discarded entirely.
pub fn make_split(
    table: &LabeledTable,
    anomaly_ratio: f64,
    split_seed: u64,
    contamination_seed: u64,
) -> Result<ExperimentSplit> {
    if !(0.0..=MAX_ANOMALY_RATIO + 1e-12).contains(&anomaly_ratio) {
        return Err(StocError::invalid(
            "anomaly_ratio",
            format!("{anomaly_ratio} outside [0, {MAX_ANOMALY_RATIO}]"),
        ));
    }
    let mut normals: Vec<usize> = Vec::new();
    let mut anomalies: Vec<usize> = Vec::new();
    for (i, &y) in table.labels().iter().enumerate() {
        if y == 0 {
            normals.push(i);
        } else {
            anomalies.push(i);
        }
    }
    if normals.is_empty() {
        return Err(StocError::invalid("table", "empty normal class"));
    }
    let pool_size = normals.len() / 2;
    if pool_size == 0 {
        return Err(StocError::TooFewRows {
            rows: normals.len(),
            needed: 2,
        });
    }

    let mut split_rng = ChaCha8Rng::seed_from_u64(split_seed);
    normals.shuffle(&mut split_rng);
    let (pool, test_normals) = normals.split_at(pool_size);

    let swap = (anomaly_ratio * pool_size as f64).round() as usize;
    if swap > anomalies.len() {
        return Err(StocError::InsufficientAnomalies {
            needed: swap,
            available: anomalies.len(),
        });
    }
    if anomaly_ratio > 0.0 && anomalies.is_empty() {
        return Err(StocError::InsufficientAnomalies {
            needed: 1,
            available: 0,
        });
    }

    let mut contam_rng = ChaCha8Rng::seed_from_u64(contamination_seed);
    let mut shuffled_anomalies = anomalies.clone();
    shuffled_anomalies.shuffle(&mut contam_rng);
    let (swapped_in, test_anomalies) = shuffled_anomalies.split_at(swap);

    let mut pool_positions: Vec<usize> = (0..pool_size).collect();
    pool_positions.shuffle(&mut contam_rng);
    let discarded_positions: BTreeSet<usize> = pool_positions[..swap].iter().copied().collect();

    let mut train_indices = Vec::with_capacity(pool_size);
    let mut train_true_labels = Vec::with_capacity(pool_size);
    let mut discarded_indices = Vec::with_capacity(swap);
    for (pos, &row) in pool.iter().enumerate() {
        if discarded_positions.contains(&pos) {
            discarded_indices.push(row);
        } else {
            train_indices.push(row);
            train_true_labels.push(0);
        }
    }
    for &row in swapped_in {
        train_indices.push(row);
        train_true_labels.push(1);
    }

    let mut test_indices: Vec<usize> = Vec::with_capacity(test_normals.len() + test_anomalies.len());
    test_indices.extend_from_slice(test_normals);
    test_indices.extend_from_slice(test_anomalies);
    let test_labels: Vec<u8> = test_indices.iter().map(|&i| table.labels()[i]).collect();

    Ok(ExperimentSplit {
        train_features: table.features().select_rows(&train_indices),
        train_true_labels,
        test_features: table.features().select_rows(&test_indices),
        test_labels,
        anomaly_ratio,
        split_seed,
        contamination_seed,
        train_indices,
        test_indices,
        discarded_indices,
    })
}

/// Per-dimension mean and standard deviation fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Population (divide-by-n) convention; constant columns get std 1 so
    /// they map to zero instead of dividing by zero.
    pub fn fit(train: &Matrix) -> Result<Self> {
        if train.is_empty() {
            return Err(StocError::TooFewRows { rows: 0, needed: 1 });
        }
        let d = train.cols();
        let n = train.rows() as f64;
        let mut mean = vec![0.0; d];
        for row in train.iter_rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in train.iter_rows() {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Scaler { mean, std })
    }

    pub fn transform(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.mean.len() {
            return Err(StocError::DimensionMismatch {
                expected: self.mean.len(),
                actual: m.cols(),
            });
        }
        let mut out = m.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for ((v, mu), sd) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - mu) / sd;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.mean.len() {
            return Err(StocError::DimensionMismatch {
                expected: self.mean.len(),
                actual: m.cols(),
            });
        }
        let mut out = m.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for ((v, mu), sd) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = *v * sd + mu;
            }
        }
        Ok(out)
    }
}

/// Fit a scaler on `train` only and transform both matrices with it.
pub fn standardize(train: &Matrix, test: &Matrix) -> Result<(Matrix, Matrix, Scaler)> {
    if train.cols() != test.cols() {
        return Err(StocError::DimensionMismatch {
            expected: train.cols(),
            actual: test.cols(),
        });
    }
    let scaler = Scaler::fit(train)?;
    let train_std = scaler.transform(train)?;
    let test_std = scaler.transform(test)?;
    Ok((train_std, test_std, scaler))
}

/// Two unit-covariance Gaussian blobs: normals at the origin, anomalies at
/// distance `separation` along a seeded random direction.
pub fn synth_blobs(
    n_normal: usize,
    n_anomaly: usize,
    dims: usize,
    separation: f64,
    seed: u64,
) -> Result<LabeledTable> {
    if n_normal == 0 || n_anomaly == 0 {
        return Err(StocError::invalid("counts", "must be positive"));
    }
    if dims == 0 {
        return Err(StocError::invalid("dims", "must be at least 1"));
    }
    if separation <= 0.0 {
        return Err(StocError::invalid("separation", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut direction: Vec<f64> = (0..dims).map(|_| rng.sample(StandardNormal)).collect();
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    direction.iter_mut().for_each(|v| *v *= separation / norm);

    let total = n_normal + n_anomaly;
    let mut features = Matrix::zeros(total, dims);
    let mut labels = vec![0u8; total];
    for i in 0..n_normal {
        for v in features.row_mut(i) {
            *v = rng.sample(StandardNormal);
        }
    }
    for i in 0..n_anomaly {
        let row = features.row_mut(n_normal + i);
        for (v, c) in row.iter_mut().zip(&direction) {
            let z: f64 = rng.sample(StandardNormal);
            *v = c + z;
        }
        labels[n_normal + i] = 1;
    }
    LabeledTable::new(features, labels, format!("synth-blobs-{seed}"))
}
