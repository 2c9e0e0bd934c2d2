//! Data refinement: K one-class classifiers trained on disjoint subsets,
//! per-classifier percentile thresholds, and unanimous-normal consensus.
//!
//! A row survives refinement only if every classifier in the ensemble
//! scores it below that classifier's threshold. Thresholds are percentiles
//! of each classifier's score distribution over all N rows.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StocError};
use crate::matrix::Matrix;
use crate::occ::GdeModel;
use crate::seed::derive_seed;

pub const DEFAULT_ENSEMBLE_COUNT: usize = 5;

/// Feature map handed to the refinement block. The block fits one GDE per
/// channel per fold and scores a row by its best (most normal) channel,
/// so a plain extractor exposes one channel and the transformation-bank
/// extractor exposes one channel per transformation.
pub trait FeatureExtractor: Sync {
    fn channels(&self) -> usize;
    fn extract(&self, x: &[f64], channel: usize) -> Vec<f64>;
}

/// Raw features, unchanged.
pub struct IdentityFeatures;

impl FeatureExtractor for IdentityFeatures {
    fn channels(&self) -> usize {
        1
    }

    fn extract(&self, x: &[f64], _channel: usize) -> Vec<f64> {
        x.to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementConfig {
    /// K, the number of disjoint-subset classifiers.
    pub ensemble_count: usize,
    /// Fraction of rows each classifier flags as anomalous.
    pub gamma: f64,
    pub partition_seed: u64,
}

impl RefinementConfig {
    pub fn new(ensemble_count: usize, gamma: f64, partition_seed: u64) -> Self {
        RefinementConfig {
            ensemble_count,
            gamma,
            partition_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensemble_count == 0 {
            return Err(StocError::invalid("k", "ensemble count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) || !self.gamma.is_finite() {
            return Err(StocError::invalid("gamma", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig::new(DEFAULT_ENSEMBLE_COUNT, 0.0, 0)
    }
}

/// Output of one refinement pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinedSet {
    /// Rows with pseudo-label 0, ascending.
    pub kept_indices: Vec<usize>,
    /// Pseudo-label per row: 1 if any classifier flagged it.
    pub pseudo_labels: Vec<u8>,
    /// Per-classifier percentile thresholds.
    pub thresholds: Vec<f64>,
    /// Fold each row was assigned to.
    pub fold_assignment: Vec<usize>,
}

impl RefinedSet {
    pub fn rejected_count(&self) -> usize {
        self.pseudo_labels.len() - self.kept_indices.len()
    }
}

/// Partition `{0..n-1}` into `k` disjoint shuffled subsets whose sizes
/// differ by at most one.
pub fn disjoint_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > n {
        return Err(StocError::invalid(
            "k",
            format!("cannot split {n} rows into {k} subsets"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut at = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[at..at + size].to_vec());
        at += size;
    }
    Ok(folds)
}

/// Largest threshold whose upper tail holds at least a `gamma` fraction of
/// the scores: `max eta s.t. (1/N) sum 1(score_i >= eta) >= gamma`.
///
/// Returns `+inf` when `gamma` is zero: the constraint is vacuous and no
/// row is flagged.
pub fn percentile_threshold(scores: &[f64], gamma: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(StocError::invalid("scores", "empty score sequence"));
    }
    if !(0.0..=1.0).contains(&gamma) || !gamma.is_finite() {
        return Err(StocError::invalid("gamma", "must lie in [0, 1]"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(StocError::NonFinite {
            context: "percentile_threshold scores".to_string(),
        });
    }
    if gamma == 0.0 {
        return Ok(f64::INFINITY);
    }
    let n = scores.len();
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // Walk tie groups in descending order; the first value whose
    // cumulative tail reaches gamma is the maximal threshold.
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        if j as f64 / n as f64 >= gamma {
            return Ok(sorted[i]);
        }
        i = j;
    }
    Ok(sorted[n - 1])
}

/// Consensus pseudo-labels: a row is anomalous if any classifier flags it.
pub fn aggregate_predictions(per_classifier_flags: &[Vec<bool>]) -> Result<Vec<u8>> {
    let Some(first) = per_classifier_flags.first() else {
        return Err(StocError::invalid("flags", "no classifier predictions"));
    };
    let n = first.len();
    for flags in per_classifier_flags {
        if flags.len() != n {
            return Err(StocError::DimensionMismatch {
                expected: n,
                actual: flags.len(),
            });
        }
    }
    Ok((0..n)
        .map(|i| u8::from(per_classifier_flags.iter().any(|flags| flags[i])))
        .collect())
}

/// One refinement pass: partition rows, fit a GDE per fold (per extractor
/// channel), threshold each classifier's scores over all rows, and keep
/// the rows no classifier flags.
///
/// `call_index` keeps repeated passes over the same data on fresh
/// partitions while staying reproducible.
pub fn refine_data(
    features: &Matrix,
    extractor: &dyn FeatureExtractor,
    config: &RefinementConfig,
    call_index: u64,
) -> Result<RefinedSet> {
    config.validate()?;
    let n = features.rows();
    let k = config.ensemble_count;
    if n < 2 * k {
        return Err(StocError::TooFewRows {
            rows: n,
            needed: 2 * k,
        });
    }

    let partition_seed = derive_seed(config.partition_seed, "refine-partition", call_index);
    let folds = disjoint_partition(n, k, partition_seed)?;
    let mut fold_assignment = vec![0usize; n];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            fold_assignment[i] = f;
        }
    }

    // score[k][i]: best (most normal) channel score of row i under the
    // fold-k classifier.
    let mut scores = vec![vec![f64::INFINITY; n]; k];
    for channel in 0..extractor.channels() {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| extractor.extract(features.row(i), channel))
            .collect();
        let extracted = Matrix::from_rows(&rows);
        for (f, fold) in folds.iter().enumerate() {
            let model = GdeModel::fit_auto(&extracted.select_rows(fold))?;
            for (i, row) in extracted.iter_rows().enumerate() {
                let s = model.score(row);
                if s < scores[f][i] {
                    scores[f][i] = s;
                }
            }
        }
    }

    let mut thresholds = Vec::with_capacity(k);
    let mut flags = Vec::with_capacity(k);
    for classifier_scores in &scores {
        let eta = percentile_threshold(classifier_scores, config.gamma)?;
        flags.push(classifier_scores.iter().map(|&s| s >= eta).collect());
        thresholds.push(eta);
    }
    let pseudo_labels = aggregate_predictions(&flags)?;
    let kept_indices: Vec<usize> = pseudo_labels
        .iter()
        .enumerate()
        .filter_map(|(i, &y)| (y == 0).then_some(i))
        .collect();

    Ok(RefinedSet {
        kept_indices,
        pseudo_labels,
        thresholds,
        fold_assignment,
    })
}
