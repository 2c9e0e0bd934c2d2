//! Rank metrics (AUC, AP, F1 at the known anomaly count, recall at
//! precision) and the tabular evaluation protocol: a grid of contamination
//! ratios, modes, splits, and seeds with mean/std aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{make_split, standardize, LabeledTable};
use crate::error::{Result, StocError};
use crate::pipeline::{gamma_policy, default_refinement_schedule, Mode, StocConfig, StocPipeline};
use crate::refine::RefinementConfig;
use crate::repr::ReprHyper;
use crate::seed::{derive_seed, derive_seed2};

fn check_binary(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(StocError::DimensionMismatch {
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(StocError::NonFinite {
            context: "metric scores".to_string(),
        });
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == labels.len() {
        return Err(StocError::SingleClassLabels);
    }
    Ok(())
}

/// Probability (x100) that a random positive outranks a random negative,
/// ties counted half.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_binary(scores, labels)?;
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // Midranks over tie groups, ascending.
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = midrank;
        }
        i = j;
    }
    let positives = labels.iter().filter(|&&y| y == 1).count() as f64;
    let negatives = n as f64 - positives;
    let rank_sum: f64 = labels
        .iter()
        .zip(&ranks)
        .filter_map(|(&y, &r)| (y == 1).then_some(r))
        .sum();
    let u = rank_sum - positives * (positives + 1.0) / 2.0;
    Ok(100.0 * u / (positives * negatives))
}

/// Average precision over the score-descending sweep, tied scores entering
/// together, x100.
pub fn ap(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_binary(scores, labels)?;
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let total_positives = labels.iter().filter(|&&y| y == 1).count() as f64;

    let mut tp = 0.0;
    let mut seen = 0.0;
    let mut prev_recall = 0.0;
    let mut sum = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..j] {
            tp += f64::from(labels[idx]);
        }
        seen += (j - i) as f64;
        let recall = tp / total_positives;
        let precision = tp / seen;
        sum += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    Ok(100.0 * sum)
}

/// F1 of the positive class when the top `k` scores are predicted
/// positive, `k` being the number of true positives (the known-count
/// thresholding convention for these benchmarks). Ties at the cut break by
/// original index.
pub fn f1_at_ratio(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_binary(scores, labels)?;
    let positives = labels.iter().filter(|&&y| y == 1).count();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Stable sort: equal scores keep ascending original index.
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let cut = positives; // ceil(rho * n) with rho the true positive fraction
    let tp = order[..cut].iter().filter(|&&i| labels[i] == 1).count();
    Ok(100.0 * 2.0 * tp as f64 / (cut + positives) as f64)
}

/// Maximum recall over thresholds whose precision is at least
/// `min_precision` (on the 0-100 scale); 0 when no threshold qualifies.
pub fn recall_at_precision(scores: &[f64], labels: &[u8], min_precision: f64) -> Result<f64> {
    check_binary(scores, labels)?;
    if !(0.0..=100.0).contains(&min_precision) {
        return Err(StocError::invalid(
            "min_precision",
            "must lie in [0, 100]",
        ));
    }
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let total_positives = labels.iter().filter(|&&y| y == 1).count() as f64;

    let mut tp = 0.0;
    let mut seen = 0.0;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..j] {
            tp += f64::from(labels[idx]);
        }
        seen += (j - i) as f64;
        let precision = tp / seen;
        if precision * 100.0 >= min_precision {
            best = best.max(100.0 * tp / total_positives);
        }
        i = j;
    }
    Ok(best)
}

/// Grid of runs to execute: the cross-product of ratios, modes, splits,
/// and seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub ratios: Vec<f64>,
    pub modes: Vec<Mode>,
    pub splits: usize,
    pub seeds: usize,
    /// Explicit percentile threshold; `None` uses twice the assumed
    /// contamination (the run's ratio) with a floor at zero contamination.
    pub gamma: Option<f64>,
    pub ensemble_count: usize,
    pub repr: ReprHyper,
    /// Explicit refinement schedule; `None` derives the default schedule
    /// from the per-run epoch horizon.
    pub refinement_schedule: Option<Vec<usize>>,
    pub master_seed: u64,
    /// Worker threads for independent runs; 0 means available parallelism.
    pub workers: usize,
    /// When set, every successful run saves its fitted pipeline here.
    #[serde(default)]
    pub checkpoint_dir: Option<std::path::PathBuf>,
}

impl ProtocolConfig {
    pub fn new(ratios: Vec<f64>, modes: Vec<Mode>, master_seed: u64) -> Self {
        ProtocolConfig {
            ratios,
            modes,
            splits: 5,
            seeds: 5,
            gamma: None,
            ensemble_count: crate::refine::DEFAULT_ENSEMBLE_COUNT,
            repr: ReprHyper::large_tabular(),
            refinement_schedule: None,
            master_seed,
            workers: 0,
            checkpoint_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratios.is_empty() {
            return Err(StocError::invalid("ratios", "at least one ratio required"));
        }
        for &r in &self.ratios {
            if !(0.0..=crate::data::MAX_ANOMALY_RATIO + 1e-12).contains(&r) {
                return Err(StocError::invalid(
                    "ratios",
                    format!("{r} outside [0, {}]", crate::data::MAX_ANOMALY_RATIO),
                ));
            }
        }
        if self.modes.is_empty() {
            return Err(StocError::invalid("modes", "at least one mode required"));
        }
        if self.splits == 0 {
            return Err(StocError::invalid("splits", "must be positive"));
        }
        if self.seeds == 0 {
            return Err(StocError::invalid("seeds", "must be positive"));
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) || !g.is_finite() {
                return Err(StocError::invalid("gamma", "must lie in [0, 1]"));
            }
        }
        if self.ensemble_count == 0 {
            return Err(StocError::invalid("k", "must be positive"));
        }
        if self.modes.iter().any(|m| m.uses_representation()) {
            self.repr.validate()?;
        }
        Ok(())
    }
}

/// One executed run. Metric fields are `None` when the run failed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub anomaly_ratio: f64,
    pub split_index: usize,
    pub seed_index: usize,
    pub split_seed: u64,
    pub model_seed: u64,
    pub gamma: f64,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
    pub ap: Option<f64>,
    pub recall_at_p70: Option<f64>,
    pub recall_at_p90: Option<f64>,
    /// Fraction of true train anomalies the final refinement excluded.
    pub anomalies_excluded: Option<f64>,
    /// Fraction of true train normals the final refinement excluded.
    pub normals_excluded: Option<f64>,
    pub error: Option<String>,
}

/// Mean and sample standard deviation of one metric over a configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> MetricSummary {
    if values.is_empty() {
        return MetricSummary {
            mean: f64::NAN,
            std: f64::NAN,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    MetricSummary { mean, std }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub mode: Mode,
    pub anomaly_ratio: f64,
    pub runs: usize,
    pub failed: usize,
    pub f1: MetricSummary,
    pub auc: MetricSummary,
    pub ap: MetricSummary,
    pub recall_at_p70: MetricSummary,
    pub recall_at_p90: MetricSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub warnings: Vec<String>,
}

impl MetricsReport {
    pub fn aggregate_for(&self, mode: Mode, ratio: f64) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.mode == mode && (a.anomaly_ratio - ratio).abs() < 1e-12)
    }
}

/// Group per-run records into per-(ratio, mode) aggregates, excluding
/// failed runs and flagging them in the warnings.
pub fn aggregate_runs(runs: &[RunRecord]) -> (Vec<Aggregate>, Vec<String>) {
    let mut keys: Vec<(f64, Mode)> = Vec::new();
    for run in runs {
        let key = (run.anomaly_ratio, run.mode);
        if !keys
            .iter()
            .any(|&(r, m)| m == key.1 && (r - key.0).abs() < 1e-12)
        {
            keys.push(key);
        }
    }
    let mut aggregates = Vec::with_capacity(keys.len());
    let mut warnings = Vec::new();
    for (ratio, mode) in keys {
        let group: Vec<&RunRecord> = runs
            .iter()
            .filter(|r| r.mode == mode && (r.anomaly_ratio - ratio).abs() < 1e-12)
            .collect();
        let ok: Vec<&&RunRecord> = group.iter().filter(|r| r.error.is_none()).collect();
        for failed in group.iter().filter(|r| r.error.is_some()) {
            warnings.push(format!(
                "run failed (mode {}, ratio {}, split {}, seed {}): {}",
                failed.mode,
                failed.anomaly_ratio,
                failed.split_index,
                failed.seed_index,
                failed.error.as_deref().unwrap_or("unknown")
            ));
        }
        let collect = |f: fn(&RunRecord) -> Option<f64>| -> Vec<f64> {
            ok.iter().filter_map(|r| f(r)).collect()
        };
        aggregates.push(Aggregate {
            mode,
            anomaly_ratio: ratio,
            runs: ok.len(),
            failed: group.len() - ok.len(),
            f1: summarize(&collect(|r| r.f1)),
            auc: summarize(&collect(|r| r.auc)),
            ap: summarize(&collect(|r| r.ap)),
            recall_at_p70: summarize(&collect(|r| r.recall_at_p70)),
            recall_at_p90: summarize(&collect(|r| r.recall_at_p90)),
        });
    }
    (aggregates, warnings)
}

fn run_one(
    table: &LabeledTable,
    protocol: &ProtocolConfig,
    mode: Mode,
    ratio: f64,
    split_index: usize,
    seed_index: usize,
) -> RunRecord {
    let split_seed = derive_seed(protocol.master_seed, "split", split_index as u64);
    let contamination_seed =
        derive_seed(protocol.master_seed, "contamination", split_index as u64);
    let model_seed = derive_seed2(
        protocol.master_seed,
        "model",
        split_index as u64,
        seed_index as u64,
    );
    let gamma = protocol.gamma.unwrap_or_else(|| gamma_policy(ratio));

    let mut record = RunRecord {
        mode,
        anomaly_ratio: ratio,
        split_index,
        seed_index,
        split_seed,
        model_seed,
        gamma,
        f1: None,
        auc: None,
        ap: None,
        recall_at_p70: None,
        recall_at_p90: None,
        anomalies_excluded: None,
        normals_excluded: None,
        error: None,
    };

    let outcome = (|| -> Result<()> {
        let split = make_split(table, ratio, split_seed, contamination_seed)?;
        let (train_std, test_std, _) = standardize(&split.train_features, &split.test_features)?;

        let schedule = match &protocol.refinement_schedule {
            Some(s) => s.clone(),
            None => {
                let epoch_len = train_std.rows().div_ceil(protocol.repr.batch_rows);
                default_refinement_schedule(protocol.repr.train_steps.div_ceil(epoch_len))
            }
        };
        let config = StocConfig {
            mode,
            refinement: RefinementConfig::new(protocol.ensemble_count, gamma, 0),
            repr: protocol.repr.clone(),
            refinement_schedule: schedule,
            master_seed: model_seed,
        };
        let pipeline = StocPipeline::fit(&train_std, &config)?;
        if let Some(dir) = &protocol.checkpoint_dir {
            let name = format!("run_{mode}_r{ratio}_s{split_index}_m{seed_index}.json");
            pipeline.save(&dir.join(name))?;
        }
        let scores = pipeline.predict(&test_std)?;
        let labels = &split.test_labels;

        record.f1 = Some(f1_at_ratio(&scores, labels)?);
        record.auc = Some(auc(&scores, labels)?);
        // Minority class of the test set counts as the positive for AP;
        // flip scores with the labels when normals are the minority.
        let positives = labels.iter().filter(|&&y| y == 1).count();
        record.ap = Some(if positives * 2 <= labels.len() {
            ap(&scores, labels)?
        } else {
            let flipped_labels: Vec<u8> = labels.iter().map(|&y| 1 - y).collect();
            let flipped_scores: Vec<f64> = scores.iter().map(|s| -s).collect();
            ap(&flipped_scores, &flipped_labels)?
        });
        record.recall_at_p70 = Some(recall_at_precision(&scores, labels, 70.0)?);
        record.recall_at_p90 = Some(recall_at_precision(&scores, labels, 90.0)?);

        if let Some(event) = pipeline.diagnostics.last() {
            let (anomalies, normals) =
                event.exclusion_fractions(split.hidden_train_labels());
            record.anomalies_excluded = Some(anomalies);
            record.normals_excluded = Some(normals);
        }
        Ok(())
    })();
    if let Err(err) = outcome {
        record.error = Some(err.to_string());
    }
    record
}

/// Execute the full (ratio, mode, split, seed) grid and aggregate. Run
/// failures are recorded per run, excluded from aggregates, and flagged in
/// the report warnings.
pub fn run_protocol(table: &LabeledTable, protocol: &ProtocolConfig) -> Result<MetricsReport> {
    protocol.validate()?;
    let mut specs = Vec::new();
    for &ratio in &protocol.ratios {
        for &mode in &protocol.modes {
            for split_index in 0..protocol.splits {
                for seed_index in 0..protocol.seeds {
                    specs.push((ratio, mode, split_index, seed_index));
                }
            }
        }
    }

    let execute = |spec: &(f64, Mode, usize, usize)| -> RunRecord {
        let (ratio, mode, split_index, seed_index) = *spec;
        run_one(table, protocol, mode, ratio, split_index, seed_index)
    };
    let runs: Vec<RunRecord> = if protocol.workers == 1 {
        specs.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(protocol.workers)
            .build()
            .map_err(|e| StocError::invalid("workers", e.to_string()))?;
        pool.install(|| specs.par_iter().map(execute).collect())
    };

    let (aggregates, warnings) = aggregate_runs(&runs);
    Ok(MetricsReport {
        runs,
        aggregates,
        warnings,
    })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn labeled_scores() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(-50.0f64..50.0, n),
                proptest::collection::vec(0u8..2, n),
            )
                .prop_filter("both classes", |(_, labels)| {
                    labels.contains(&1) && labels.contains(&0)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rank_metrics_invariant_under_monotone_transforms((scores, labels) in labeled_scores()) {
            // exp is strictly increasing; scaled/shifted variants too.
            let transformed: Vec<f64> = scores.iter().map(|s| (s / 25.0).exp() * 3.0 + 7.0).collect();
            prop_assert!((auc(&scores, &labels).unwrap() - auc(&transformed, &labels).unwrap()).abs() < 1e-9);
            prop_assert!((ap(&scores, &labels).unwrap() - ap(&transformed, &labels).unwrap()).abs() < 1e-9);
            prop_assert!((f1_at_ratio(&scores, &labels).unwrap() - f1_at_ratio(&transformed, &labels).unwrap()).abs() < 1e-9);
            prop_assert!((recall_at_precision(&scores, &labels, 70.0).unwrap() - recall_at_precision(&transformed, &labels, 70.0).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn metrics_stay_on_the_percent_scale((scores, labels) in labeled_scores()) {
            for value in [
                auc(&scores, &labels).unwrap(),
                ap(&scores, &labels).unwrap(),
                f1_at_ratio(&scores, &labels).unwrap(),
                recall_at_precision(&scores, &labels, 70.0).unwrap(),
            ] {
                prop_assert!((0.0..=100.0 + 1e-9).contains(&value));
            }
        }
    }
}
