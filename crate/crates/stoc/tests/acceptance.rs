//! Acceptance suite: one test per criterion, each printing a PASS / FAIL
//! (or SKIP when a benchmark dataset file is absent) line.
//!
//! Run with `cargo test --test acceptance -- --nocapture`. The UCI
//! benchmark criteria look for `<name>.csv` under `STOC_DATA_DIR` (or
//! `<workspace>/data`); they skip with a message when the file is not
//! there. The KDD reproductions are the long-running optional suite and
//! additionally sit behind `--ignored`.

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stoc::cli::{dataset_defaults, run_experiment, ExperimentConfig};
use stoc::data::{synth_blobs, DatasetDescriptor, LabeledTable, Scaler};
use stoc::eval::{ap, auc, f1_at_ratio, recall_at_precision, run_protocol, ProtocolConfig};
use stoc::pipeline::{Mode, StocConfig, StocPipeline};
use stoc::refine::{
    aggregate_predictions, percentile_threshold, refine_data, IdentityFeatures, RefinementConfig,
};
use stoc::repr::{ReprHyper, ReprModel};

fn data_dir() -> PathBuf {
    std::env::var_os("STOC_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("../..")
                .join("data")
        })
}

fn benchmark_table(name: &str) -> Option<LabeledTable> {
    let path = data_dir().join(format!("{name}.csv"));
    if !path.exists() {
        return None;
    }
    let defaults = dataset_defaults(name).expect("registered benchmark");
    let descriptor = DatasetDescriptor {
        path,
        label_column: defaults.label_column.to_string(),
        positive_labels: defaults
            .positive_labels
            .iter()
            .map(|s| s.to_string())
            .collect(),
        negative_labels: Vec::new(),
        reverse_labels: defaults.reverse_labels,
        delimiter: ',',
    };
    Some(stoc::data::load_csv(&descriptor).expect("benchmark file parses"))
}

fn skip(criterion: &str, name: &str) {
    println!(
        "ACCEPTANCE {criterion}: SKIP - dataset `{name}` not found under {} (set STOC_DATA_DIR)",
        data_dir().display()
    );
}

fn table8_protocol(name: &str, ratios: Vec<f64>, modes: Vec<Mode>, gamma: Option<f64>) -> ProtocolConfig {
    let defaults = dataset_defaults(name).expect("registered benchmark");
    let mut protocol = ProtocolConfig::new(ratios, modes, 2022);
    protocol.repr = ReprHyper::new(defaults.transform_count, defaults.train_steps);
    protocol.gamma = gamma;
    protocol
}

fn baseline_f1_band(criterion: &str, name: &str, center: f64, tolerance: f64) {
    let Some(table) = benchmark_table(name) else {
        skip(criterion, name);
        return;
    };
    let protocol = table8_protocol(name, vec![0.0], vec![Mode::Baseline], None);
    let report = run_protocol(&table, &protocol).expect("protocol runs");
    let aggregate = report.aggregate_for(Mode::Baseline, 0.0).expect("aggregate");
    assert_eq!(aggregate.runs + aggregate.failed, 25);
    let mean = aggregate.f1.mean;
    let pass = (mean - center).abs() <= tolerance && aggregate.failed == 0;
    println!(
        "ACCEPTANCE {criterion}: {} - {name} baseline mean F1 {mean:.2} (std {:.2}) vs {center} +/- {tolerance} over {} runs",
        if pass { "PASS" } else { "FAIL" },
        aggregate.f1.std,
        aggregate.runs,
    );
    assert!(pass, "{name} baseline F1 {mean:.2} outside {center} +/- {tolerance}");
}

#[test]
fn criterion_1_baseline_reproduction_thyroid() {
    baseline_f1_band("1 (thyroid)", "thyroid", 75.1, 6.0);
}

#[test]
fn criterion_1_baseline_reproduction_arrhythmia() {
    baseline_f1_band("1 (arrhythmia)", "arrhythmia", 54.8, 8.0);
}

#[test]
#[ignore = "optional long-running suite; needs data/kdd.csv"]
fn criterion_1_baseline_reproduction_kdd() {
    baseline_f1_band("1 (kdd, optional)", "kdd", 98.0, 1.5);
}

#[test]
#[ignore = "optional long-running suite; needs data/kdd-rev.csv"]
fn criterion_1_baseline_reproduction_kdd_rev() {
    baseline_f1_band("1 (kdd-rev, optional)", "kdd-rev", 95.0, 1.5);
}

#[test]
fn criterion_2_contamination_robustness_shape() {
    let Some(table) = benchmark_table("thyroid") else {
        skip("2", "thyroid");
        return;
    };
    let baseline_protocol =
        table8_protocol("thyroid", vec![0.0, 0.10], vec![Mode::Baseline], Some(0.2));
    let baseline = run_protocol(&table, &baseline_protocol).expect("baseline runs");
    let full_protocol = table8_protocol("thyroid", vec![0.10], vec![Mode::StocFull], Some(0.2));
    let full = run_protocol(&table, &full_protocol).expect("stoc-full runs");

    let base0 = baseline.aggregate_for(Mode::Baseline, 0.0).unwrap().f1.mean;
    let base10 = baseline.aggregate_for(Mode::Baseline, 0.10).unwrap().f1.mean;
    let full10 = full.aggregate_for(Mode::StocFull, 0.10).unwrap().f1.mean;

    let drop_ok = base0 - base10 >= 5.0;
    let gain_ok = full10 - base10 >= 5.0;
    println!(
        "ACCEPTANCE 2: {} - thyroid F1 baseline@0 {base0:.2}, baseline@10 {base10:.2}, stoc-full@10 {full10:.2} (drop >= 5: {drop_ok}, gain >= 5: {gain_ok})",
        if drop_ok && gain_ok { "PASS" } else { "FAIL" },
    );
    assert!(drop_ok, "baseline did not drop by 5 points under contamination");
    assert!(gain_ok, "stoc-full did not recover 5 points over baseline");
}

#[test]
fn criterion_3_fixed_representation_ap_gain() {
    let Some(table) = benchmark_table("thyroid") else {
        skip("3", "thyroid");
        return;
    };
    let protocol = table8_protocol(
        "thyroid",
        vec![0.10],
        vec![Mode::RawBaseline, Mode::RawStocFixed],
        None,
    );
    let report = run_protocol(&table, &protocol).expect("protocol runs");
    let base = report.aggregate_for(Mode::RawBaseline, 0.10).unwrap().ap.mean;
    let refined = report.aggregate_for(Mode::RawStocFixed, 0.10).unwrap().ap.mean;
    let gain = refined - base;
    let pass = gain >= 15.0;
    println!(
        "ACCEPTANCE 3: {} - thyroid raw-feature AP {base:.2} -> {refined:.2} (gain {gain:.2}, need >= 15)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(pass, "raw-feature AP gain {gain:.2} below 15 points");
}

#[test]
fn criterion_4_refinement_efficacy_oracle() {
    let table = synth_blobs(2000, 200, 8, 6.0, 404).expect("fixture");
    let scaler = Scaler::fit(table.features()).unwrap();
    let features = scaler.transform(table.features()).unwrap();

    let mut anomaly_fracs = Vec::new();
    let mut normal_fracs = Vec::new();
    for seed in 0..5u64 {
        let config = RefinementConfig::new(5, 0.2, seed);
        let refined = refine_data(&features, &IdentityFeatures, &config, 0).unwrap();
        let excluded_anomalies = (2000..2200)
            .filter(|&i| refined.pseudo_labels[i] == 1)
            .count();
        let excluded_normals = (0..2000)
            .filter(|&i| refined.pseudo_labels[i] == 1)
            .count();
        anomaly_fracs.push(excluded_anomalies as f64 / 200.0);
        normal_fracs.push(excluded_normals as f64 / 2000.0);
    }
    let anomaly_avg = anomaly_fracs.iter().sum::<f64>() / 5.0;
    let normal_avg = normal_fracs.iter().sum::<f64>() / 5.0;
    let pass = anomaly_avg >= 0.80 && normal_avg <= 0.25;
    println!(
        "ACCEPTANCE 4: {} - refinement excluded {:.1}% of anomalies (need >= 80) and {:.1}% of normals (need <= 25), 5-seed average",
        if pass { "PASS" } else { "FAIL" },
        100.0 * anomaly_avg,
        100.0 * normal_avg,
    );
    assert!(pass, "anomalies {anomaly_avg:.3}, normals {normal_avg:.3}");
}

#[test]
fn criterion_5_gamma_zero_degeneracy() {
    let table = synth_blobs(300, 30, 4, 5.0, 505).expect("fixture");
    let queries = synth_blobs(40, 4, 4, 5.0, 606).expect("queries");

    let config = |mode: Mode| {
        let mut c = StocConfig::new(mode, 0.0, 4242);
        c.repr = ReprHyper::new(8, 96);
        c.repr.proj_dim = 8;
        c.refinement_schedule = vec![1, 2, 5, 10];
        c
    };

    let mut all_exact = true;
    for (refined_mode, baseline_mode) in [
        (Mode::RawStocFixed, Mode::RawBaseline),
        (Mode::StocFixed, Mode::Baseline),
        (Mode::StocFull, Mode::Baseline),
    ] {
        let base = StocPipeline::fit(table.features(), &config(baseline_mode)).unwrap();
        let refined = StocPipeline::fit(table.features(), &config(refined_mode)).unwrap();
        let base_scores = base.predict(queries.features()).unwrap();
        let refined_scores = refined.predict(queries.features()).unwrap();
        let exact = base_scores
            .iter()
            .zip(&refined_scores)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !exact {
            all_exact = false;
        }
        println!(
            "ACCEPTANCE 5: {} - gamma=0 {refined_mode} scores {} {baseline_mode}",
            if exact { "PASS" } else { "FAIL" },
            if exact { "identical to" } else { "differ from" },
        );
        assert!(exact, "gamma=0 {refined_mode} differs from {baseline_mode}");
    }
    assert!(all_exact);
}

// Criterion 6: consensus, threshold, and metric oracles.

#[test]
fn criterion_6_consensus_equals_or_for_all_vectors() {
    for k in 1..=6usize {
        for bits in 0..(1u32 << k) {
            let flags: Vec<Vec<bool>> = (0..k).map(|i| vec![bits & (1 << i) != 0]).collect();
            let got = aggregate_predictions(&flags).unwrap()[0];
            let or: bool = (0..k).any(|i| bits & (1 << i) != 0);
            let product_form: i32 = 1 - (0..k)
                .map(|i| 1 - i32::from(bits & (1 << i) != 0))
                .product::<i32>();
            assert_eq!(i32::from(got), product_form);
            assert_eq!(got == 1, or);
        }
    }
    println!("ACCEPTANCE 6a: PASS - consensus aggregation equals logical OR on all 2^K vectors, K <= 6");
}

#[test]
fn criterion_6_threshold_equals_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(616);
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let scores: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(-6..6)) / 3.0)
            .collect();
        let gamma = f64::from(rng.random_range(0..=10)) / 10.0;

        // Exhaustive scan oracle over every candidate threshold value.
        let oracle = if gamma == 0.0 {
            f64::INFINITY
        } else {
            let mut best: Option<f64> = None;
            for &candidate in &scores {
                let tail = scores.iter().filter(|&&s| s >= candidate).count() as f64;
                if tail / n as f64 >= gamma && best.is_none_or(|b| candidate > b) {
                    best = Some(candidate);
                }
            }
            best.unwrap_or_else(|| scores.iter().cloned().fold(f64::INFINITY, f64::min))
        };
        let got = percentile_threshold(&scores, gamma).unwrap();
        assert_eq!(got.to_bits(), oracle.to_bits(), "scores {scores:?} gamma {gamma}");
    }
    println!("ACCEPTANCE 6b: PASS - percentile threshold matches the exhaustive scan on 1000 tied multisets");
}

mod metric_oracles {
    /// Pair-counting AUC with half-weight ties.
    pub fn auc(scores: &[f64], labels: &[u8]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi == 1 && yj == 0 {
                    pairs += 1.0;
                    wins += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        100.0 * wins / pairs
    }

    fn counts_at(scores: &[f64], labels: &[u8], threshold: f64) -> (f64, f64, f64) {
        let mut tp = 0.0;
        let mut fp = 0.0;
        let mut pos = 0.0;
        for (&s, &y) in scores.iter().zip(labels) {
            pos += f64::from(y);
            if s >= threshold {
                tp += f64::from(y);
                fp += f64::from(y == 0);
            }
        }
        (tp, fp, pos)
    }

    /// PR-curve AP from an explicit threshold sweep.
    pub fn ap(scores: &[f64], labels: &[u8]) -> f64 {
        let mut thresholds = scores.to_vec();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let mut prev_recall = 0.0;
        let mut total = 0.0;
        for &t in &thresholds {
            let (tp, fp, pos) = counts_at(scores, labels, t);
            let recall = tp / pos;
            total += (recall - prev_recall) * (tp / (tp + fp));
            prev_recall = recall;
        }
        100.0 * total
    }

    /// F1 with the positive set chosen by repeated max scans (lower index
    /// wins ties), sized at the true positive count.
    pub fn f1(scores: &[f64], labels: &[u8]) -> f64 {
        let k = labels.iter().filter(|&&y| y == 1).count();
        let mut taken = vec![false; scores.len()];
        for _ in 0..k {
            let mut best = usize::MAX;
            for i in 0..scores.len() {
                if !taken[i] && (best == usize::MAX || scores[i] > scores[best]) {
                    best = i;
                }
            }
            taken[best] = true;
        }
        let tp = taken
            .iter()
            .zip(labels)
            .filter(|&(&t, &y)| t && y == 1)
            .count() as f64;
        let precision = tp / k as f64;
        let recall = tp / k as f64;
        if precision + recall == 0.0 {
            0.0
        } else {
            100.0 * 2.0 * precision * recall / (precision + recall)
        }
    }

    pub fn recall_at_precision(scores: &[f64], labels: &[u8], bar: f64) -> f64 {
        let mut best = 0.0f64;
        for &t in scores {
            let (tp, fp, pos) = counts_at(scores, labels, t);
            if 100.0 * tp / (tp + fp) >= bar {
                best = best.max(100.0 * tp / pos);
            }
        }
        best
    }
}

#[test]
fn criterion_6_metrics_match_brute_force_oracles() {
    let mut checked = 0usize;
    let mut check = |scores: &[f64], labels: &[u8]| {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        assert!(
            close(auc(scores, labels).unwrap(), metric_oracles::auc(scores, labels)),
            "auc {scores:?} {labels:?}"
        );
        assert!(
            close(ap(scores, labels).unwrap(), metric_oracles::ap(scores, labels)),
            "ap {scores:?} {labels:?}"
        );
        assert!(
            close(
                f1_at_ratio(scores, labels).unwrap(),
                metric_oracles::f1(scores, labels)
            ),
            "f1 {scores:?} {labels:?}"
        );
        for bar in [70.0, 90.0] {
            assert!(
                close(
                    recall_at_precision(scores, labels, bar).unwrap(),
                    metric_oracles::recall_at_precision(scores, labels, bar)
                ),
                "r@p{bar} {scores:?} {labels:?}"
            );
        }
        checked += 1;
    };

    // Exhaustive: every label pattern x every 3-letter score word, n <= 5.
    for n in 2..=5usize {
        let mut scores = vec![0.0; n];
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            for s in scores.iter_mut() {
                *s = (c % 3) as f64;
                c /= 3;
            }
            for mask in 1..(1u32 << n) - 1 {
                let labels: Vec<u8> = (0..n).map(|i| u8::from(mask & (1 << i) != 0)).collect();
                check(&scores, &labels);
            }
        }
    }
    // Sampled tied arrangements for n in 6..=8.
    let mut rng = ChaCha8Rng::seed_from_u64(660);
    for _ in 0..5000 {
        let n = rng.random_range(6..=8usize);
        let scores: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(0..5)) / 2.0)
            .collect();
        let mask = rng.random_range(1..(1u32 << n) - 1);
        let labels: Vec<u8> = (0..n).map(|i| u8::from(mask & (1 << i) != 0)).collect();
        check(&scores, &labels);
    }
    println!("ACCEPTANCE 6c: PASS - AUC/AP/F1/R@P match brute-force oracles on {checked} arrangements");
}

#[test]
fn criterion_7_gradient_and_initialization_checks() {
    let mut hyper = ReprHyper::new(4, 10);
    hyper.proj_dim = 3;

    // Initialization: all-zero parameters score a uniform softmax.
    let zero = ReprModel::zero_initialized(5, &hyper, 1).unwrap();
    let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![0.3 * i as f64; 5]).collect();
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let loss = zero.batch_loss(&refs).unwrap();
    let log_m = (hyper.transform_count as f64).ln();
    let init_ok = (loss - log_m).abs() < 1e-9;

    // 20 random (input, parameter) probes against central differences.
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(770);
    for probe in 0..20u64 {
        let model = ReprModel::init(5, &hyper, 1000 + probe).unwrap();
        let batch: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..5).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let batch_refs: Vec<&[f64]> = batch.iter().map(Vec::as_slice).collect();
        let (_, grads) = model.batch_gradients(&batch_refs).unwrap();

        let tensor = rng.random_range(0..grads.len());
        let coord = rng.random_range(0..grads[tensor].len());
        let mut plus = model.clone();
        plus.parameters_mut()[tensor][coord] += eps;
        let mut minus = model.clone();
        minus.parameters_mut()[tensor][coord] -= eps;
        let numeric =
            (plus.batch_loss(&batch_refs).unwrap() - minus.batch_loss(&batch_refs).unwrap())
                / (2.0 * eps);
        let analytic = grads[tensor][coord];
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    let grad_ok = worst < 1e-4;
    println!(
        "ACCEPTANCE 7: {} - max relative gradient error {worst:.2e} (need < 1e-4); zero-init loss {loss:.12} vs ln M {log_m:.12}",
        if grad_ok && init_ok { "PASS" } else { "FAIL" },
    );
    assert!(grad_ok, "gradient error {worst}");
    assert!(init_ok, "initialization loss {loss} != ln M {log_m}");
}

#[test]
fn criterion_8_run_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = |out: PathBuf| ExperimentConfig {
        dataset: "synth".to_string(),
        ratios: vec![0.0, 0.1],
        modes: vec![Mode::RawBaseline, Mode::RawStocFixed],
        splits: 2,
        seeds: 2,
        workers: 2,
        master_seed: 808,
        out_dir: out,
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&config(dir.path().join("a"))).unwrap();
    let b = run_experiment(&config(dir.path().join("b"))).unwrap();
    let bytes_a = std::fs::read(&a.runs_csv).unwrap();
    let bytes_b = std::fs::read(&b.runs_csv).unwrap();
    let pass = bytes_a == bytes_b;
    println!(
        "ACCEPTANCE 8: {} - two runs of an identical manifest produced byte-identical runs.csv ({} bytes)",
        if pass { "PASS" } else { "FAIL" },
        bytes_a.len(),
    );
    assert!(pass);
}
