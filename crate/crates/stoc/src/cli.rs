//! Experiment front end: configuration, dataset registry, run
//! orchestration, and result emission (JSON report, per-run CSV,
//! plot-ready curve CSV, reproducibility manifest).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{load_csv, synth_blobs, DatasetDescriptor, LabeledTable, Scaler};
use crate::error::{Result, StocError};
use crate::eval::{aggregate_runs, run_protocol, Aggregate, MetricsReport, ProtocolConfig, RunRecord};
use crate::pipeline::{gamma_policy, Mode};
use crate::refine::{refine_data, IdentityFeatures, RefinementConfig};
use crate::repr::{ReprHyper, DEFAULT_PROJ_DIM};
use crate::seed::derive_seed;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Registry entry: per-dataset hyperparameter defaults and protocol caps.
#[derive(Debug, Clone, Copy)]
pub struct DatasetDefaults {
    pub transform_count: usize,
    pub train_steps: usize,
    pub max_ratio: f64,
    pub label_column: &'static str,
    pub positive_labels: &'static [&'static str],
    pub reverse_labels: bool,
}

/// Defaults for the known benchmark datasets. The KDD family uses fewer
/// transformations and steps; its label file marks attacks, with the
/// minority `normal.` class as the anomaly unless reversed.
pub fn dataset_defaults(name: &str) -> Option<DatasetDefaults> {
    match name {
        "kdd" => Some(DatasetDefaults {
            transform_count: 32,
            train_steps: 1 << 10,
            max_ratio: 0.10,
            label_column: "label",
            positive_labels: &["normal."],
            reverse_labels: false,
        }),
        "kdd-rev" => Some(DatasetDefaults {
            transform_count: 32,
            train_steps: 1 << 10,
            max_ratio: 0.025,
            label_column: "label",
            positive_labels: &["normal."],
            reverse_labels: true,
        }),
        "thyroid" => Some(DatasetDefaults {
            transform_count: 256,
            train_steps: 1 << 16,
            max_ratio: 0.10,
            label_column: "label",
            positive_labels: &["1"],
            reverse_labels: false,
        }),
        "arrhythmia" => Some(DatasetDefaults {
            transform_count: 256,
            train_steps: 1 << 16,
            max_ratio: 0.10,
            label_column: "label",
            positive_labels: &["1"],
            reverse_labels: false,
        }),
        "synth" => Some(DatasetDefaults {
            transform_count: 16,
            train_steps: 1 << 11,
            max_ratio: 0.10,
            label_column: "label",
            positive_labels: &["1"],
            reverse_labels: false,
        }),
        _ => None,
    }
}

/// Parameters of the built-in synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_normal: usize,
    pub n_anomaly: usize,
    pub dims: usize,
    pub separation: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_normal: 2000,
            n_anomaly: 200,
            dims: 8,
            separation: 6.0,
            seed: 7,
        }
    }
}

/// One experiment: a dataset, a ratio/mode grid, and every knob needed to
/// reproduce the run. Serialized as the single source of truth; command
/// line flags override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// One of kdd, kdd-rev, thyroid, arrhythmia, synth, or custom.
    pub dataset: String,
    pub data_path: Option<PathBuf>,
    pub label_column: Option<String>,
    pub positive_labels: Option<Vec<String>>,
    pub negative_labels: Vec<String>,
    pub reverse_labels: Option<bool>,
    pub delimiter: char,
    pub ratios: Vec<f64>,
    /// `None` selects the auto policy (twice the run's assumed ratio).
    pub gamma: Option<f64>,
    pub ensemble_count: usize,
    pub modes: Vec<Mode>,
    pub splits: usize,
    pub seeds: usize,
    pub transform_count: Option<usize>,
    pub proj_dim: usize,
    pub train_steps: Option<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Multiplies the representation step budget only; (0, 1].
    pub scale_factor: f64,
    pub refinement_schedule: Option<Vec<usize>>,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub checkpoints: bool,
    pub synth: SynthSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: "synth".to_string(),
            data_path: None,
            label_column: None,
            positive_labels: None,
            negative_labels: Vec::new(),
            reverse_labels: None,
            delimiter: ',',
            ratios: vec![0.0, 0.05, 0.10],
            gamma: None,
            ensemble_count: crate::refine::DEFAULT_ENSEMBLE_COUNT,
            modes: vec![Mode::Baseline, Mode::StocFull],
            splits: 5,
            seeds: 5,
            transform_count: None,
            proj_dim: DEFAULT_PROJ_DIM,
            train_steps: None,
            learning_rate: crate::repr::DEFAULT_LEARNING_RATE,
            momentum: crate::repr::DEFAULT_MOMENTUM,
            weight_decay: crate::repr::DEFAULT_WEIGHT_DECAY,
            scale_factor: 1.0,
            refinement_schedule: None,
            master_seed: 2022,
            out_dir: PathBuf::from("out"),
            workers: 0,
            checkpoints: false,
            synth: SynthSpec::default(),
        }
    }
}

/// Fully resolved experiment: registry defaults applied, every knob
/// concrete, configuration validated.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub repr: ReprHyper,
    pub max_ratio: f64,
}

impl ExperimentConfig {
    /// Apply registry defaults and validate every field, naming the
    /// offending field in the error.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let defaults = dataset_defaults(&self.dataset);
        if defaults.is_none() && self.dataset != "custom" {
            return Err(StocError::invalid(
                "dataset",
                format!(
                    "unknown dataset `{}` (expected kdd, kdd-rev, thyroid, arrhythmia, synth, or custom)",
                    self.dataset
                ),
            ));
        }
        let max_ratio = defaults.map_or(crate::data::MAX_ANOMALY_RATIO, |d| d.max_ratio);

        if self.ratios.is_empty() {
            return Err(StocError::invalid("ratios", "at least one ratio required"));
        }
        for &r in &self.ratios {
            if !(0.0..=max_ratio + 1e-12).contains(&r) {
                return Err(StocError::invalid(
                    "ratios",
                    format!("{r} outside [0, {max_ratio}] for dataset `{}`", self.dataset),
                ));
            }
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) || !g.is_finite() {
                return Err(StocError::invalid("gamma", format!("{g} outside [0, 1]")));
            }
        }
        if self.ensemble_count == 0 {
            return Err(StocError::invalid("k", "ensemble count must be positive"));
        }
        if self.modes.is_empty() {
            return Err(StocError::invalid("modes", "at least one mode required"));
        }
        if self.splits == 0 || self.seeds == 0 {
            return Err(StocError::invalid(
                "splits",
                "splits and seeds must be positive",
            ));
        }
        if !(self.scale_factor > 0.0 && self.scale_factor <= 1.0) {
            return Err(StocError::invalid(
                "scale_factor",
                format!("{} outside (0, 1]", self.scale_factor),
            ));
        }
        if self.dataset == "custom" && self.data_path.is_none() {
            return Err(StocError::invalid(
                "data_path",
                "required for dataset `custom`",
            ));
        }

        let transform_count = self
            .transform_count
            .or(defaults.map(|d| d.transform_count))
            .unwrap_or(32);
        let base_steps = self
            .train_steps
            .or(defaults.map(|d| d.train_steps))
            .unwrap_or(1 << 10);
        let train_steps = ((base_steps as f64 * self.scale_factor).ceil() as usize).max(1);

        let mut repr = ReprHyper::new(transform_count, train_steps);
        repr.proj_dim = self.proj_dim;
        repr.learning_rate = self.learning_rate;
        repr.momentum = self.momentum;
        repr.weight_decay = self.weight_decay;
        repr.validate()?;

        // Freeze a fully concrete copy so the manifest reproduces the run.
        let mut config = self.clone();
        config.transform_count = Some(transform_count);
        config.train_steps = Some(base_steps);
        if let Some(d) = defaults {
            config.label_column = Some(
                config
                    .label_column
                    .unwrap_or_else(|| d.label_column.to_string()),
            );
            config.positive_labels = Some(config.positive_labels.unwrap_or_else(|| {
                d.positive_labels.iter().map(|s| s.to_string()).collect()
            }));
            config.reverse_labels = Some(config.reverse_labels.unwrap_or(d.reverse_labels));
        } else {
            config.label_column = Some(config.label_column.unwrap_or_else(|| "label".to_string()));
            config.positive_labels = Some(config.positive_labels.unwrap_or_default());
            config.reverse_labels = Some(config.reverse_labels.unwrap_or(false));
        }
        if config.dataset != "synth" && config.data_path.is_none() {
            config.data_path = Some(PathBuf::from(format!("data/{}.csv", config.dataset)));
        }

        Ok(ResolvedExperiment {
            config,
            repr,
            max_ratio,
        })
    }
}

impl ResolvedExperiment {
    pub fn load_table(&self) -> Result<LabeledTable> {
        if self.config.dataset == "synth" {
            let s = &self.config.synth;
            return synth_blobs(s.n_normal, s.n_anomaly, s.dims, s.separation, s.seed);
        }
        let descriptor = DatasetDescriptor {
            path: self
                .config
                .data_path
                .clone()
                .expect("resolve() fills data_path"),
            label_column: self.config.label_column.clone().expect("resolved"),
            positive_labels: self.config.positive_labels.clone().expect("resolved"),
            negative_labels: self.config.negative_labels.clone(),
            reverse_labels: self.config.reverse_labels.expect("resolved"),
            delimiter: self.config.delimiter,
        };
        load_csv(&descriptor)
    }

    pub fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            ratios: self.config.ratios.clone(),
            modes: self.config.modes.clone(),
            splits: self.config.splits,
            seeds: self.config.seeds,
            gamma: self.config.gamma,
            ensemble_count: self.config.ensemble_count,
            repr: self.repr.clone(),
            refinement_schedule: self.config.refinement_schedule.clone(),
            master_seed: self.config.master_seed,
            workers: self.config.workers,
            checkpoint_dir: self
                .config
                .checkpoints
                .then(|| self.config.out_dir.join("checkpoints")),
        }
    }
}

/// Reproducibility manifest: resolved config, its hash, and the artifact
/// version. The timestamp lives here and only here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact_version: String,
    pub config_hash: String,
    pub created_unix: Option<u64>,
    pub config: ExperimentConfig,
}

fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let canonical =
        serde_json::to_string(config).map_err(|e| StocError::Checkpoint(e.to_string()))?;
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in canonical.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    Ok(format!("{h:016x}"))
}

/// Load a configuration file: either a plain `ExperimentConfig` or a
/// previously emitted manifest (its embedded config is used).
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let raw = fs::read_to_string(path).map_err(|source| StocError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if let Ok(manifest) = serde_json::from_str::<Manifest>(&raw) {
        return Ok(manifest.config);
    }
    serde_json::from_str(&raw).map_err(|e| StocError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}

fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub const RUNS_CSV_HEADER: &str = "mode,anomaly_ratio,split_index,seed_index,split_seed,model_seed,gamma,f1,auc,ap,recall_at_p70,recall_at_p90,anomalies_excluded,normals_excluded,error";

pub fn runs_to_csv(runs: &[RunRecord]) -> String {
    let mut out = String::from(RUNS_CSV_HEADER);
    out.push('\n');
    for r in runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mode,
            r.anomaly_ratio,
            r.split_index,
            r.seed_index,
            r.split_seed,
            r.model_seed,
            r.gamma,
            opt(r.f1),
            opt(r.auc),
            opt(r.ap),
            opt(r.recall_at_p70),
            opt(r.recall_at_p90),
            opt(r.anomalies_excluded),
            opt(r.normals_excluded),
            csv_field(r.error.as_deref().unwrap_or("")),
        );
    }
    out
}

pub const CURVES_CSV_HEADER: &str = "mode,anomaly_ratio,runs,failed,f1_mean,f1_std,auc_mean,auc_std,ap_mean,ap_std,recall_at_p70_mean,recall_at_p70_std,recall_at_p90_mean,recall_at_p90_std";

pub fn curves_to_csv(aggregates: &[Aggregate]) -> String {
    let mut out = String::from(CURVES_CSV_HEADER);
    out.push('\n');
    for a in aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            a.mode,
            a.anomaly_ratio,
            a.runs,
            a.failed,
            a.f1.mean,
            a.f1.std,
            a.auc.mean,
            a.auc.std,
            a.ap.mean,
            a.ap.std,
            a.recall_at_p70.mean,
            a.recall_at_p70.std,
            a.recall_at_p90.mean,
            a.recall_at_p90.std,
        );
    }
    out
}

/// Minimal CSV line splitter handling quoted fields (for the error
/// column).
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                chars.next();
                field.push('"');
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(std::mem::take(&mut field)),
            _ => field.push(c),
        }
    }
    fields.push(field);
    fields
}

/// Parse a `runs.csv` back into records (for the `report` subcommand).
pub fn parse_runs_csv(text: &str, path: &Path) -> Result<Vec<RunRecord>> {
    let err = |line: usize, message: String| StocError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(err(1, "empty file".to_string()));
    };
    if header != RUNS_CSV_HEADER {
        return Err(err(1, "unexpected runs.csv header".to_string()));
    }
    let mut runs = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line);
        if fields.len() != 15 {
            return Err(err(i + 1, format!("expected 15 fields, found {}", fields.len())));
        }
        let parse_f64 = |s: &str, name: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| err(i + 1, format!("bad {name}: `{s}`")))
        };
        let parse_opt = |s: &str, name: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s, name).map(Some)
            }
        };
        runs.push(RunRecord {
            mode: fields[0].parse()?,
            anomaly_ratio: parse_f64(&fields[1], "anomaly_ratio")?,
            split_index: fields[2]
                .parse()
                .map_err(|_| err(i + 1, "bad split_index".to_string()))?,
            seed_index: fields[3]
                .parse()
                .map_err(|_| err(i + 1, "bad seed_index".to_string()))?,
            split_seed: fields[4]
                .parse()
                .map_err(|_| err(i + 1, "bad split_seed".to_string()))?,
            model_seed: fields[5]
                .parse()
                .map_err(|_| err(i + 1, "bad model_seed".to_string()))?,
            gamma: parse_f64(&fields[6], "gamma")?,
            f1: parse_opt(&fields[7], "f1")?,
            auc: parse_opt(&fields[8], "auc")?,
            ap: parse_opt(&fields[9], "ap")?,
            recall_at_p70: parse_opt(&fields[10], "recall_at_p70")?,
            recall_at_p90: parse_opt(&fields[11], "recall_at_p90")?,
            anomalies_excluded: parse_opt(&fields[12], "anomalies_excluded")?,
            normals_excluded: parse_opt(&fields[13], "normals_excluded")?,
            error: (!fields[14].is_empty()).then(|| fields[14].clone()),
        });
    }
    Ok(runs)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| StocError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| StocError::Checkpoint(e.to_string()))
}

/// Files written by a successful `run`.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report_json: PathBuf,
    pub runs_csv: PathBuf,
    pub curves_csv: PathBuf,
    pub manifest_json: PathBuf,
    pub report: MetricsReport,
}

/// Execute the configured grid and write `report.json`, `runs.csv`,
/// `curves.csv`, and `manifest.json` under the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let resolved = config.resolve()?;
    let out_dir = &resolved.config.out_dir;
    fs::create_dir_all(out_dir).map_err(|source| StocError::Io {
        path: out_dir.clone(),
        source,
    })?;
    if resolved.config.checkpoints {
        fs::create_dir_all(out_dir.join("checkpoints")).map_err(|source| StocError::Io {
            path: out_dir.join("checkpoints"),
            source,
        })?;
    }

    let table = resolved.load_table()?;
    let report = run_protocol(&table, &resolved.protocol())?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }

    let manifest = Manifest {
        artifact_version: ARTIFACT_VERSION.to_string(),
        config_hash: config_hash(&resolved.config)?,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs()),
        config: resolved.config.clone(),
    };

    let artifacts = RunArtifacts {
        report_json: out_dir.join("report.json"),
        runs_csv: out_dir.join("runs.csv"),
        curves_csv: out_dir.join("curves.csv"),
        manifest_json: out_dir.join("manifest.json"),
        report,
    };
    write_file(&artifacts.report_json, &to_json_pretty(&artifacts.report)?)?;
    write_file(&artifacts.runs_csv, &runs_to_csv(&artifacts.report.runs))?;
    write_file(
        &artifacts.curves_csv,
        &curves_to_csv(&artifacts.report.aggregates),
    )?;
    write_file(&artifacts.manifest_json, &to_json_pretty(&manifest)?)?;
    Ok(artifacts)
}

/// Summary emitted next to the refined-index file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineSummary {
    pub dataset: String,
    pub rows: usize,
    pub kept: usize,
    pub rejected: usize,
    pub gamma: f64,
    pub ensemble_count: usize,
    pub partition_seed: u64,
    pub thresholds: Vec<f64>,
}

/// Run the refinement stage alone on the whole dataset file (standardized
/// against itself) and write per-row verdicts plus the per-classifier
/// thresholds: `refined.csv` and `refine_summary.json`.
pub fn refine_only(config: &ExperimentConfig) -> Result<(PathBuf, RefineSummary)> {
    let resolved = config.resolve()?;
    let out_dir = &resolved.config.out_dir;
    fs::create_dir_all(out_dir).map_err(|source| StocError::Io {
        path: out_dir.clone(),
        source,
    })?;

    let table = resolved.load_table()?;
    let scaler = Scaler::fit(table.features())?;
    let standardized = scaler.transform(table.features())?;
    let gamma = resolved
        .config
        .gamma
        .unwrap_or_else(|| gamma_policy(resolved.config.ratios.first().copied().unwrap_or(0.0)));
    let refinement = RefinementConfig::new(
        resolved.config.ensemble_count,
        gamma,
        derive_seed(resolved.config.master_seed, "partition", 0),
    );
    let refined = refine_data(&standardized, &IdentityFeatures, &refinement, 0)?;

    let mut csv = String::from("row_index,fold,pseudo_label,verdict\n");
    for (i, (&pseudo, &fold)) in refined
        .pseudo_labels
        .iter()
        .zip(&refined.fold_assignment)
        .enumerate()
    {
        let verdict = if pseudo == 0 { "kept" } else { "rejected" };
        let _ = writeln!(csv, "{i},{fold},{pseudo},{verdict}");
    }
    let refined_path = out_dir.join("refined.csv");
    write_file(&refined_path, &csv)?;

    let summary = RefineSummary {
        dataset: table.name().to_string(),
        rows: table.len(),
        kept: refined.kept_indices.len(),
        rejected: refined.rejected_count(),
        gamma,
        ensemble_count: refinement.ensemble_count,
        partition_seed: refinement.partition_seed,
        thresholds: refined.thresholds.clone(),
    };
    write_file(&out_dir.join("refine_summary.json"), &to_json_pretty(&summary)?)?;
    Ok((refined_path, summary))
}

/// Re-aggregate an existing `runs.csv` into `report.json` and
/// `curves.csv` under the output directory.
pub fn report_from_runs(runs_csv: &Path, out_dir: &Path) -> Result<MetricsReport> {
    let text = fs::read_to_string(runs_csv).map_err(|source| StocError::Io {
        path: runs_csv.to_path_buf(),
        source,
    })?;
    let runs = parse_runs_csv(&text, runs_csv)?;
    let (aggregates, warnings) = aggregate_runs(&runs);
    let report = MetricsReport {
        runs,
        aggregates,
        warnings,
    };
    fs::create_dir_all(out_dir).map_err(|source| StocError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    write_file(&out_dir.join("report.json"), &to_json_pretty(&report)?)?;
    write_file(&out_dir.join("curves.csv"), &curves_to_csv(&report.aggregates))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_the_benchmarks() {
        for name in ["kdd", "kdd-rev", "thyroid", "arrhythmia", "synth"] {
            assert!(dataset_defaults(name).is_some());
        }
        assert!(dataset_defaults("cifar10").is_none());
        assert_eq!(dataset_defaults("thyroid").unwrap().transform_count, 256);
        assert_eq!(dataset_defaults("thyroid").unwrap().train_steps, 1 << 16);
        assert_eq!(dataset_defaults("kdd").unwrap().transform_count, 32);
        assert_eq!(dataset_defaults("kdd").unwrap().train_steps, 1 << 10);
        assert_eq!(dataset_defaults("kdd-rev").unwrap().max_ratio, 0.025);
    }

    #[test]
    fn resolve_names_offending_fields() {
        let mut config = ExperimentConfig {
            gamma: Some(1.5),
            ..ExperimentConfig::default()
        };
        let msg = config.resolve().unwrap_err().to_string();
        assert!(msg.contains("gamma"), "{msg}");

        config.gamma = None;
        config.scale_factor = 0.0;
        let msg = config.resolve().unwrap_err().to_string();
        assert!(msg.contains("scale_factor"), "{msg}");

        config.scale_factor = 1.0;
        config.dataset = "mnist".to_string();
        let msg = config.resolve().unwrap_err().to_string();
        assert!(msg.contains("dataset"), "{msg}");

        config.dataset = "kdd-rev".to_string();
        config.ratios = vec![0.05];
        let msg = config.resolve().unwrap_err().to_string();
        assert!(msg.contains("ratios"), "{msg}");
    }

    #[test]
    fn scale_factor_shrinks_step_budget_only() {
        let config = ExperimentConfig {
            dataset: "thyroid".to_string(),
            scale_factor: 0.01,
            ..ExperimentConfig::default()
        };
        let resolved = config.resolve().unwrap();
        assert_eq!(resolved.repr.train_steps, 656); // ceil(65536 * 0.01)
        assert_eq!(resolved.repr.transform_count, 256);
        // The manifest keeps the unscaled budget.
        assert_eq!(resolved.config.train_steps, Some(65536));
    }

    #[test]
    fn csv_round_trips_records() {
        let runs = vec![
            RunRecord {
                mode: Mode::StocFull,
                anomaly_ratio: 0.05,
                split_index: 1,
                seed_index: 2,
                split_seed: 3,
                model_seed: 4,
                gamma: 0.1,
                f1: Some(75.125),
                auc: Some(91.0),
                ap: Some(40.5),
                recall_at_p70: Some(100.0),
                recall_at_p90: Some(0.0),
                anomalies_excluded: Some(0.9),
                normals_excluded: Some(0.125),
                error: None,
            },
            RunRecord {
                mode: Mode::RawBaseline,
                anomaly_ratio: 0.0,
                split_index: 0,
                seed_index: 0,
                split_seed: 9,
                model_seed: 10,
                gamma: 0.005,
                f1: None,
                auc: None,
                ap: None,
                recall_at_p70: None,
                recall_at_p90: None,
                anomalies_excluded: None,
                normals_excluded: None,
                error: Some("not enough rows to fit: have 3, need 10".to_string()),
            },
        ];
        let csv = runs_to_csv(&runs);
        let parsed = parse_runs_csv(&csv, Path::new("runs.csv")).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].mode, Mode::StocFull);
        assert_eq!(parsed[0].f1, Some(75.125));
        assert_eq!(parsed[1].error.as_deref(), Some("not enough rows to fit: have 3, need 10"));
        assert_eq!(parsed[1].ap, None);
    }

    #[test]
    fn quoted_csv_fields_survive() {
        assert_eq!(
            split_csv_line("a,\"b,c\",\"d\"\"e\""),
            vec!["a", "b,c", "d\"e"]
        );
    }

    #[test]
    fn manifest_or_config_both_load() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::default();
        let config_path = dir.path().join("config.json");
        fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();
        assert_eq!(load_config(&config_path).unwrap(), config);

        let manifest = Manifest {
            artifact_version: "x".to_string(),
            config_hash: "0".to_string(),
            created_unix: Some(1),
            config: config.clone(),
        };
        let manifest_path = dir.path().join("manifest.json");
        fs::write(&manifest_path, serde_json::to_string(&manifest).unwrap()).unwrap();
        assert_eq!(load_config(&manifest_path).unwrap(), config);
    }
}
