use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use stoc::cli::{self, ExperimentConfig};
use stoc::pipeline::Mode;

#[derive(Parser)]
#[command(name = "stoc", version, about = "Self-trained one-class classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment grid and write report/CSV artifacts.
    Run(ConfigArgs),
    /// Validate a configuration without running anything.
    Validate(ConfigArgs),
    /// Run the data-refinement stage alone and write per-row verdicts.
    RefineOnly(ConfigArgs),
    /// Re-aggregate an existing runs.csv into report.json and curves.csv.
    Report(ReportArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file (plain config or a previously written manifest).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Dataset name: kdd, kdd-rev, thyroid, arrhythmia, synth, custom.
    #[arg(long)]
    dataset: Option<String>,

    /// Path to the dataset file (defaults to data/<dataset>.csv).
    #[arg(long)]
    data_path: Option<PathBuf>,

    /// Comma-separated contamination ratios, e.g. 0,0.05,0.1.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,

    /// Percentile threshold: a number in [0,1] or `auto`.
    #[arg(long)]
    gamma: Option<String>,

    /// Ensemble count K.
    #[arg(long)]
    k: Option<usize>,

    /// Comma-separated modes: raw-baseline, raw-stoc-fixed, baseline,
    /// stoc-fixed, stoc-full.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<Mode>>,

    #[arg(long)]
    splits: Option<usize>,

    #[arg(long)]
    seeds: Option<usize>,

    /// Multiplies the representation step budget; (0, 1].
    #[arg(long)]
    scale_factor: Option<f64>,

    /// Number of random transformations M.
    #[arg(long)]
    transform_count: Option<usize>,

    /// Unscaled representation step budget.
    #[arg(long)]
    train_steps: Option<usize>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (0 = available parallelism).
    #[arg(long)]
    workers: Option<usize>,

    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Save per-run pipeline checkpoints under <out>/checkpoints/.
    #[arg(long)]
    checkpoints: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Existing runs.csv to re-aggregate.
    #[arg(long)]
    runs: PathBuf,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl ConfigArgs {
    fn build(self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => cli::load_config(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(dataset) = self.dataset {
            config.dataset = dataset;
        }
        if let Some(path) = self.data_path {
            config.data_path = Some(path);
        }
        if let Some(ratios) = self.ratios {
            config.ratios = ratios;
        }
        if let Some(gamma) = self.gamma {
            config.gamma = match gamma.as_str() {
                "auto" => None,
                value => Some(
                    value
                        .parse()
                        .with_context(|| format!("invalid --gamma `{value}`"))?,
                ),
            };
        }
        if let Some(k) = self.k {
            config.ensemble_count = k;
        }
        if let Some(modes) = self.modes {
            config.modes = modes;
        }
        if let Some(splits) = self.splits {
            config.splits = splits;
        }
        if let Some(seeds) = self.seeds {
            config.seeds = seeds;
        }
        if let Some(scale) = self.scale_factor {
            config.scale_factor = scale;
        }
        if let Some(m) = self.transform_count {
            config.transform_count = Some(m);
        }
        if let Some(steps) = self.train_steps {
            config.train_steps = Some(steps);
        }
        if let Some(out) = self.out {
            config.out_dir = out;
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if self.checkpoints {
            config.checkpoints = true;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let config = args.build()?;
            let artifacts = cli::run_experiment(&config)?;
            println!("report:   {}", artifacts.report_json.display());
            println!("runs:     {}", artifacts.runs_csv.display());
            println!("curves:   {}", artifacts.curves_csv.display());
            println!("manifest: {}", artifacts.manifest_json.display());
            for aggregate in &artifacts.report.aggregates {
                println!(
                    "{} ratio {:.3}: F1 {:.1} +/- {:.1}  AUC {:.1}  AP {:.1}  ({} runs, {} failed)",
                    aggregate.mode,
                    aggregate.anomaly_ratio,
                    aggregate.f1.mean,
                    aggregate.f1.std,
                    aggregate.auc.mean,
                    aggregate.ap.mean,
                    aggregate.runs,
                    aggregate.failed
                );
            }
            Ok(())
        }
        Command::Validate(args) => {
            let config = args.build()?;
            config.resolve()?;
            println!("configuration is valid");
            Ok(())
        }
        Command::RefineOnly(args) => {
            let config = args.build()?;
            let (path, summary) = cli::refine_only(&config)?;
            println!(
                "refined {} rows: kept {}, rejected {} (gamma {}) -> {}",
                summary.rows,
                summary.kept,
                summary.rejected,
                summary.gamma,
                path.display()
            );
            Ok(())
        }
        Command::Report(args) => {
            let report = cli::report_from_runs(&args.runs, &args.out)?;
            println!(
                "aggregated {} runs into {} configurations",
                report.runs.len(),
                report.aggregates.len()
            );
            Ok(())
        }
    }
}
