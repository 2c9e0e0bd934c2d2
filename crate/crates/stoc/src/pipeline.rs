//! Pipeline orchestration: baseline fits, single-pass refinement on fixed
//! features, and the full self-training loop that interleaves
//! representation updates with scheduled refinements.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StocError};
use crate::matrix::Matrix;
use crate::occ::GdeModel;
use crate::refine::{refine_data, FeatureExtractor, IdentityFeatures, RefinedSet, RefinementConfig};
use crate::repr::{ReprHyper, ReprModel};
use crate::seed::derive_seed;

/// Gamma used by the auto policy when the assumed contamination is zero.
pub const GAMMA_FLOOR: f64 = 0.005;

/// Default threshold policy: twice the assumed contamination of the
/// training pool, with a small floor when the assumed ratio is zero. The
/// assumed ratio is a configuration input, never read from labels.
pub fn gamma_policy(assumed_ratio: f64) -> f64 {
    if assumed_ratio <= 0.0 {
        GAMMA_FLOOR
    } else {
        (2.0 * assumed_ratio).min(1.0)
    }
}

/// Refinement epochs 1, 2, 5, 10, 20, 50, 100, 500, then every 500th.
pub fn default_refinement_schedule(total_epochs: usize) -> Vec<usize> {
    let mut schedule: Vec<usize> = [1, 2, 5, 10, 20, 50, 100, 500]
        .into_iter()
        .filter(|&e| e <= total_epochs)
        .collect();
    let mut next = 1000;
    while next <= total_epochs {
        schedule.push(next);
        next += 500;
    }
    schedule
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// GDE on raw features, fitted on the full pool.
    RawBaseline,
    /// One refinement pass on raw features, then GDE on the kept rows.
    RawStocFixed,
    /// Trained representation on the full pool, no refinement.
    Baseline,
    /// Representation trained on the full pool, then a single refinement
    /// with the trained features before fitting the final scorer.
    StocFixed,
    /// Full self-training: scheduled refinements replace the training pool
    /// while the representation keeps training warm-started.
    StocFull,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::RawBaseline,
        Mode::RawStocFixed,
        Mode::Baseline,
        Mode::StocFixed,
        Mode::StocFull,
    ];

    pub fn uses_representation(self) -> bool {
        matches!(self, Mode::Baseline | Mode::StocFixed | Mode::StocFull)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::RawBaseline => "raw-baseline",
            Mode::RawStocFixed => "raw-stoc-fixed",
            Mode::Baseline => "baseline",
            Mode::StocFixed => "stoc-fixed",
            Mode::StocFull => "stoc-full",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = StocError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw-baseline" => Ok(Mode::RawBaseline),
            "raw-stoc-fixed" | "raw-stoc" => Ok(Mode::RawStocFixed),
            "baseline" => Ok(Mode::Baseline),
            "stoc-fixed" => Ok(Mode::StocFixed),
            "stoc-full" => Ok(Mode::StocFull),
            other => Err(StocError::invalid(
                "mode",
                format!("unknown mode `{other}` (expected one of raw-baseline, raw-stoc-fixed, baseline, stoc-fixed, stoc-full)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StocConfig {
    pub mode: Mode,
    pub refinement: RefinementConfig,
    pub repr: ReprHyper,
    /// Epochs at which the full self-training mode re-refines the pool.
    pub refinement_schedule: Vec<usize>,
    /// Root of every derived stream: bank, parameter init, batch
    /// shuffling, and ensemble partitions.
    pub master_seed: u64,
}

impl StocConfig {
    pub fn new(mode: Mode, gamma: f64, master_seed: u64) -> Self {
        let repr = ReprHyper::large_tabular();
        let total_epochs = repr.train_steps; // upper bound; refined per fit
        StocConfig {
            mode,
            refinement: RefinementConfig::new(crate::refine::DEFAULT_ENSEMBLE_COUNT, gamma, 0),
            repr,
            refinement_schedule: default_refinement_schedule(total_epochs),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.refinement.validate()?;
        if self.mode.uses_representation() {
            self.repr.validate()?;
        }
        if self.refinement_schedule.contains(&0) {
            return Err(StocError::invalid(
                "refinement_schedule",
                "epochs are 1-based; 0 is not a valid entry",
            ));
        }
        Ok(())
    }

    /// Refinement config with the partition stream derived from the
    /// master seed.
    fn effective_refinement(&self) -> RefinementConfig {
        RefinementConfig {
            ensemble_count: self.refinement.ensemble_count,
            gamma: self.refinement.gamma,
            partition_seed: derive_seed(self.master_seed, "partition", 0),
        }
    }
}

/// One refinement pass, as recorded in the pipeline diagnostics. Hidden
/// labels never enter the fit; exclusion fractions are computed after the
/// fact from the stored pseudo-labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementEvent {
    pub call_index: u64,
    /// Epoch the pass ran before, or `None` for the final pass.
    pub epoch: Option<usize>,
    pub kept: usize,
    pub rejected: usize,
    pub thresholds: Vec<f64>,
    pub pseudo_labels: Vec<u8>,
}

impl RefinementEvent {
    fn from_refined(refined: &RefinedSet, call_index: u64, epoch: Option<usize>) -> Self {
        RefinementEvent {
            call_index,
            epoch,
            kept: refined.kept_indices.len(),
            rejected: refined.rejected_count(),
            thresholds: refined.thresholds.clone(),
            pseudo_labels: refined.pseudo_labels.clone(),
        }
    }

    /// Fraction of true anomalies and of true normals this pass excluded,
    /// given the hidden training labels.
    pub fn exclusion_fractions(&self, hidden_labels: &[u8]) -> (f64, f64) {
        assert_eq!(hidden_labels.len(), self.pseudo_labels.len());
        let mut anomalies = 0usize;
        let mut normals = 0usize;
        let mut excluded_anomalies = 0usize;
        let mut excluded_normals = 0usize;
        for (&truth, &pseudo) in hidden_labels.iter().zip(&self.pseudo_labels) {
            if truth == 1 {
                anomalies += 1;
                excluded_anomalies += usize::from(pseudo == 1);
            } else {
                normals += 1;
                excluded_normals += usize::from(pseudo == 1);
            }
        }
        let frac = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        (
            frac(excluded_anomalies, anomalies),
            frac(excluded_normals, normals),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum FinalModel {
    Gde(GdeModel),
    Repr(ReprModel),
}

/// A fitted pipeline: the final scorer plus refinement diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StocPipeline {
    pub config: StocConfig,
    final_model: FinalModel,
    pub diagnostics: Vec<RefinementEvent>,
    /// Checkpoint format version.
    pub version: u32,
}

pub const PIPELINE_VERSION: u32 = 1;

impl StocPipeline {
    /// Fit according to `config.mode`.
    pub fn fit(train: &Matrix, config: &StocConfig) -> Result<Self> {
        config.validate()?;
        match config.mode {
            Mode::RawBaseline | Mode::Baseline => fit_baseline(train, config),
            Mode::RawStocFixed => fit_stoc_fixed(train, &IdentityFeatures, config),
            Mode::StocFixed => {
                let (model, _, _) = train_representation(train, config, false)?;
                finish_with_refined_repr(train, model, Vec::new(), 0, config)
            }
            Mode::StocFull => fit_stoc_full(train, config),
        }
    }

    /// Per-row anomaly scores from the installed final classifier.
    pub fn predict(&self, queries: &Matrix) -> Result<Vec<f64>> {
        let expected = match &self.final_model {
            FinalModel::Gde(m) => m.dims(),
            FinalModel::Repr(m) => m.input_dim(),
        };
        if queries.cols() != expected {
            return Err(StocError::DimensionMismatch {
                expected,
                actual: queries.cols(),
            });
        }
        match &self.final_model {
            FinalModel::Gde(m) => Ok(queries.iter_rows().map(|r| m.score(r)).collect()),
            FinalModel::Repr(m) => queries.iter_rows().map(|r| m.score(r)).collect(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    /// The trained representation, for the modes that have one.
    pub fn repr_model(&self) -> Option<&ReprModel> {
        match &self.final_model {
            FinalModel::Repr(m) => Some(m),
            FinalModel::Gde(_) => None,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)
            .map_err(|e| StocError::Checkpoint(e.to_string()))?;
        std::fs::write(path, json).map_err(|source| StocError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|source| StocError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&json).map_err(|e| StocError::Checkpoint(e.to_string()))
    }
}

/// Train the scorer on the full pool with no refinement: plain GDE for the
/// raw mode, the trained representation with per-transformation GDEs
/// otherwise.
pub fn fit_baseline(train: &Matrix, config: &StocConfig) -> Result<StocPipeline> {
    config.validate()?;
    let final_model = if config.mode.uses_representation() {
        let (mut model, _, _) = train_representation(train, config, false)?;
        model.finalize(train)?;
        FinalModel::Repr(model)
    } else {
        FinalModel::Gde(GdeModel::fit_auto(train)?)
    };
    Ok(StocPipeline {
        config: config.clone(),
        final_model,
        diagnostics: Vec::new(),
        version: PIPELINE_VERSION,
    })
}

/// Single refinement pass on fixed extractor features, then a GDE fitted
/// on the kept rows only.
pub fn fit_stoc_fixed(
    train: &Matrix,
    extractor: &dyn FeatureExtractor,
    config: &StocConfig,
) -> Result<StocPipeline> {
    config.validate()?;
    let refinement = config.effective_refinement();
    let refined = refine_data(train, extractor, &refinement, 0)?;
    if refined.kept_indices.len() < 2 {
        return Err(StocError::RefinedSetCollapse {
            kept: refined.kept_indices.len(),
            needed: 2,
        });
    }
    let kept = train.select_rows(&refined.kept_indices);
    let event = RefinementEvent::from_refined(&refined, 0, None);
    Ok(StocPipeline {
        config: config.clone(),
        final_model: FinalModel::Gde(GdeModel::fit_auto(&kept)?),
        diagnostics: vec![event],
        version: PIPELINE_VERSION,
    })
}

/// Full self-training: train the representation epoch by epoch, re-refine
/// the pool at scheduled epochs with the current features (warm-starting
/// the network), then run a final refinement and fit the per-transformation
/// scorers on the kept rows.
pub fn fit_stoc_full(train: &Matrix, config: &StocConfig) -> Result<StocPipeline> {
    config.validate()?;
    let (model, events, next_call) = train_representation(train, config, true)?;
    finish_with_refined_repr(train, model, events, next_call, config)
}

fn finish_with_refined_repr(
    train: &Matrix,
    mut model: ReprModel,
    mut events: Vec<RefinementEvent>,
    call_index: u64,
    config: &StocConfig,
) -> Result<StocPipeline> {
    let refinement = config.effective_refinement();
    let refined = refine_data(train, &model, &refinement, call_index)?;
    if refined.kept_indices.len() < 2 {
        return Err(StocError::RefinedSetCollapse {
            kept: refined.kept_indices.len(),
            needed: 2,
        });
    }
    events.push(RefinementEvent::from_refined(&refined, call_index, None));
    model.finalize(&train.select_rows(&refined.kept_indices))?;
    Ok(StocPipeline {
        config: config.clone(),
        final_model: FinalModel::Repr(model),
        diagnostics: events,
        version: PIPELINE_VERSION,
    })
}

/// Epoch-by-epoch training loop. One epoch is `ceil(N / batch_rows)` steps
/// over the original pool size N, regardless of how far refinement has
/// shrunk the active pool. Scheduled refinements run at the start of their
/// epoch, before that epoch's gradient steps, and every refinement pass
/// re-scores all N rows so rejected rows may re-enter later.
fn train_representation(
    train: &Matrix,
    config: &StocConfig,
    use_schedule: bool,
) -> Result<(ReprModel, Vec<RefinementEvent>, u64)> {
    let n = train.rows();
    if n == 0 {
        return Err(StocError::TooFewRows { rows: 0, needed: 2 });
    }
    let hyper = &config.repr;
    let mut model = ReprModel::init(
        train.cols(),
        hyper,
        derive_seed(config.master_seed, "repr", 0),
    )?;
    let refinement = config.effective_refinement();
    let schedule: BTreeSet<usize> = if use_schedule {
        config.refinement_schedule.iter().copied().collect()
    } else {
        BTreeSet::new()
    };

    let epoch_len = n.div_ceil(hyper.batch_rows);
    let mut shuffle_rng =
        ChaCha8Rng::seed_from_u64(derive_seed(config.master_seed, "shuffle", 0));
    let mut pool: Vec<usize> = (0..n).collect();
    let mut events = Vec::new();
    let mut call_index = 0u64;
    let mut step = 0usize;
    let mut epoch = 0usize;
    let mut batch = Vec::with_capacity(hyper.batch_rows);

    while step < hyper.train_steps {
        epoch += 1;
        if schedule.contains(&epoch) {
            let refined = refine_data(train, &model, &refinement, call_index)?;
            if refined.kept_indices.len() < 2 {
                return Err(StocError::RefinedSetCollapse {
                    kept: refined.kept_indices.len(),
                    needed: 2,
                });
            }
            events.push(RefinementEvent::from_refined(
                &refined,
                call_index,
                Some(epoch),
            ));
            pool = refined.kept_indices;
            call_index += 1;
        }

        let mut order = pool.clone();
        order.shuffle(&mut shuffle_rng);
        let quota = epoch_len.min(hyper.train_steps - step);
        for s in 0..quota {
            batch.clear();
            for j in 0..hyper.batch_rows {
                let idx = order[(s * hyper.batch_rows + j) % order.len()];
                batch.push(train.row(idx));
            }
            model.train_step(&batch).map_err(|e| match e {
                StocError::Diverged { .. } => StocError::Diverged { step },
                other => other,
            })?;
            step += 1;
        }
    }
    Ok((model, events, call_index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_split, synth_blobs};

    fn raw_config(mode: Mode, gamma: f64, seed: u64) -> StocConfig {
        StocConfig::new(mode, gamma, seed)
    }

    fn small_repr_config(mode: Mode, gamma: f64, seed: u64) -> StocConfig {
        let mut config = StocConfig::new(mode, gamma, seed);
        config.repr = ReprHyper::new(8, 150);
        config.repr.proj_dim = 8;
        config.refinement_schedule = vec![1, 2, 5, 10, 20];
        config
    }

    #[test]
    fn raw_baseline_equals_plain_gde() {
        let table = synth_blobs(80, 8, 4, 5.0, 1).unwrap();
        let pipeline =
            StocPipeline::fit(table.features(), &raw_config(Mode::RawBaseline, 0.2, 3)).unwrap();
        let gde = GdeModel::fit_auto(table.features()).unwrap();
        let scores = pipeline.predict(table.features()).unwrap();
        for (row, &s) in table.features().iter_rows().zip(&scores) {
            assert_eq!(s.to_bits(), gde.score(row).to_bits());
        }
        assert!(pipeline.diagnostics.is_empty());
    }

    #[test]
    fn gamma_zero_collapses_every_mode_to_its_baseline() {
        let table = synth_blobs(90, 9, 4, 5.0, 2).unwrap();
        let queries = synth_blobs(20, 2, 4, 5.0, 99).unwrap();

        let raw_base =
            StocPipeline::fit(table.features(), &raw_config(Mode::RawBaseline, 0.0, 7)).unwrap();
        let raw_fixed =
            StocPipeline::fit(table.features(), &raw_config(Mode::RawStocFixed, 0.0, 7)).unwrap();
        assert_eq!(
            raw_base.predict(queries.features()).unwrap(),
            raw_fixed.predict(queries.features()).unwrap()
        );

        let base =
            StocPipeline::fit(table.features(), &small_repr_config(Mode::Baseline, 0.0, 7))
                .unwrap();
        for mode in [Mode::StocFixed, Mode::StocFull] {
            let refined =
                StocPipeline::fit(table.features(), &small_repr_config(mode, 0.0, 7)).unwrap();
            assert_eq!(
                base.predict(queries.features()).unwrap(),
                refined.predict(queries.features()).unwrap(),
                "gamma=0 {mode} must equal baseline"
            );
        }
    }

    #[test]
    fn empty_schedule_full_matches_baseline() {
        let table = synth_blobs(70, 7, 4, 5.0, 3).unwrap();
        let mut config = small_repr_config(Mode::StocFull, 0.0, 11);
        config.refinement_schedule.clear();
        let full = StocPipeline::fit(table.features(), &config).unwrap();
        let base =
            StocPipeline::fit(table.features(), &small_repr_config(Mode::Baseline, 0.0, 11))
                .unwrap();
        assert_eq!(
            full.predict(table.features()).unwrap(),
            base.predict(table.features()).unwrap()
        );
        // Only the final refinement ran.
        assert_eq!(full.diagnostics.len(), 1);
        assert_eq!(full.diagnostics[0].epoch, None);
    }

    #[test]
    fn diagnostics_record_every_scheduled_pass_plus_final() {
        let table = synth_blobs(100, 10, 4, 5.0, 4).unwrap();
        let mut config = small_repr_config(Mode::StocFull, 0.1, 13);
        // 100 rows + 10 anomalies -> epoch_len = ceil(110/64) = 2 steps;
        // 150 steps -> 75 epochs; schedule entries reached: 1,2,5,10,20.
        let pipeline = StocPipeline::fit(table.features(), &config).unwrap();
        assert_eq!(pipeline.diagnostics.len(), 5 + 1);
        let epochs: Vec<Option<usize>> =
            pipeline.diagnostics.iter().map(|e| e.epoch).collect();
        assert_eq!(
            epochs,
            vec![Some(1), Some(2), Some(5), Some(10), Some(20), None]
        );
        for (i, event) in pipeline.diagnostics.iter().enumerate() {
            assert_eq!(event.call_index, i as u64);
            assert_eq!(event.kept + event.rejected, table.len());
        }

        config.refinement_schedule = vec![1, 3];
        let pipeline = StocPipeline::fit(table.features(), &config).unwrap();
        assert_eq!(pipeline.diagnostics.len(), 3);
    }

    #[test]
    fn full_mode_excludes_planted_anomalies() {
        let table = synth_blobs(600, 60, 8, 6.0, 5).unwrap();
        let split = make_split(&table, 0.10, 21, 22).unwrap();
        let config = small_repr_config(Mode::StocFull, 0.2, 23);
        let pipeline = StocPipeline::fit(&split.train_features, &config).unwrap();
        let hidden = split.hidden_train_labels();

        let (first_anomalies, _) = pipeline.diagnostics[0].exclusion_fractions(hidden);
        let last = pipeline.diagnostics.last().unwrap();
        let (final_anomalies, final_normals) = last.exclusion_fractions(hidden);
        assert!(
            final_anomalies >= 0.8,
            "final refinement excluded only {final_anomalies:.2} of anomalies"
        );
        assert!(final_normals <= 0.5, "normals over-excluded: {final_normals:.2}");
        assert!(final_anomalies >= first_anomalies - 1e-9);
    }

    #[test]
    fn refined_pool_is_always_a_subset_of_train_rows() {
        let table = synth_blobs(120, 12, 4, 5.0, 6).unwrap();
        let config = small_repr_config(Mode::StocFull, 0.15, 17);
        let pipeline = StocPipeline::fit(table.features(), &config).unwrap();
        for event in &pipeline.diagnostics {
            assert_eq!(event.pseudo_labels.len(), table.len());
            assert!(event.kept <= table.len());
        }
    }

    #[test]
    fn predict_is_pure_and_row_independent() {
        let table = synth_blobs(60, 6, 4, 5.0, 7).unwrap();
        let pipeline =
            StocPipeline::fit(table.features(), &raw_config(Mode::RawStocFixed, 0.1, 5)).unwrap();
        let queries = synth_blobs(15, 5, 4, 5.0, 55).unwrap();
        let a = pipeline.predict(queries.features()).unwrap();
        let b = pipeline.predict(queries.features()).unwrap();
        assert_eq!(a, b);

        let perm: Vec<usize> = (0..queries.len()).rev().collect();
        let permuted = queries.features().select_rows(&perm);
        let c = pipeline.predict(&permuted).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert_eq!(c[i], a[p]);
        }
    }

    #[test]
    fn labels_influence_nothing_in_fit() {
        // Same features, different labels: the fit sees only the matrix,
        // so scores are identical.
        let table = synth_blobs(60, 6, 4, 5.0, 8).unwrap();
        let config = raw_config(Mode::RawStocFixed, 0.2, 9);
        let a = StocPipeline::fit(table.features(), &config).unwrap();
        let relabeled = crate::data::LabeledTable::new(
            table.features().clone(),
            vec![0; table.len()],
            "relabeled",
        )
        .unwrap();
        let b = StocPipeline::fit(relabeled.features(), &config).unwrap();
        assert_eq!(
            a.predict(table.features()).unwrap(),
            b.predict(table.features()).unwrap()
        );
    }

    #[test]
    fn master_seed_reproduces_full_runs() {
        let table = synth_blobs(80, 8, 4, 5.0, 10).unwrap();
        let config = small_repr_config(Mode::StocFull, 0.15, 41);
        let a = StocPipeline::fit(table.features(), &config).unwrap();
        let b = StocPipeline::fit(table.features(), &config).unwrap();
        let sa = a.predict(table.features()).unwrap();
        let sb = b.predict(table.features()).unwrap();
        assert_eq!(sa, sb);

        let other = small_repr_config(Mode::StocFull, 0.15, 42);
        let c = StocPipeline::fit(table.features(), &other).unwrap();
        assert_ne!(sa, c.predict(table.features()).unwrap());
    }

    #[test]
    fn pipeline_checkpoint_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pipeline.json");
        let table = synth_blobs(60, 6, 4, 5.0, 12).unwrap();
        let config = small_repr_config(Mode::StocFull, 0.1, 19);
        let pipeline = StocPipeline::fit(table.features(), &config).unwrap();
        pipeline.save(&path).unwrap();
        let restored = StocPipeline::load(&path).unwrap();
        assert_eq!(pipeline, restored);
        assert_eq!(
            pipeline.predict(table.features()).unwrap(),
            restored.predict(table.features()).unwrap()
        );
    }

    #[test]
    fn schedule_and_policy_helpers() {
        assert_eq!(
            default_refinement_schedule(2200),
            vec![1, 2, 5, 10, 20, 50, 100, 500, 1000, 1500, 2000]
        );
        assert_eq!(default_refinement_schedule(3), vec![1, 2]);
        assert_eq!(default_refinement_schedule(0), Vec::<usize>::new());
        assert_eq!(gamma_policy(0.0), GAMMA_FLOOR);
        assert_eq!(gamma_policy(0.1), 0.2);
        assert_eq!(gamma_policy(0.6), 1.0);
    }

    #[test]
    fn collapse_is_reported() {
        // Gamma 1 flags every row in every classifier: nothing survives.
        let table = synth_blobs(40, 4, 3, 5.0, 13).unwrap();
        let config = raw_config(Mode::RawStocFixed, 1.0, 3);
        assert!(matches!(
            StocPipeline::fit(table.features(), &config),
            Err(StocError::RefinedSetCollapse { .. })
        ));
    }
}
