//! Trainable representation: a bank of M random projections, a small
//! dense feature network, and a softmax head trained to classify which
//! projection transformed a sample. After training, one GDE per
//! transformation is fitted on the network's features and queries are
//! scored by the best (most normal) transformation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StocError};
use crate::matrix::Matrix;
use crate::occ::GdeModel;
use crate::refine::FeatureExtractor;
use crate::seed::derive_seed;

/// Width of every hidden layer and of the output features.
pub const HIDDEN_WIDTH: usize = 8;
/// Number of affine layers in the feature network.
pub const NET_LAYERS: usize = 5;
/// Negative-side slope of the LeakyReLU after every layer.
pub const LEAKY_SLOPE: f64 = 0.2;

pub const DEFAULT_PROJ_DIM: usize = 32;
pub const DEFAULT_LEARNING_RATE: f64 = 1e-3;
pub const DEFAULT_MOMENTUM: f64 = 0.9;
pub const DEFAULT_WEIGHT_DECAY: f64 = 3e-5;
pub const DEFAULT_BATCH_ROWS: usize = 64;

#[inline]
fn leaky_relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

#[inline]
fn leaky_relu_slope(pre: f64) -> f64 {
    if pre > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// Representation hyperparameters. The per-dataset values mirror the
/// reference configuration: shared optimizer settings, M and the step
/// budget scaled with dataset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReprHyper {
    /// M, the number of random transformations.
    pub transform_count: usize,
    /// Projection output dimension.
    pub proj_dim: usize,
    pub train_steps: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Raw rows per step; each row yields M classification instances.
    pub batch_rows: usize,
}

impl ReprHyper {
    pub fn new(transform_count: usize, train_steps: usize) -> Self {
        ReprHyper {
            transform_count,
            proj_dim: DEFAULT_PROJ_DIM,
            train_steps,
            learning_rate: DEFAULT_LEARNING_RATE,
            momentum: DEFAULT_MOMENTUM,
            weight_decay: DEFAULT_WEIGHT_DECAY,
            batch_rows: DEFAULT_BATCH_ROWS,
        }
    }

    /// Defaults for the large tabular benchmarks (KDD family).
    pub fn large_tabular() -> Self {
        ReprHyper::new(32, 1 << 10)
    }

    /// Defaults for the small tabular benchmarks (Thyroid, Arrhythmia).
    pub fn small_tabular() -> Self {
        ReprHyper::new(256, 1 << 16)
    }

    pub fn validate(&self) -> Result<()> {
        if self.transform_count == 0 {
            return Err(StocError::invalid("transform_count", "must be positive"));
        }
        if self.proj_dim == 0 {
            return Err(StocError::invalid("proj_dim", "must be positive"));
        }
        if self.batch_rows == 0 {
            return Err(StocError::invalid("batch_rows", "must be positive"));
        }
        for (name, v) in [
            ("learning_rate", self.learning_rate),
            ("momentum", self.momentum),
            ("weight_decay", self.weight_decay),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(StocError::invalid(name, "must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// M fixed random projection matrices, shared by train and test paths.
/// Serialized as seed + shape and regenerated on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "BankSpec", into = "BankSpec")]
pub struct TransformationBank {
    input_dim: usize,
    proj_dim: usize,
    seed: u64,
    mats: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct BankSpec {
    input_dim: usize,
    proj_dim: usize,
    count: usize,
    seed: u64,
}

impl From<BankSpec> for TransformationBank {
    fn from(spec: BankSpec) -> Self {
        TransformationBank::new(spec.input_dim, spec.count, spec.proj_dim, spec.seed)
    }
}

impl From<TransformationBank> for BankSpec {
    fn from(bank: TransformationBank) -> Self {
        BankSpec {
            input_dim: bank.input_dim,
            proj_dim: bank.proj_dim,
            count: bank.mats.len(),
            seed: bank.seed,
        }
    }
}

impl TransformationBank {
    /// Build M projection matrices with i.i.d. standard normal entries,
    /// each matrix drawn from its own derived stream.
    pub fn new(input_dim: usize, count: usize, proj_dim: usize, seed: u64) -> Self {
        assert!(input_dim > 0 && count > 0 && proj_dim > 0, "bank dims must be positive");
        let mats = (0..count)
            .map(|m| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "transform", m as u64));
                (0..proj_dim * input_dim)
                    .map(|_| rng.sample(rand_distr::StandardNormal))
                    .collect()
            })
            .collect();
        TransformationBank {
            input_dim,
            proj_dim,
            seed,
            mats,
        }
    }

    pub fn count(&self) -> usize {
        self.mats.len()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn proj_dim(&self) -> usize {
        self.proj_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self, m: usize) -> &[f64] {
        &self.mats[m]
    }

    /// `out = W_m x`.
    pub fn apply(&self, m: usize, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.input_dim, "bank apply: input dim mismatch");
        assert_eq!(out.len(), self.proj_dim, "bank apply: output dim mismatch");
        let w = &self.mats[m];
        for (r, o) in out.iter_mut().enumerate() {
            let row = &w[r * self.input_dim..(r + 1) * self.input_dim];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Affine {
    in_dim: usize,
    out_dim: usize,
    /// Row-major out_dim x in_dim.
    w: Vec<f64>,
    b: Vec<f64>,
}

impl Affine {
    fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let w = (0..out_dim * in_dim)
            .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * bound)
            .collect();
        Affine {
            in_dim,
            out_dim,
            w,
            b: vec![0.0; out_dim],
        }
    }

    fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Affine {
            in_dim,
            out_dim,
            w: vec![0.0; out_dim * in_dim],
            b: vec![0.0; out_dim],
        }
    }

    fn forward(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.w[r * self.in_dim..(r + 1) * self.in_dim];
            *o = self.b[r] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

/// Five affine layers of width [`HIDDEN_WIDTH`], LeakyReLU after each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    layers: Vec<Affine>,
}

impl DenseNet {
    pub fn init(input_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(NET_LAYERS);
        let mut in_dim = input_dim;
        for _ in 0..NET_LAYERS {
            layers.push(Affine::init(in_dim, HIDDEN_WIDTH, &mut rng));
            in_dim = HIDDEN_WIDTH;
        }
        DenseNet { layers }
    }

    pub fn zeros(input_dim: usize) -> Self {
        let mut layers = Vec::with_capacity(NET_LAYERS);
        let mut in_dim = input_dim;
        for _ in 0..NET_LAYERS {
            layers.push(Affine::zeros(in_dim, HIDDEN_WIDTH));
            in_dim = HIDDEN_WIDTH;
        }
        DenseNet { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    /// Feature vector for one input.
    pub fn features(&self, z: &[f64]) -> Vec<f64> {
        let mut a = z.to_vec();
        let mut out = vec![0.0; HIDDEN_WIDTH];
        for layer in &self.layers {
            layer.forward(&a, &mut out);
            out.iter_mut().for_each(|v| *v = leaky_relu(*v));
            std::mem::swap(&mut a, &mut out);
            out.resize(HIDDEN_WIDTH, 0.0);
        }
        a
    }
}

/// Softmax transformation classifier: one logit per transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierHead {
    classes: usize,
    /// Row-major classes x HIDDEN_WIDTH.
    w: Vec<f64>,
    b: Vec<f64>,
}

impl ClassifierHead {
    pub fn init(classes: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (HIDDEN_WIDTH as f64).sqrt();
        let w = (0..classes * HIDDEN_WIDTH)
            .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * bound)
            .collect();
        ClassifierHead {
            classes,
            w,
            b: vec![0.0; classes],
        }
    }

    pub fn zeros(classes: usize) -> Self {
        ClassifierHead {
            classes,
            w: vec![0.0; classes * HIDDEN_WIDTH],
            b: vec![0.0; classes],
        }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn logits(&self, features: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            let row = &self.w[c * HIDDEN_WIDTH..(c + 1) * HIDDEN_WIDTH];
            *o = self.b[c] + row.iter().zip(features).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

/// Features and logits for one projected input.
pub fn forward(net: &DenseNet, head: &ClassifierHead, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let features = net.features(z);
    let mut logits = vec![0.0; head.classes()];
    head.logits(&features, &mut logits);
    (features, logits)
}

/// Momentum SGD with L2 penalty folded into the gradient:
/// `v = momentum * v + (g + weight_decay * p); p -= learning_rate * v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSgd {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    velocity: Vec<Vec<f64>>,
}

impl MomentumSgd {
    pub fn new(learning_rate: f64, momentum: f64, weight_decay: f64, shapes: &[usize]) -> Self {
        MomentumSgd {
            learning_rate,
            momentum,
            weight_decay,
            velocity: shapes.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }

    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[Vec<f64>]) {
        assert_eq!(params.len(), self.velocity.len(), "optimizer shape mismatch");
        assert_eq!(grads.len(), self.velocity.len(), "gradient shape mismatch");
        for ((param, grad), vel) in params.iter_mut().zip(grads).zip(&mut self.velocity) {
            for ((p, &g), v) in param.iter_mut().zip(grad).zip(vel.iter_mut()) {
                *v = self.momentum * *v + g + self.weight_decay * *p;
                *p -= self.learning_rate * *v;
            }
        }
    }
}

/// The full representation model: bank, network, head, optimizer state,
/// and (after [`ReprModel::finalize`]) one GDE per transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReprModel {
    bank: TransformationBank,
    net: DenseNet,
    head: ClassifierHead,
    optimizer: MomentumSgd,
    hyper: ReprHyper,
    per_transform_gdes: Option<Vec<GdeModel>>,
}

fn param_shapes(net: &DenseNet, head: &ClassifierHead) -> Vec<usize> {
    let mut shapes = Vec::with_capacity(net.layers.len() * 2 + 2);
    for layer in &net.layers {
        shapes.push(layer.w.len());
        shapes.push(layer.b.len());
    }
    shapes.push(head.w.len());
    shapes.push(head.b.len());
    shapes
}

impl ReprModel {
    /// Seeded fan-in initialization; bank and parameter streams derive
    /// from the given seed.
    pub fn init(input_dim: usize, hyper: &ReprHyper, seed: u64) -> Result<Self> {
        hyper.validate()?;
        if input_dim == 0 {
            return Err(StocError::invalid("input_dim", "must be positive"));
        }
        let bank = TransformationBank::new(
            input_dim,
            hyper.transform_count,
            hyper.proj_dim,
            derive_seed(seed, "bank", 0),
        );
        let net = DenseNet::init(hyper.proj_dim, derive_seed(seed, "net-init", 0));
        let mut head_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "head-init", 0));
        let head = ClassifierHead::init(hyper.transform_count, &mut head_rng);
        let optimizer = MomentumSgd::new(
            hyper.learning_rate,
            hyper.momentum,
            hyper.weight_decay,
            &param_shapes(&net, &head),
        );
        Ok(ReprModel {
            bank,
            net,
            head,
            optimizer,
            hyper: hyper.clone(),
            per_transform_gdes: None,
        })
    }

    /// All-zero network and head; the softmax starts exactly uniform.
    pub fn zero_initialized(input_dim: usize, hyper: &ReprHyper, seed: u64) -> Result<Self> {
        let mut model = Self::init(input_dim, hyper, seed)?;
        model.net = DenseNet::zeros(hyper.proj_dim);
        model.head = ClassifierHead::zeros(hyper.transform_count);
        Ok(model)
    }

    pub fn transform_count(&self) -> usize {
        self.bank.count()
    }

    pub fn input_dim(&self) -> usize {
        self.bank.input_dim()
    }

    pub fn hyper(&self) -> &ReprHyper {
        &self.hyper
    }

    pub fn bank(&self) -> &TransformationBank {
        &self.bank
    }

    pub fn net(&self) -> &DenseNet {
        &self.net
    }

    pub fn head(&self) -> &ClassifierHead {
        &self.head
    }

    pub fn is_finalized(&self) -> bool {
        self.per_transform_gdes.is_some()
    }

    pub fn transform_gdes(&self) -> Option<&[GdeModel]> {
        self.per_transform_gdes.as_deref()
    }

    #[cfg(test)]
    pub(crate) fn set_transform_gdes(&mut self, gdes: Vec<GdeModel>) {
        self.per_transform_gdes = Some(gdes);
    }

    /// Network features of `T_m(x)`.
    pub fn features(&self, x: &[f64], m: usize) -> Vec<f64> {
        let mut z = vec![0.0; self.bank.proj_dim()];
        self.bank.apply(m, x, &mut z);
        self.net.features(&z)
    }

    /// Flat views of every parameter tensor, in a fixed order: each layer's
    /// weights then bias, then head weights, then head bias.
    pub fn parameters(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for layer in &self.net.layers {
            out.push(&layer.w);
            out.push(&layer.b);
        }
        out.push(&self.head.w);
        out.push(&self.head.b);
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        collect_params(&mut self.net, &mut self.head)
    }

    /// Mean cross-entropy of classifying the transformation index over
    /// every (row, transformation) instance. Pure; the L2 penalty is not
    /// included (it lives in the optimizer).
    pub fn batch_loss(&self, rows: &[&[f64]]) -> Result<f64> {
        self.batch_pass(rows, None)
    }

    /// Loss plus gradients aligned with [`ReprModel::parameters`].
    pub fn batch_gradients(&self, rows: &[&[f64]]) -> Result<(f64, Vec<Vec<f64>>)> {
        let mut grads: Vec<Vec<f64>> = self.parameters().iter().map(|p| vec![0.0; p.len()]).collect();
        let loss = self.batch_pass(rows, Some(&mut grads))?;
        Ok((loss, grads))
    }

    fn batch_pass(&self, rows: &[&[f64]], mut grads: Option<&mut Vec<Vec<f64>>>) -> Result<f64> {
        if rows.is_empty() {
            return Err(StocError::invalid("batch", "empty batch"));
        }
        let m_count = self.bank.count();
        let layers = &self.net.layers;
        let proj = self.bank.proj_dim();

        let mut z = vec![0.0; proj];
        let mut pre = vec![vec![0.0; HIDDEN_WIDTH]; layers.len()];
        let mut act = vec![vec![0.0; HIDDEN_WIDTH]; layers.len()];
        let mut logits = vec![0.0; m_count];
        let mut probs = vec![0.0; m_count];
        let mut da = [0.0; HIDDEN_WIDTH];
        let mut da_next = vec![0.0; HIDDEN_WIDTH.max(proj)];

        let mut total_loss = 0.0;
        for x in rows {
            if x.len() != self.bank.input_dim() {
                return Err(StocError::DimensionMismatch {
                    expected: self.bank.input_dim(),
                    actual: x.len(),
                });
            }
            for target in 0..m_count {
                self.bank.apply(target, x, &mut z);
                // Forward with cached pre-activations.
                for (l, layer) in layers.iter().enumerate() {
                    let (done, rest) = act.split_at_mut(l);
                    let input: &[f64] = if l == 0 { &z } else { &done[l - 1] };
                    let current = &mut rest[0];
                    for r in 0..HIDDEN_WIDTH {
                        let wrow = &layer.w[r * layer.in_dim..(r + 1) * layer.in_dim];
                        let s = layer.b[r]
                            + wrow.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
                        pre[l][r] = s;
                        current[r] = leaky_relu(s);
                    }
                }
                let feats = &act[layers.len() - 1];
                self.head.logits(feats, &mut logits);

                let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for (p, &l) in probs.iter_mut().zip(&logits) {
                    *p = (l - max).exp();
                    sum += *p;
                }
                let lse = max + sum.ln();
                total_loss += lse - logits[target];

                let Some(grads) = grads.as_deref_mut() else {
                    continue;
                };
                // d loss / d logits = softmax - onehot(target).
                probs.iter_mut().for_each(|p| *p /= sum);
                probs[target] -= 1.0;

                let (net_grads, head_grads) = grads.split_at_mut(2 * layers.len());
                let (head_gw, head_gb) = head_grads.split_at_mut(1);
                let head_gw = &mut head_gw[0];
                let head_gb = &mut head_gb[0];
                da.iter_mut().for_each(|v| *v = 0.0);
                for c in 0..m_count {
                    let dl = probs[c];
                    head_gb[c] += dl;
                    let wrow = &self.head.w[c * HIDDEN_WIDTH..(c + 1) * HIDDEN_WIDTH];
                    let grow = &mut head_gw[c * HIDDEN_WIDTH..(c + 1) * HIDDEN_WIDTH];
                    for j in 0..HIDDEN_WIDTH {
                        grow[j] += dl * feats[j];
                        da[j] += dl * wrow[j];
                    }
                }

                for l in (0..layers.len()).rev() {
                    let layer = &layers[l];
                    let input: &[f64] = if l == 0 { &z } else { &act[l - 1] };
                    if l > 0 {
                        da_next[..layer.in_dim].iter_mut().for_each(|v| *v = 0.0);
                    }
                    let (gw, gb) = {
                        let pair = &mut net_grads[2 * l..2 * l + 2];
                        let (a, b) = pair.split_at_mut(1);
                        (&mut a[0], &mut b[0])
                    };
                    for r in 0..HIDDEN_WIDTH {
                        let dpre = da[r] * leaky_relu_slope(pre[l][r]);
                        let grow = &mut gw[r * layer.in_dim..(r + 1) * layer.in_dim];
                        for (g, &inp) in grow.iter_mut().zip(input) {
                            *g += dpre * inp;
                        }
                        if l > 0 {
                            let wrow = &layer.w[r * layer.in_dim..(r + 1) * layer.in_dim];
                            for (dn, &w) in da_next[..layer.in_dim].iter_mut().zip(wrow) {
                                *dn += dpre * w;
                            }
                        }
                        gb[r] += dpre;
                        da[r] = dpre;
                    }
                    if l > 0 {
                        da[..HIDDEN_WIDTH].copy_from_slice(&da_next[..HIDDEN_WIDTH]);
                    }
                }
            }
        }

        let count = (rows.len() * m_count) as f64;
        if let Some(grads) = grads {
            for tensor in grads.iter_mut() {
                tensor.iter_mut().for_each(|g| *g /= count);
            }
        }
        Ok(total_loss / count)
    }

    /// One optimizer step on a batch of raw rows; every row contributes M
    /// classification instances. Returns the mean cross-entropy.
    pub fn train_step(&mut self, rows: &[&[f64]]) -> Result<f64> {
        if self.is_finalized() {
            return Err(StocError::invalid(
                "model",
                "cannot train a finalized model",
            ));
        }
        let (loss, grads) = self.batch_gradients(rows)?;
        if !loss.is_finite() {
            return Err(StocError::Diverged { step: 0 });
        }
        let Self {
            net,
            head,
            optimizer,
            ..
        } = self;
        let mut params = collect_params(net, head);
        optimizer.step(&mut params, &grads);
        Ok(loss)
    }

    /// Fit one GDE per transformation on the network features of the given
    /// rows. Replaces any previous estimators; refitting on identical data
    /// reproduces them exactly.
    pub fn finalize(&mut self, refined_rows: &Matrix) -> Result<()> {
        if refined_rows.is_empty() {
            return Err(StocError::TooFewRows { rows: 0, needed: 2 });
        }
        let mut gdes = Vec::with_capacity(self.bank.count());
        for m in 0..self.bank.count() {
            let feats: Vec<Vec<f64>> = refined_rows
                .iter_rows()
                .map(|x| self.features(x, m))
                .collect();
            gdes.push(GdeModel::fit_auto(&Matrix::from_rows(&feats))?);
        }
        self.per_transform_gdes = Some(gdes);
        Ok(())
    }

    /// Anomaly score of a query under the finalized model: the negated
    /// maximum per-transformation normality, i.e. the minimum
    /// per-transformation GDE score.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let gdes = self
            .per_transform_gdes
            .as_ref()
            .ok_or_else(|| StocError::NotFinalized("call finalize before scoring".to_string()))?;
        let mut best = f64::INFINITY;
        for (m, gde) in gdes.iter().enumerate() {
            let s = gde.score(&self.features(x, m));
            if s < best {
                best = s;
            }
        }
        Ok(best)
    }

    /// Write a versioned checkpoint: bank seed and shape, all network and
    /// head parameters, optimizer buffers, and any per-transformation
    /// estimators. Round-trips bit-exactly.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let checkpoint = ReprCheckpoint {
            version: REPR_CHECKPOINT_VERSION,
            model: self.clone(),
        };
        let json = serde_json::to_string(&checkpoint)
            .map_err(|e| StocError::Checkpoint(e.to_string()))?;
        std::fs::write(path, json).map_err(|source| StocError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|source| StocError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let checkpoint: ReprCheckpoint =
            serde_json::from_str(&json).map_err(|e| StocError::Checkpoint(e.to_string()))?;
        if checkpoint.version != REPR_CHECKPOINT_VERSION {
            return Err(StocError::Checkpoint(format!(
                "unsupported checkpoint version {}",
                checkpoint.version
            )));
        }
        Ok(checkpoint.model)
    }
}

pub const REPR_CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ReprCheckpoint {
    version: u32,
    model: ReprModel,
}

fn collect_params<'a>(net: &'a mut DenseNet, head: &'a mut ClassifierHead) -> Vec<&'a mut [f64]> {
    let mut params: Vec<&mut [f64]> = Vec::with_capacity(net.layers.len() * 2 + 2);
    for layer in &mut net.layers {
        params.push(&mut layer.w);
        params.push(&mut layer.b);
    }
    params.push(&mut head.w);
    params.push(&mut head.b);
    params
}

impl FeatureExtractor for ReprModel {
    fn channels(&self) -> usize {
        self.bank.count()
    }

    fn extract(&self, x: &[f64], channel: usize) -> Vec<f64> {
        self.features(x, channel)
    }
}
