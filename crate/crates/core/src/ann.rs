//! From-scratch single-hidden-layer feed-forward classifier: tansig
//! hidden layer, softmax output, one-hot targets, trained by full-batch
//! gradient descent with momentum on the average cross-entropy
//! `CE = -(1/M) sum_j sum_i [d_ij ln y_ij + (1 - d_ij) ln(1 - y_ij)]`.
//!
//! Training runs `cycles` independent restarts (one RNG stream each) and
//! keeps the restart with the lowest terminal CE; architecture selection
//! sweeps hidden-layer sizes and keeps the global best.

use ndarray::{Array1, Array2, Axis, Zip};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::essc::FeatureMode;
use crate::rng::{derive_stream, StreamDomain};
use crate::signal::PulseFamily;
use crate::spectral::NUM_CLASSES;

/// Predictions are clipped to `[CLIP_EPSILON, 1 - CLIP_EPSILON]` before
/// the logarithms of the cross-entropy.
pub const CLIP_EPSILON: f64 = 1e-7;

/// Hidden activation. `tansig(z) = 2 / (1 + e^(-2z)) - 1`, which is
/// exactly `tanh(z)`.
pub fn tansig(z: f64) -> f64 {
    z.tanh()
}

/// Per-feature affine normalization (z-score) fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureNorm {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureNorm {
    /// Fit per-column mean and population standard deviation. Constant
    /// columns get unit scale so they normalize to zero.
    pub fn fit(x: &Array2<f64>) -> Self {
        let m = x.nrows() as f64;
        let mean: Vec<f64> = x.mean_axis(Axis(0)).expect("non-empty batch").to_vec();
        let std: Vec<f64> = x
            .axis_iter(Axis(1))
            .zip(&mean)
            .map(|(col, &mu)| {
                let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / m;
                if var == 0.0 {
                    1.0
                } else {
                    var.sqrt()
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.width() {
            return Err(Error::Shape(format!(
                "normalization expects {} features, got {}",
                self.width(),
                x.ncols()
            )));
        }
        let mut out = x.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            col.mapv_inplace(|v| (v - self.mean[j]) / self.std[j]);
        }
        Ok(out)
    }

    pub fn apply_row(&self, row: &[f64]) -> Result<Array1<f64>> {
        if row.len() != self.width() {
            return Err(Error::Shape(format!(
                "normalization expects {} features, got {}",
                self.width(),
                row.len()
            )));
        }
        Ok(Array1::from_iter(
            row.iter().zip(&self.mean).zip(&self.std).map(|((v, mu), sd)| (v - mu) / sd),
        ))
    }
}

/// The network parameters. Also reused as the container for their
/// gradients, which share the shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// Hidden weights, `n_hidden x n_in`.
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// Output weights, `n_out x n_hidden`.
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

impl MlpParams {
    fn zeros(n_in: usize, n_hidden: usize, n_out: usize) -> Self {
        Self {
            w1: Array2::zeros((n_hidden, n_in)),
            b1: Array1::zeros(n_hidden),
            w2: Array2::zeros((n_out, n_hidden)),
            b2: Array1::zeros(n_out),
        }
    }

    /// All parameters in a fixed flat order (w1 row-major, b1, w2
    /// row-major, b2), for gradient verification.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        out.extend(self.w1.iter());
        out.extend(self.b1.iter());
        out.extend(self.w2.iter());
        out.extend(self.b2.iter());
        out
    }

    /// Mutable references to all parameters, in the same order as
    /// [`MlpParams::flat`].
    pub fn flat_mut(&mut self) -> Vec<&mut f64> {
        let mut out: Vec<&mut f64> = Vec::with_capacity(self.parameter_count());
        out.extend(self.w1.iter_mut());
        out.extend(self.b1.iter_mut());
        out.extend(self.w2.iter_mut());
        out.extend(self.b2.iter_mut());
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }
}

/// Trained classifier: parameters plus the feature normalization the
/// training set was fitted with.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub params: MlpParams,
    pub norm: FeatureNorm,
}

impl MlpModel {
    pub fn n_in(&self) -> usize {
        self.params.w1.ncols()
    }

    pub fn n_hidden(&self) -> usize {
        self.params.w1.nrows()
    }

    pub fn n_out(&self) -> usize {
        self.params.w2.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.b1.len() != self.n_hidden()
            || p.w2.ncols() != self.n_hidden()
            || p.b2.len() != self.n_out()
        {
            return Err(Error::Shape(format!(
                "inconsistent parameter shapes: w1 {:?}, b1 {}, w2 {:?}, b2 {}",
                p.w1.dim(),
                p.b1.len(),
                p.w2.dim(),
                p.b2.len()
            )));
        }
        if self.n_out() != NUM_CLASSES {
            return Err(Error::Shape(format!(
                "classifier must have {NUM_CLASSES} outputs, got {}",
                self.n_out()
            )));
        }
        if self.norm.width() != self.n_in() || self.norm.std.len() != self.n_in() {
            return Err(Error::Shape(format!(
                "normalization width {} does not match input width {}",
                self.norm.width(),
                self.n_in()
            )));
        }
        let finite = p.flat().iter().all(|v| v.is_finite())
            && self.norm.mean.iter().all(|v| v.is_finite())
            && self.norm.std.iter().all(|v| v.is_finite() && *v > 0.0);
        if !finite {
            return Err(Error::Shape("model contains non-finite values".into()));
        }
        Ok(())
    }
}

fn softmax_rows(mut z: Array2<f64>) -> Array2<f64> {
    for mut row in z.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    z
}

/// Hidden activations and softmax outputs for a normalized batch.
fn forward_internal(params: &MlpParams, xn: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let mut h = xn.dot(&params.w1.t());
    h += &params.b1;
    h.mapv_inplace(f64::tanh);
    let mut z = h.dot(&params.w2.t());
    z += &params.b2;
    let y = softmax_rows(z);
    (h, y)
}

/// Class probabilities for one raw (unnormalized) feature vector.
pub fn forward(model: &MlpModel, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
    let xn = model.norm.apply_row(features)?;
    let mut h = model.params.w1.dot(&xn);
    h += &model.params.b1;
    h.mapv_inplace(f64::tanh);
    let mut z = model.params.w2.dot(&h);
    z += &model.params.b2;
    let max = z.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    z.mapv_inplace(|v| (v - max).exp());
    let sum = z.sum();
    let mut out = [0.0; NUM_CLASSES];
    for (o, v) in out.iter_mut().zip(z.iter()) {
        *o = v / sum;
    }
    Ok(out)
}

/// Class probabilities for a raw feature batch (rows = exercises).
pub fn forward_batch(model: &MlpModel, x: &Array2<f64>) -> Result<Array2<f64>> {
    let xn = model.norm.apply(x)?;
    Ok(forward_internal(&model.params, &xn).1)
}

/// Average cross-entropy of a prediction batch against one-hot targets,
/// with predictions clipped to `[clip, 1 - clip]`. The double sum runs
/// over classes and exercises; the average is over exercises only.
pub fn cross_entropy(targets: &Array2<f64>, predictions: &Array2<f64>, clip: f64) -> Result<f64> {
    if targets.dim() != predictions.dim() {
        return Err(Error::Shape(format!(
            "target batch {:?} does not match prediction batch {:?}",
            targets.dim(),
            predictions.dim()
        )));
    }
    if targets.nrows() == 0 {
        return Err(Error::Shape("cross-entropy of an empty batch".into()));
    }
    let mut sum = 0.0;
    Zip::from(targets).and(predictions).for_each(|&d, &y| {
        let y = y.clamp(clip, 1.0 - clip);
        sum += d * y.ln() + (1.0 - d) * (1.0 - y).ln();
    });
    Ok(-sum / targets.nrows() as f64)
}

/// One-hot encode class ids 1..=n_out into an `M x n_out` target batch.
pub fn one_hot(labels: &[u8], n_out: usize) -> Result<Array2<f64>> {
    let mut d = Array2::zeros((labels.len(), n_out));
    for (i, &c) in labels.iter().enumerate() {
        if c == 0 || c as usize > n_out {
            return Err(Error::Dataset(format!("class id {c} outside 1..={n_out}")));
        }
        d[(i, c as usize - 1)] = 1.0;
    }
    Ok(d)
}

/// Loss and parameter gradients on a normalized batch, by
/// back-propagation through the full softmax Jacobian (the loss also
/// carries `(1-d) ln(1-y)` terms, so the usual `y - d` shortcut does not
/// apply). Clipping is treated as pass-through for the gradient.
pub fn compute_gradients(
    params: &MlpParams,
    xn: &Array2<f64>,
    targets: &Array2<f64>,
    clip: f64,
) -> Result<(f64, MlpParams)> {
    let (h, y) = forward_internal(params, xn);
    let loss = cross_entropy(targets, &y, clip)?;
    let m = xn.nrows() as f64;

    // dL/dy on the clipped prediction
    let dl_dy = Zip::from(targets).and(&y).map_collect(|&d, &y| {
        let yc = y.clamp(clip, 1.0 - clip);
        (-d / yc + (1.0 - d) / (1.0 - yc)) / m
    });
    // softmax Jacobian per row: dL/dz_k = y_k (dL/dy_k - sum_j dL/dy_j y_j)
    let s = (&dl_dy * &y).sum_axis(Axis(1)).insert_axis(Axis(1));
    let dz2 = &y * &(&dl_dy - &s);

    let dw2 = dz2.t().dot(&h);
    let db2 = dz2.sum_axis(Axis(0));
    let dh = dz2.dot(&params.w2);
    let da1 = &dh * &h.mapv(|v| 1.0 - v * v);
    let dw1 = da1.t().dot(xn);
    let db1 = da1.sum_axis(Axis(0));
    Ok((loss, MlpParams { w1: dw1, b1: db1, w2: dw2, b2: db2 }))
}

/// Optimizer and restart settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    /// Stop when CE has not improved by `min_improvement` for this many
    /// consecutive epochs.
    pub patience: usize,
    pub min_improvement: f64,
    /// Weights initialize uniformly in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub clip_epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            momentum: 0.9,
            max_epochs: 2000,
            patience: 50,
            min_improvement: 1e-6,
            init_scale: 0.1,
            clip_epsilon: CLIP_EPSILON,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Parameter(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !self.momentum.is_finite() || !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Parameter(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::Parameter("max_epochs and patience must be positive".into()));
        }
        if !self.min_improvement.is_finite() || self.min_improvement < 0.0 {
            return Err(Error::Parameter(format!(
                "min_improvement must be non-negative, got {}",
                self.min_improvement
            )));
        }
        if !self.init_scale.is_finite() || self.init_scale <= 0.0 {
            return Err(Error::Parameter(format!(
                "init_scale must be positive, got {}",
                self.init_scale
            )));
        }
        if !self.clip_epsilon.is_finite() || !(0.0..0.5).contains(&self.clip_epsilon) {
            return Err(Error::Parameter(format!(
                "clip_epsilon must be in (0, 0.5), got {}",
                self.clip_epsilon
            )));
        }
        Ok(())
    }
}

/// Outcome bookkeeping of a multi-restart training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    /// Per-epoch CE of the chosen cycle.
    pub ce_history: Vec<f64>,
    /// Terminal CE of the chosen cycle (the minimum over cycles).
    pub final_ce: f64,
    pub cycles: usize,
    pub chosen_cycle: usize,
    /// Restarts discarded because their CE became non-finite.
    pub diverged_cycles: usize,
}

fn init_params(
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    scale: f64,
    rng: &mut impl Rng,
) -> MlpParams {
    let mut draw = |len: usize| -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-scale..=scale)).collect()
    };
    MlpParams {
        w1: Array2::from_shape_vec((n_hidden, n_in), draw(n_hidden * n_in)).expect("shape"),
        b1: Array1::from_vec(draw(n_hidden)),
        w2: Array2::from_shape_vec((n_out, n_hidden), draw(n_out * n_hidden)).expect("shape"),
        b2: Array1::from_vec(draw(n_out)),
    }
}

/// One restart of full-batch gradient descent with momentum. Returns
/// `None` if the loss became non-finite.
fn train_cycle(
    xn: &Array2<f64>,
    targets: &Array2<f64>,
    n_hidden: usize,
    config: &TrainConfig,
    rng: &mut impl Rng,
) -> Option<(MlpParams, Vec<f64>)> {
    let (n_in, n_out) = (xn.ncols(), targets.ncols());
    let mut params = init_params(n_in, n_hidden, n_out, config.init_scale, rng);
    let mut velocity = MlpParams::zeros(n_in, n_hidden, n_out);
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut last_improvement = 0usize;

    for epoch in 0..config.max_epochs {
        let (loss, grads) =
            compute_gradients(&params, xn, targets, config.clip_epsilon).ok()?;
        if !loss.is_finite() {
            return None;
        }
        history.push(loss);
        if loss < best - config.min_improvement {
            best = loss;
            last_improvement = epoch;
        } else if epoch - last_improvement >= config.patience {
            break;
        }

        velocity.w1 *= config.momentum;
        velocity.w1.scaled_add(-config.learning_rate, &grads.w1);
        velocity.b1 *= config.momentum;
        velocity.b1.scaled_add(-config.learning_rate, &grads.b1);
        velocity.w2 *= config.momentum;
        velocity.w2.scaled_add(-config.learning_rate, &grads.w2);
        velocity.b2 *= config.momentum;
        velocity.b2.scaled_add(-config.learning_rate, &grads.b2);
        params.w1 += &velocity.w1;
        params.b1 += &velocity.b1;
        params.w2 += &velocity.w2;
        params.b2 += &velocity.b2;
    }
    Some((params, history))
}

/// Train with `cycles` independent restarts and keep the one with the
/// lowest terminal CE. Feature normalization is fitted on `x` and stored
/// in the model. Restarts draw from independent streams derived from
/// `(master_seed, n_hidden, cycle index)` and run in parallel.
pub fn train(
    x: &Array2<f64>,
    labels: &[u8],
    n_hidden: usize,
    cycles: usize,
    config: &TrainConfig,
    master_seed: u64,
) -> Result<(MlpModel, TrainingReport)> {
    config.validate()?;
    if x.nrows() == 0 || x.nrows() != labels.len() {
        return Err(Error::Dataset(format!(
            "feature batch of {} rows does not match {} labels",
            x.nrows(),
            labels.len()
        )));
    }
    if !(5..=40).contains(&n_hidden) {
        return Err(Error::Parameter(format!(
            "hidden layer size must be in 5..=40, got {n_hidden}"
        )));
    }
    if cycles == 0 {
        return Err(Error::Parameter("training needs at least 1 cycle".into()));
    }
    for c in 1..=NUM_CLASSES as u8 {
        if !labels.contains(&c) {
            return Err(Error::Dataset(format!("class {c} is missing from the training set")));
        }
    }

    let norm = FeatureNorm::fit(x);
    let xn = norm.apply(x)?;
    let targets = one_hot(labels, NUM_CLASSES)?;

    let outcomes: Vec<Option<(MlpParams, Vec<f64>)>> = (0..cycles)
        .into_par_iter()
        .map(|cycle| {
            let mut rng =
                derive_stream(master_seed, StreamDomain::TrainCycle, n_hidden as u32, cycle as u32);
            train_cycle(&xn, &targets, n_hidden, config, &mut rng)
        })
        .collect();

    let diverged_cycles = outcomes.iter().filter(|o| o.is_none()).count();
    let mut chosen: Option<(usize, MlpParams, Vec<f64>)> = None;
    for (cycle, outcome) in outcomes.into_iter().enumerate() {
        if let Some((params, history)) = outcome {
            let terminal = *history.last().expect("at least one epoch");
            let better = match &chosen {
                Some((_, _, best_history)) => terminal < *best_history.last().unwrap(),
                None => true,
            };
            if better {
                chosen = Some((cycle, params, history));
            }
        }
    }
    let (chosen_cycle, params, ce_history) =
        chosen.ok_or_else(|| Error::Training("all training cycles diverged".into()))?;

    let model = MlpModel { params, norm };
    model.validate()?;
    let final_ce = *ce_history.last().unwrap();
    Ok((model, TrainingReport { ce_history, final_ce, cycles, chosen_cycle, diverged_cycles }))
}

/// One row of the architecture-selection curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureRow {
    pub n_hidden: usize,
    pub min_ce: f64,
}

/// Result of the hidden-layer-size sweep.
#[derive(Debug, Clone)]
pub struct ArchitectureSelection {
    pub model: MlpModel,
    pub report: TrainingReport,
    pub n_hidden: usize,
    pub curve: Vec<ArchitectureRow>,
}

/// Train one multi-restart run per hidden-layer size and keep the global
/// best by terminal CE (ties break toward the smaller layer).
pub fn select_architecture(
    x: &Array2<f64>,
    labels: &[u8],
    n_hl_range: &[usize],
    cycles: usize,
    config: &TrainConfig,
    master_seed: u64,
) -> Result<ArchitectureSelection> {
    if n_hl_range.is_empty() {
        return Err(Error::Parameter("hidden-layer range must be non-empty".into()));
    }
    let mut curve = Vec::with_capacity(n_hl_range.len());
    let mut best: Option<(MlpModel, TrainingReport, usize)> = None;
    for &n_hidden in n_hl_range {
        let (model, report) = train(x, labels, n_hidden, cycles, config, master_seed)?;
        curve.push(ArchitectureRow { n_hidden, min_ce: report.final_ce });
        let better = match &best {
            Some((_, best_report, _)) => report.final_ce < best_report.final_ce,
            None => true,
        };
        if better {
            best = Some((model, report, n_hidden));
        }
    }
    let (model, report, n_hidden) = best.expect("non-empty range");
    Ok(ArchitectureSelection { model, report, n_hidden, curve })
}

/// How the output class is chosen from the softmax probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Sample the categorical distribution given by the probabilities.
    #[default]
    WeightedRandom,
    /// Deterministically take the most probable class.
    Argmax,
}

/// Classify one feature vector, returning a class id 1..=5.
pub fn classify(
    model: &MlpModel,
    features: &[f64],
    rule: SelectionRule,
    rng: &mut impl Rng,
) -> Result<u8> {
    let probs = forward(model, features)?;
    Ok(match rule {
        SelectionRule::Argmax => {
            let mut best = 0;
            for (i, &p) in probs.iter().enumerate() {
                if p > probs[best] {
                    best = i;
                }
            }
            best as u8 + 1
        }
        SelectionRule::WeightedRandom => {
            let u: f64 = rng.random();
            let mut cumulative = 0.0;
            let mut chosen = NUM_CLASSES as u8;
            for (i, &p) in probs.iter().enumerate() {
                cumulative += p;
                if u < cumulative {
                    chosen = i as u8 + 1;
                    break;
                }
            }
            chosen
        }
    })
}

/// Serialized model document. The weight arrays are flat row-major.
#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    version: u32,
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
    norm_mean: Vec<f64>,
    norm_std: Vec<f64>,
    meta: ModelMeta,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Provenance stored beside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelMeta {
    pub family: Option<PulseFamily>,
    pub mode: Option<FeatureMode>,
    pub master_seed: u64,
    /// Hash of the experiment config that produced the model, if any.
    #[serde(default)]
    pub config_hash: Option<String>,
}

pub fn model_to_json(model: &MlpModel, meta: &ModelMeta) -> Result<String> {
    model.validate()?;
    let doc = ModelDocument {
        version: MODEL_FORMAT_VERSION,
        n_in: model.n_in(),
        n_hidden: model.n_hidden(),
        n_out: model.n_out(),
        w1: model.params.w1.iter().copied().collect(),
        b1: model.params.b1.to_vec(),
        w2: model.params.w2.iter().copied().collect(),
        b2: model.params.b2.to_vec(),
        norm_mean: model.norm.mean.clone(),
        norm_std: model.norm.std.clone(),
        meta: meta.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn model_from_json(json: &str) -> Result<(MlpModel, ModelMeta)> {
    let doc: ModelDocument = serde_json::from_str(json)?;
    if doc.version != MODEL_FORMAT_VERSION {
        return Err(Error::Validation(format!(
            "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
            doc.version
        )));
    }
    let w1 = Array2::from_shape_vec((doc.n_hidden, doc.n_in), doc.w1)
        .map_err(|e| Error::Shape(format!("w1: {e}")))?;
    let w2 = Array2::from_shape_vec((doc.n_out, doc.n_hidden), doc.w2)
        .map_err(|e| Error::Shape(format!("w2: {e}")))?;
    let model = MlpModel {
        params: MlpParams { w1, b1: Array1::from_vec(doc.b1), w2, b2: Array1::from_vec(doc.b2) },
        norm: FeatureNorm { mean: doc.norm_mean, std: doc.norm_std },
    };
    model.validate()?;
    Ok((model, doc.meta))
}
