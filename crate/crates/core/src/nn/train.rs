//! Surrogate training: seeded mini-batch Adam on normalized objectives with
//! learning-rate decay, optional data pruning, per-epoch loss traces, and an
//! elites-loss diagnostic over the training set's non-dominated subset.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{Adam, Net, SurrogateKind};
use super::mtl::{gradnorm_combine, pcgrad_combine};
use crate::datagen::{derive_seed, DatasetProvenance, OfflineDataset};
use crate::error::{Error, Result};
use crate::pareto::{non_dominated_sort, nsga2_select, NormStats};

/// Multi-task training technique for the multi-output architectures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MtlKind {
    None,
    GradNorm { alpha: f64 },
    PcGrad,
}

impl std::str::FromStr for MtlKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(MtlKind::None),
            "gradnorm" => Ok(MtlKind::GradNorm { alpha: 1.5 }),
            "pcgrad" => Ok(MtlKind::PcGrad),
            _ => Err(Error::Config(format!("unknown mtl technique '{s}' (expected none|gradnorm|pcgrad)"))),
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Per-epoch multiplicative decay: epoch e trains at lr * decay^e.
    pub lr_decay: f64,
    pub hidden: usize,
    pub seed: u64,
    pub mtl: MtlKind,
    /// Fraction of the best-ranked points kept for training; 1.0 disables
    /// pruning.
    pub prune_keep_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            lr_decay: 0.98,
            hidden: 64,
            seed: 0,
            mtl: MtlKind::None,
            prune_keep_fraction: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.hidden == 0 {
            return Err(Error::Config("epochs, batch_size, and hidden must be positive".into()));
        }
        if self.learning_rate <= 0.0 || self.lr_decay <= 0.0 {
            return Err(Error::Config("learning rate and decay must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.prune_keep_fraction) || self.prune_keep_fraction == 0.0 {
            return Err(Error::Config(format!(
                "prune_keep_fraction must lie in (0, 1], got {}",
                self.prune_keep_fraction
            )));
        }
        if let MtlKind::GradNorm { alpha } = self.mtl {
            if alpha < 0.0 {
                return Err(Error::Config("gradnorm alpha must be non-negative".into()));
            }
        }
        Ok(())
    }
}

/// Per-epoch training diagnostics; every vector has one entry per epoch.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainTrace {
    /// Sum of per-task MSEs over the training set.
    pub total_loss: Vec<f64>,
    /// Same sum restricted to the training set's rank-0 subset.
    pub elites_loss: Vec<f64>,
    /// Per-task MSE, `[epoch][task]`.
    pub per_task_loss: Vec<Vec<f64>>,
    /// GradNorm task weights after each epoch (empty for other techniques).
    pub gradnorm_weights: Vec<Vec<f64>>,
}

/// A trained MLP surrogate: one net for end-to-end/multi-head, m nets for
/// the multiple-models family. Predictions are in normalized objective
/// space; `predict_raw` maps back through the stored stats.
#[derive(Debug, Clone)]
pub struct MlpSurrogate {
    pub kind: SurrogateKind,
    pub nets: Vec<Net>,
    pub stats: NormStats,
    pub num_objectives: usize,
}

impl MlpSurrogate {
    pub fn input_dims(&self) -> usize {
        self.nets[0].d_in
    }

    /// Normalized-space prediction. For multiple models this is the
    /// concatenation of the per-objective forwards.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self.kind {
            SurrogateKind::Multiple => {
                let mut out = Vec::with_capacity(self.num_objectives);
                for net in &self.nets {
                    out.extend(net.forward(x)?);
                }
                Ok(out)
            }
            _ => self.nets[0].forward(x),
        }
    }

    /// Prediction denormalized to raw objective units.
    pub fn predict_raw(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.stats.denormalize(&self.forward(x)?))
    }

    pub fn save(&self, path: &Path, seed: u64, config: &TrainConfig) -> Result<()> {
        let ckpt = SurrogateCheckpoint {
            kind: self.kind,
            d_in: self.input_dims(),
            hidden: self.nets[0].hidden,
            num_objectives: self.num_objectives,
            stats: self.stats.clone(),
            seed,
            config: config.clone(),
            weights: self.nets.iter().map(|n| n.theta.clone()).collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&ckpt)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<(MlpSurrogate, SurrogateCheckpoint)> {
        let ckpt: SurrogateCheckpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let n_out = match ckpt.kind {
            SurrogateKind::Multiple => 1,
            _ => ckpt.num_objectives,
        };
        let nets: Vec<Net> = ckpt
            .weights
            .iter()
            .map(|w| Net::from_theta(ckpt.d_in, ckpt.hidden, n_out, w.clone()))
            .collect::<Result<_>>()?;
        if nets.is_empty() {
            return Err(Error::Config("checkpoint holds no networks".into()));
        }
        let surrogate = MlpSurrogate {
            kind: ckpt.kind,
            nets,
            stats: ckpt.stats.clone(),
            num_objectives: ckpt.num_objectives,
        };
        Ok((surrogate, ckpt))
    }
}

/// Checkpoint file layout: JSON header plus flat per-network weight arrays;
/// save/load round-trips exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateCheckpoint {
    pub kind: SurrogateKind,
    pub d_in: usize,
    pub hidden: usize,
    pub num_objectives: usize,
    pub stats: NormStats,
    pub seed: u64,
    pub config: TrainConfig,
    pub weights: Vec<Vec<f64>>,
}

/// Data pruning: keeps the first `ceil(keep_fraction * n)` points of the
/// NSGA-II ordering over raw objectives and re-fits normalization.
pub fn data_prune(ds: &OfflineDataset, keep_fraction: f64) -> Result<OfflineDataset> {
    if !(0.0..=1.0).contains(&keep_fraction) || keep_fraction == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "keep_fraction must lie in (0, 1], got {keep_fraction}"
        )));
    }
    let n = ds.len();
    let keep = ((keep_fraction * n as f64).ceil() as usize).min(n);
    let mut rows = nsga2_select(&ds.y_raw, keep)?;
    rows.sort_unstable();
    let provenance = DatasetProvenance {
        prune_keep_fraction: Some(keep_fraction),
        ..ds.provenance.clone()
    };
    ds.subset(&rows, provenance)
}

/// Trains a surrogate of the given kind on the dataset's normalized
/// objectives. Deterministic given `(kind, dataset, config)`; multiple
/// models derive one independent seed per objective, so each sub-model is
/// parameter-identical to an isolated single-output run.
pub fn train(
    kind: SurrogateKind,
    ds: &OfflineDataset,
    cfg: &TrainConfig,
) -> Result<(MlpSurrogate, TrainTrace)> {
    cfg.validate()?;
    if kind == SurrogateKind::Multiple && cfg.mtl != MtlKind::None {
        return Err(Error::Config(
            "multi-task techniques do not apply to independent multiple models".into(),
        ));
    }
    if ds.is_empty() {
        return Err(Error::EmptyInput("training needs a non-empty dataset"));
    }

    let pruned;
    let ds = if cfg.prune_keep_fraction < 1.0 {
        pruned = data_prune(ds, cfg.prune_keep_fraction)?;
        &pruned
    } else {
        ds
    };

    let features: Vec<Vec<f64>> = ds.x.iter().map(|g| g.features()).collect();
    let xs: Vec<&[f64]> = features.iter().map(|f| f.as_slice()).collect();
    let targets: Vec<&[f64]> = ds.y_norm.iter().map(|y| y.as_slice()).collect();
    let m = ds.task.num_objectives;
    // elites: the training set's non-dominated subset, fixed before training
    let elites: Vec<usize> = non_dominated_sort(&ds.y_raw)?.fronts[0].clone();

    match kind {
        SurrogateKind::Multiple => {
            let mut nets = Vec::with_capacity(m);
            let mut traces = Vec::with_capacity(m);
            for task in 0..m {
                let column: Vec<[f64; 1]> = targets.iter().map(|t| [t[task]]).collect();
                let column_refs: Vec<&[f64]> = column.iter().map(|c| c.as_slice()).collect();
                let sub_cfg = TrainConfig { seed: derive_seed(cfg.seed, task as u64), ..cfg.clone() };
                let (net, trace) = train_net(&xs, &column_refs, 1, &elites, &sub_cfg)?;
                nets.push(net);
                traces.push(trace);
            }
            let trace = merge_traces(&traces, cfg.epochs);
            let surrogate =
                MlpSurrogate { kind, nets, stats: ds.stats.clone(), num_objectives: m };
            Ok((surrogate, trace))
        }
        _ => {
            let (net, trace) = train_net_multi(&xs, &targets, m, &elites, cfg, kind)?;
            let surrogate =
                MlpSurrogate { kind, nets: vec![net], stats: ds.stats.clone(), num_objectives: m };
            Ok((surrogate, trace))
        }
    }
}

/// Single-output training (no multi-task machinery).
fn train_net(
    xs: &[&[f64]],
    targets: &[&[f64]],
    n_out: usize,
    elites: &[usize],
    cfg: &TrainConfig,
) -> Result<(Net, TrainTrace)> {
    train_net_multi(xs, targets, n_out, elites, cfg, SurrogateKind::EndToEnd)
}

fn train_net_multi(
    xs: &[&[f64]],
    targets: &[&[f64]],
    n_out: usize,
    elites: &[usize],
    cfg: &TrainConfig,
    kind: SurrogateKind,
) -> Result<(Net, TrainTrace)> {
    let d_in = xs[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = Net::new_seeded(d_in, cfg.hidden, n_out, &mut rng);
    let mut adam = Adam::new(net.theta.len());
    let mut trace = TrainTrace::default();

    let mut gn_weights = vec![1.0; n_out];
    let mut gn_initial: Option<Vec<f64>> = None;
    let shared = net.shared_layer_range(kind);

    let mut order: Vec<usize> = (0..xs.len()).collect();
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate * cfg.lr_decay.powi(epoch as i32);
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch_x: Vec<&[f64]> = chunk.iter().map(|&i| xs[i]).collect();
            let batch_t: Vec<&[f64]> = chunk.iter().map(|&i| targets[i]).collect();
            let (task_grads, task_losses) = net.backward_batch(&batch_x, &batch_t)?;
            if task_losses.iter().any(|l| !l.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite training loss at epoch {epoch}; lower the learning rate"
                )));
            }

            let combined: Vec<f64> = match (cfg.mtl, &gn_initial) {
                (MtlKind::GradNorm { alpha }, Some(initial)) => {
                    let shared_grads: Vec<&[f64]> =
                        task_grads.iter().map(|g| &g[shared.clone()]).collect();
                    let (_, new_weights) = gradnorm_combine(
                        &shared_grads,
                        &task_losses,
                        initial,
                        &gn_weights,
                        alpha,
                        lr,
                    )?;
                    gn_weights = new_weights;
                    weighted_sum(&task_grads, &gn_weights)
                }
                (MtlKind::PcGrad, _) if n_out > 1 => pcgrad_combine(&task_grads, &mut rng)?,
                _ => weighted_sum(&task_grads, &vec![1.0; n_out]),
            };
            adam.step(&mut net.theta, &combined, lr);
        }

        // end-of-epoch diagnostics over the whole training set
        let per_task = net.losses(xs, targets)?;
        if per_task.iter().any(|l| !l.is_finite()) {
            return Err(Error::Numeric(format!("non-finite loss after epoch {epoch}")));
        }
        let elite_x: Vec<&[f64]> = elites.iter().map(|&i| xs[i]).collect();
        let elite_t: Vec<&[f64]> = elites.iter().map(|&i| targets[i]).collect();
        let elite_losses = net.losses(&elite_x, &elite_t)?;
        trace.total_loss.push(per_task.iter().sum());
        trace.elites_loss.push(elite_losses.iter().sum());
        trace.per_task_loss.push(per_task.clone());
        if matches!(cfg.mtl, MtlKind::GradNorm { .. }) {
            trace.gradnorm_weights.push(gn_weights.clone());
            if gn_initial.is_none() {
                // initial training rates captured at the end of epoch 0
                if per_task.iter().any(|&l| l <= 0.0) {
                    return Err(Error::Numeric(
                        "gradnorm needs positive per-task losses after the first epoch".into(),
                    ));
                }
                gn_initial = Some(per_task);
            }
        }
    }
    Ok((net, trace))
}

fn weighted_sum(grads: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; grads[0].len()];
    for (g, &w) in grads.iter().zip(weights) {
        if w == 1.0 {
            for (o, &v) in out.iter_mut().zip(g) {
                *o += v;
            }
        } else {
            for (o, &v) in out.iter_mut().zip(g) {
                *o += w * v;
            }
        }
    }
    out
}

/// Combines per-model traces of the multiple-models family: losses add
/// across objectives.
fn merge_traces(traces: &[TrainTrace], epochs: usize) -> TrainTrace {
    let mut merged = TrainTrace::default();
    for epoch in 0..epochs {
        merged.total_loss.push(traces.iter().map(|t| t.total_loss[epoch]).sum());
        merged.elites_loss.push(traces.iter().map(|t| t.elites_loss[epoch]).sum());
        merged
            .per_task_loss
            .push(traces.iter().map(|t| t.per_task_loss[epoch][0]).collect());
    }
    merged
}

#[cfg(test)]
mod tests;
