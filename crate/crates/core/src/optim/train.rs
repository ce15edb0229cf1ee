use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use crate::activations::ActivationSpec;
use crate::error::{Error, Result};
use crate::network::{Mlp, ParamId};
use crate::numcore::{Matrix, Rng};

/// RNG sub-stream for per-epoch shuffling.
pub const SHUFFLE_STREAM: u64 = 2;

/// Inputs and targets, one sample per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Matrix,
}

impl Dataset {
    pub fn new(x: Matrix, y: Matrix) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(Error::Shape {
                op: "dataset",
                left: x.shape(),
                right: y.shape(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.rows() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarlyStopping {
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub early_stopping: Option<EarlyStopping>,
    /// Tensors left untouched by the optimizer.
    pub frozen: BTreeSet<ParamId>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            batch_size: 256,
            adam: AdamConfig::default(),
            early_stopping: None,
            frozen: BTreeSet::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_mse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val_mse: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub steps: usize,
    pub stopped_early: bool,
    /// Epoch whose parameters were kept when early stopping restored them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_epoch: Option<usize>,
}

impl TrainHistory {
    pub fn train_losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.train_mse).collect()
    }
}

/// Mean squared error over all entries and its gradient w.r.t. `yhat`.
pub fn mse_loss(yhat: &Matrix, y: &Matrix) -> Result<(f64, Matrix)> {
    let diff = yhat.sub(y)?;
    let n = diff.len().max(1) as f64;
    let loss = diff.as_slice().iter().map(|d| d * d).sum::<f64>() / n;
    Ok((loss, diff.scale(2.0 / n)))
}

fn evaluate_mse(net: &Mlp, data: &Dataset, batch_size: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    let mut start = 0;
    while start < data.len() {
        let end = (start + batch_size).min(data.len());
        let x = data.x.slice_rows(start, end);
        let y = data.y.slice_rows(start, end);
        let diff = net.predict(&x)?.sub(&y)?;
        total += diff.as_slice().iter().map(|d| d * d).sum::<f64>();
        count += diff.len();
        start = end;
    }
    Ok(total / count.max(1) as f64)
}

fn assert_on_simplex(net: &Mlp) {
    for layer in net.layers() {
        if let Some(ActivationSpec::Lla(lla)) = &layer.activation {
            if lla.constrained {
                let lambda = lla.coefficients();
                let total: f64 = lambda.iter().sum();
                debug_assert!((total - 1.0).abs() < 1e-12 && lambda.iter().all(|&l| l >= 0.0));
            }
        }
    }
}

/// Mini-batch Adam on MSE.
///
/// Each epoch shuffles the training rows with the seeded shuffle stream and
/// walks them in batches of `batch_size`, keeping a trailing partial batch.
/// The recorded train MSE is the sample-weighted mean of the batch losses.
pub fn train(
    net: &mut Mlp,
    data: &Dataset,
    val: Option<&Dataset>,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<TrainHistory> {
    if data.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    if cfg.early_stopping.is_some() && val.is_none() {
        return Err(Error::Config("early stopping needs a validation set".into()));
    }
    let mut history = TrainHistory::default();
    if cfg.epochs == 0 {
        return Ok(history);
    }

    let sizes: Vec<usize> = net.param_tensors().iter().map(|(_, s)| s.len()).collect();
    let mut adam = AdamState::new(cfg.adam, &sizes);
    let mut grads = net.zero_grads();
    let mut rng = Rng::with_stream(seed, SHUFFLE_STREAM);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut since_best = 0;

    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut weighted = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            history.steps += 1;
            let x = data.x.select_rows(batch);
            let y = data.y.select_rows(batch);
            let (yhat, tape) = net.forward(&x)?;
            let (loss, d_yhat) = mse_loss(&yhat, &y)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    epoch,
                    step: history.steps,
                    layer: tape.first_non_finite_layer(&yhat).unwrap_or(net.layers().len() - 1),
                });
            }
            weighted += loss * batch.len() as f64;
            net.backward(&tape, &d_yhat, &mut grads)?;

            adam.begin_step();
            let grad_tensors = grads.tensors();
            for (i, ((id, param), (gid, grad))) in net
                .param_tensors_mut()
                .into_iter()
                .zip(grad_tensors)
                .enumerate()
            {
                debug_assert_eq!(id, gid);
                if cfg.frozen.contains(&id) {
                    continue;
                }
                adam.update(i, param, grad)?;
            }
            if cfg!(debug_assertions) {
                assert_on_simplex(net);
            }
        }
        let train_mse = weighted / data.len() as f64;
        let val_mse = val.map(|v| evaluate_mse(net, v, cfg.batch_size)).transpose()?;
        history.epochs.push(EpochRecord {
            epoch,
            train_mse,
            val_mse,
        });

        if let (Some(stop), Some(v)) = (cfg.early_stopping, val_mse) {
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, epoch, net.flat_params()));
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= stop.patience {
                    history.stopped_early = true;
                    break;
                }
            }
        }
    }

    if let Some((_, epoch, params)) = best {
        net.set_flat_params(&params)?;
        history.best_epoch = Some(epoch);
    }
    Ok(history)
}
