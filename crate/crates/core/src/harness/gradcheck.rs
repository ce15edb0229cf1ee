//! Central finite-difference check of the analytic gradients.

use serde::Serialize;

use crate::activations::{ActivationKind, ActivationLibrary, BaseActivation};
use crate::error::Result;
use crate::network::{Architecture, Mlp};
use crate::numcore::{Matrix, Rng};
use crate::optim::mse_loss;

/// Denominator floor for the relative error, so parameters whose true
/// gradient is ~0 are judged on absolute error instead.
pub const REL_FLOOR: f64 = 1e-6;

/// Smallest ReLU pre-activation magnitude allowed in a checked batch.
pub const KINK_MARGIN: f64 = 1e-3;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

/// Smallest `|z|` over every hidden pre-activation, per sample row.
pub fn min_abs_preactivation(net: &Mlp, x: &Matrix) -> Result<Vec<f64>> {
    let mut h = x.clone();
    let mut out = vec![f64::INFINITY; x.rows()];
    for layer in net.layers() {
        let z = h.matmul_transb(&layer.weight)?.add_row_vector(&layer.bias)?;
        match &layer.activation {
            Some(a) => {
                for (r, m) in out.iter_mut().enumerate() {
                    *m = z.row(r).iter().fold(*m, |acc, v| acc.min(v.abs()));
                }
                h = a.forward(&z).0;
            }
            None => h = z,
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradCheck {
    pub parameters: usize,
    pub max_rel_error: f64,
    /// Flat index of the worst parameter.
    pub worst_index: usize,
}

/// Compares backprop against central differences of the MSE loss for every
/// parameter of `net`.
pub fn check_network(net: &Mlp, x: &Matrix, y: &Matrix, step: f64) -> Result<GradCheck> {
    let grads = net.gradients(x, |yhat| Ok(mse_loss(yhat, y)?.1))?;
    let analytic: Vec<f64> = grads.tensors().into_iter().flat_map(|(_, g)| g.iter().copied()).collect();
    let base = net.flat_params();
    let mut probe = net.clone();
    let mut params = base.clone();
    let mut loss = |p: &[f64]| -> Result<f64> {
        probe.set_flat_params(p)?;
        Ok(mse_loss(&probe.predict(x)?, y)?.0)
    };
    let mut worst = (0.0, 0);
    for i in 0..base.len() {
        params[i] = base[i] + step;
        let up = loss(&params)?;
        params[i] = base[i] - step;
        let down = loss(&params)?;
        params[i] = base[i];
        let numeric = (up - down) / (2.0 * step);
        let e = relative_error(analytic[i], numeric);
        if e > worst.0 || e.is_nan() {
            worst = (e, i);
        }
    }
    Ok(GradCheck {
        parameters: base.len(),
        max_rel_error: worst.0,
        worst_index: worst.1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradCheckSummary {
    pub settings: usize,
    pub parameters: usize,
    pub max_rel_error: f64,
}

/// The network shape used by the suite: 2-20-20-1 with a constrained LLA
/// first hidden layer and a QLA second one over {ReLU, GELU, Tanh, Sigmoid}.
pub fn suite_network(seed: u64) -> Result<Mlp> {
    let library = ActivationLibrary::new(vec![
        BaseActivation::Relu,
        BaseActivation::Gelu,
        BaseActivation::Tanh,
        BaseActivation::Sigmoid,
    ])?;
    let arch = Architecture {
        input_dim: 2,
        hidden: vec![
            (20, ActivationKind::Lla { constrained: true }),
            (20, ActivationKind::Qla { constrained: false }),
        ],
        output_dim: 1,
    };
    Mlp::init(&arch, Some(&library), seed)
}

/// Standard deviation of the target residuals in [`suite_batch`].
pub const TARGET_NOISE: f64 = 0.1;

/// `batch` inputs in `[-1, 1]²` whose ReLU pre-activations all clear the
/// kink margin, with targets at the network output plus small noise.
///
/// Central differences carry a roundoff error of about `eps * |L| / step`;
/// keeping residuals small keeps `|L|` small relative to the gradients.
pub fn suite_batch(net: &Mlp, rng: &mut Rng, batch: usize) -> Result<(Matrix, Matrix)> {
    let mut rows = Vec::with_capacity(batch * 2);
    while rows.len() < batch * 2 {
        let cand = Matrix::from_vec(1, 2, vec![rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])?;
        if min_abs_preactivation(net, &cand)?[0] > KINK_MARGIN {
            rows.extend_from_slice(cand.as_slice());
        }
    }
    let x = Matrix::from_vec(batch, 2, rows)?;
    let mut y = net.predict(&x)?;
    for v in y.as_mut_slice() {
        *v += TARGET_NOISE * rng.standard_normal();
    }
    Ok((x, y))
}

/// Checks `settings` independently initialized networks.
pub fn run_suite(seed: u64, settings: usize, step: f64) -> Result<GradCheckSummary> {
    let mut rng = Rng::with_stream(seed, 7);
    let mut summary = GradCheckSummary {
        settings,
        parameters: 0,
        max_rel_error: 0.0,
    };
    for k in 0..settings {
        let net = suite_network(seed + k as u64)?;
        let (x, y) = suite_batch(&net, &mut rng, 8)?;
        let r = check_network(&net, &x, &y, step)?;
        summary.parameters = r.parameters;
        summary.max_rel_error = summary.max_rel_error.max(r.max_rel_error);
    }
    Ok(summary)
}
