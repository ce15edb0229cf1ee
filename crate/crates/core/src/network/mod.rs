//! Multilayer perceptron with per-layer activations and reverse-mode gradients.
//!
//! Layer `l` computes `f_l = g_l(f_{l-1} · W_lᵀ + b_l)` on a batch stored one
//! sample per row. The output layer has no activation (identity), which suits
//! regression onto unbounded targets.

mod checkpoint;

use serde::{Deserialize, Serialize};

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT};

use crate::activations::{ActivationCache, ActivationGrad, ActivationKind, ActivationLibrary, ActivationSpec};
use crate::error::{Error, Result};
use crate::numcore::{Matrix, Rng};

/// RNG sub-streams used by [`Mlp::init`]. Keeping activation parameters on
/// their own stream makes weight draws independent of the activation kinds.
pub const WEIGHT_STREAM: u64 = 0;
pub const ACTIVATION_STREAM: u64 = 1;

/// One dense layer. `weight` is `(out_dim, in_dim)`; `activation` of `None`
/// is the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub weight: Matrix,
    pub bias: Vec<f64>,
    pub activation: Option<ActivationSpec>,
}

impl Layer {
    pub fn new(weight: Matrix, bias: Vec<f64>, activation: Option<ActivationSpec>) -> Result<Self> {
        let layer = Self {
            weight,
            bias,
            activation,
        };
        layer.validate()?;
        Ok(layer)
    }

    pub fn in_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    fn validate(&self) -> Result<()> {
        if self.in_dim() == 0 || self.out_dim() == 0 {
            return Err(Error::Param("layer dimensions must be at least 1".into()));
        }
        if self.bias.len() != self.out_dim() {
            return Err(Error::Param(format!(
                "bias has {} entries for {} outputs",
                self.bias.len(),
                self.out_dim()
            )));
        }
        if let Some(act) = &self.activation {
            act.validate()?;
        }
        Ok(())
    }
}

/// Shape of a network before its parameters exist.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Option<ActivationKind>,
}

/// Input width, hidden layers and output width.
#[derive(Clone, Debug, PartialEq)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden: Vec<(usize, ActivationKind)>,
    pub output_dim: usize,
}

impl Architecture {
    /// Every hidden layer uses the same activation kind.
    pub fn uniform(input_dim: usize, hidden: &[usize], activation: ActivationKind, output_dim: usize) -> Self {
        Self {
            input_dim,
            hidden: hidden.iter().map(|&w| (w, activation)).collect(),
            output_dim,
        }
    }

    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        let mut specs = Vec::with_capacity(self.hidden.len() + 1);
        let mut in_dim = self.input_dim;
        for &(width, kind) in &self.hidden {
            specs.push(LayerSpec {
                in_dim,
                out_dim: width,
                activation: Some(kind),
            });
            in_dim = width;
        }
        specs.push(LayerSpec {
            in_dim,
            out_dim: self.output_dim,
            activation: None,
        });
        specs
    }
}

/// Which tensor of a layer a parameter slice belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorKind {
    Weight,
    Bias,
    /// LLA `θ` or QLA linear coefficients.
    ActivationLinear,
    /// QLA packed `Λ`.
    ActivationQuadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamId {
    pub layer: usize,
    pub tensor: TensorKind,
}

/// Parameter counts of one layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerParamCount {
    pub weights: usize,
    pub biases: usize,
    pub activation: usize,
}

impl LayerParamCount {
    pub fn total(&self) -> usize {
        self.weights + self.biases + self.activation
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamCount {
    pub total: usize,
    pub per_layer: Vec<LayerParamCount>,
}

struct LayerTape {
    input: Matrix,
    cache: Option<ActivationCache>,
}

/// Everything `backward` needs from a `forward` call.
pub struct Tape {
    version: u64,
    layers: Vec<LayerTape>,
    output_shape: (usize, usize),
}

impl Tape {
    /// Index of the first layer whose output contains NaN or ±inf, if any.
    pub fn first_non_finite_layer(&self, yhat: &Matrix) -> Option<usize> {
        self.layers
            .iter()
            .skip(1)
            .position(|t| !t.input.is_finite())
            .or_else(|| (!yhat.is_finite()).then(|| self.layers.len() - 1))
    }
}

/// Gradient buffers mirroring a network's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrads>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerGrads {
    pub weight: Matrix,
    pub bias: Vec<f64>,
    pub activation: ActivationGrad,
}

impl Gradients {
    /// Gradient slices in the same order as [`Mlp::param_tensors`].
    pub fn tensors(&self) -> Vec<(ParamId, &[f64])> {
        let mut out = Vec::new();
        for (layer, g) in self.layers.iter().enumerate() {
            out.push((ParamId { layer, tensor: TensorKind::Weight }, g.weight.as_slice()));
            out.push((ParamId { layer, tensor: TensorKind::Bias }, g.bias.as_slice()));
            match &g.activation {
                ActivationGrad::None => {}
                ActivationGrad::Lla { theta } => {
                    out.push((ParamId { layer, tensor: TensorKind::ActivationLinear }, theta.as_slice()))
                }
                ActivationGrad::Qla { linear, quadratic } => {
                    out.push((ParamId { layer, tensor: TensorKind::ActivationLinear }, linear.as_slice()));
                    out.push((ParamId { layer, tensor: TensorKind::ActivationQuadratic }, quadratic.as_slice()));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.tensors().iter().all(|(_, g)| g.iter().all(|&v| v == 0.0))
    }
}

/// A feedforward network.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Layer>", into = "Vec<Layer>")]
pub struct Mlp {
    layers: Vec<Layer>,
    /// Bumped on every mutable access; tapes from older versions are stale.
    version: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

impl TryFrom<Vec<Layer>> for Mlp {
    type Error = Error;

    fn try_from(layers: Vec<Layer>) -> Result<Self> {
        Mlp::from_layers(layers)
    }
}

impl From<Mlp> for Vec<Layer> {
    fn from(m: Mlp) -> Self {
        m.layers
    }
}

fn uniform_matrix(rng: &mut Rng, rows: usize, cols: usize, bound: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.uniform_range(-bound, bound)).collect();
    Matrix::from_vec(rows, cols, data).expect("sized by construction")
}

impl Mlp {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Param("network needs at least one layer".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            layer.validate().map_err(|e| e.context(format!("layer {i}")))?;
            if i > 0 && layer.in_dim() != layers[i - 1].out_dim() {
                return Err(Error::Param(format!(
                    "layer {i} expects {} inputs but layer {} produces {}",
                    layer.in_dim(),
                    i - 1,
                    layers[i - 1].out_dim()
                )));
            }
        }
        Ok(Self { layers, version: 0 })
    }

    /// Weights and biases uniform on `±1/√fan_in`; learnable activation
    /// parameters Kaiming-normal with `fan_in = |S|`.
    pub fn init(arch: &Architecture, library: Option<&ActivationLibrary>, seed: u64) -> Result<Self> {
        let mut weight_rng = Rng::with_stream(seed, WEIGHT_STREAM);
        let mut act_rng = Rng::with_stream(seed, ACTIVATION_STREAM);
        let mut layers = Vec::new();
        for spec in arch.layer_specs() {
            if spec.in_dim == 0 || spec.out_dim == 0 {
                return Err(Error::Config("layer dimensions must be at least 1".into()));
            }
            let bound = 1.0 / (spec.in_dim as f64).sqrt();
            let weight = uniform_matrix(&mut weight_rng, spec.out_dim, spec.in_dim, bound);
            let bias = uniform_matrix(&mut weight_rng, 1, spec.out_dim, bound).into_vec();
            let activation = spec
                .activation
                .map(|k| k.instantiate(library, &mut act_rng))
                .transpose()?;
            layers.push(Layer::new(weight, bias, activation)?);
        }
        Self::from_layers(layers)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        self.version += 1;
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, Tape)> {
        if x.cols() != self.input_dim() {
            return Err(Error::Shape {
                op: "forward",
                left: x.shape(),
                right: (self.input_dim(), self.layers[0].out_dim()),
            });
        }
        let mut tapes = Vec::with_capacity(self.layers.len());
        let mut current = x.clone();
        for layer in &self.layers {
            let pre = current
                .matmul_transb(&layer.weight)?
                .add_row_vector(&layer.bias)?;
            let (out, cache) = match &layer.activation {
                Some(act) => {
                    let (out, cache) = act.forward(&pre);
                    (out, Some(cache))
                }
                None => (pre, None),
            };
            tapes.push(LayerTape {
                input: current,
                cache,
            });
            current = out;
        }
        let tape = Tape {
            version: self.version,
            layers: tapes,
            output_shape: current.shape(),
        };
        Ok((current, tape))
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.forward(x)?.0)
    }

    /// Zeroed gradient buffers shaped like the parameters.
    pub fn zero_grads(&self) -> Gradients {
        Gradients {
            layers: self
                .layers
                .iter()
                .map(|l| LayerGrads {
                    weight: Matrix::zeros(l.out_dim(), l.in_dim()),
                    bias: vec![0.0; l.out_dim()],
                    activation: match &l.activation {
                        None | Some(ActivationSpec::Fixed(_)) => ActivationGrad::None,
                        Some(ActivationSpec::Lla(a)) => ActivationGrad::Lla {
                            theta: vec![0.0; a.theta.len()],
                        },
                        Some(ActivationSpec::Qla(q)) => ActivationGrad::Qla {
                            linear: vec![0.0; q.linear.len()],
                            quadratic: vec![0.0; q.quadratic.len()],
                        },
                    },
                })
                .collect(),
        }
    }

    /// Reverse pass. Overwrites `grads` with `∂L/∂params` given `∂L/∂ŷ`.
    pub fn backward(&self, tape: &Tape, d_yhat: &Matrix, grads: &mut Gradients) -> Result<()> {
        if tape.version != self.version || tape.layers.len() != self.layers.len() {
            return Err(Error::Internal(
                "tape is stale: parameters changed since forward".into(),
            ));
        }
        if d_yhat.shape() != tape.output_shape {
            return Err(Error::Shape {
                op: "backward",
                left: d_yhat.shape(),
                right: tape.output_shape,
            });
        }
        if grads.layers.len() != self.layers.len() {
            return Err(Error::Internal("gradient buffers do not match network".into()));
        }
        let mut upstream = d_yhat.clone();
        for (i, (layer, t)) in self.layers.iter().zip(&tape.layers).enumerate().rev() {
            let (d_pre, act_grad) = match (&layer.activation, &t.cache) {
                (Some(act), Some(cache)) => act.backward(cache, &upstream)?,
                (None, None) => (upstream, ActivationGrad::None),
                _ => return Err(Error::Internal(format!("tape layer {i} does not match network"))),
            };
            let g = &mut grads.layers[i];
            g.weight = d_pre.matmul_transa(&t.input)?;
            g.bias = d_pre.column_sums();
            g.activation = act_grad;
            if i > 0 {
                upstream = d_pre.matmul(&layer.weight)?;
            } else {
                break;
            }
        }
        Ok(())
    }

    /// Forward + backward returning fresh buffers.
    pub fn gradients(&self, x: &Matrix, d_yhat_fn: impl FnOnce(&Matrix) -> Result<Matrix>) -> Result<Gradients> {
        let (yhat, tape) = self.forward(x)?;
        let d = d_yhat_fn(&yhat)?;
        let mut grads = self.zero_grads();
        self.backward(&tape, &d, &mut grads)?;
        Ok(grads)
    }

    pub fn count_parameters(&self) -> ParamCount {
        let per_layer: Vec<LayerParamCount> = self
            .layers
            .iter()
            .map(|l| LayerParamCount {
                weights: l.weight.len(),
                biases: l.bias.len(),
                activation: l.activation.as_ref().map_or(0, |a| a.parameter_count()),
            })
            .collect();
        ParamCount {
            total: per_layer.iter().map(LayerParamCount::total).sum(),
            per_layer,
        }
    }

    pub fn param_tensors(&self) -> Vec<(ParamId, &[f64])> {
        let mut out = Vec::new();
        for (layer, l) in self.layers.iter().enumerate() {
            out.push((ParamId { layer, tensor: TensorKind::Weight }, l.weight.as_slice()));
            out.push((ParamId { layer, tensor: TensorKind::Bias }, l.bias.as_slice()));
            match &l.activation {
                None | Some(ActivationSpec::Fixed(_)) => {}
                Some(ActivationSpec::Lla(a)) => {
                    out.push((ParamId { layer, tensor: TensorKind::ActivationLinear }, a.theta.as_slice()))
                }
                Some(ActivationSpec::Qla(q)) => {
                    out.push((ParamId { layer, tensor: TensorKind::ActivationLinear }, q.linear.as_slice()));
                    out.push((ParamId { layer, tensor: TensorKind::ActivationQuadratic }, q.quadratic.as_slice()));
                }
            }
        }
        out
    }

    /// Mutable parameter slices, same order as [`Mlp::param_tensors`].
    pub fn param_tensors_mut(&mut self) -> Vec<(ParamId, &mut [f64])> {
        self.version += 1;
        let mut out = Vec::new();
        for (layer, l) in self.layers.iter_mut().enumerate() {
            out.push((ParamId { layer, tensor: TensorKind::Weight }, l.weight.as_mut_slice()));
            out.push((ParamId { layer, tensor: TensorKind::Bias }, l.bias.as_mut_slice()));
            match &mut l.activation {
                None | Some(ActivationSpec::Fixed(_)) => {}
                Some(ActivationSpec::Lla(a)) => {
                    out.push((ParamId { layer, tensor: TensorKind::ActivationLinear }, a.theta.as_mut_slice()))
                }
                Some(ActivationSpec::Qla(q)) => {
                    out.push((ParamId { layer, tensor: TensorKind::ActivationLinear }, q.linear.as_mut_slice()));
                    out.push((ParamId { layer, tensor: TensorKind::ActivationQuadratic }, q.quadratic.as_mut_slice()));
                }
            }
        }
        out
    }

    /// All parameters flattened in tensor order.
    pub fn flat_params(&self) -> Vec<f64> {
        self.param_tensors().into_iter().flat_map(|(_, s)| s.iter().copied()).collect()
    }

    /// Inverse of [`Mlp::flat_params`].
    pub fn set_flat_params(&mut self, values: &[f64]) -> Result<()> {
        let total: usize = self.param_tensors().iter().map(|(_, s)| s.len()).sum();
        if total != values.len() {
            return Err(Error::Param(format!(
                "expected {total} parameters, got {}",
                values.len()
            )));
        }
        let mut offset = 0;
        for (_, slice) in self.param_tensors_mut() {
            slice.copy_from_slice(&values[offset..offset + slice.len()]);
            offset += slice.len();
        }
        Ok(())
    }
}
