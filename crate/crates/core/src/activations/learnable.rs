use serde::{Deserialize, Serialize};

use super::base::{base_eval, base_grad, ActivationLibrary, BaseActivation};
use crate::error::{Error, Result};
use crate::numcore::{Matrix, Rng};
use crate::optim::kaiming_normal;

/// Number of entries in a packed upper-triangular `n × n` matrix.
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Numerically stable softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Pulls a gradient w.r.t. `λ = softmax(θ)` back to `θ`:
/// `∂θ_i = λ_i (g_i − λ·g)`.
fn softmax_vjp(lambda: &[f64], g: &[f64]) -> Vec<f64> {
    let dot: f64 = lambda.iter().zip(g).map(|(l, g)| l * g).sum();
    lambda.iter().zip(g).map(|(l, g)| l * (g - dot)).collect()
}

/// Linear learnable activation `g = Σ_j λ_j a_j`.
///
/// When `constrained`, `theta` holds pre-softmax logits and `λ = softmax(θ)`
/// lies on the probability simplex; otherwise `λ = θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lla {
    pub library: ActivationLibrary,
    pub theta: Vec<f64>,
    pub constrained: bool,
}

/// Quadratic learnable activation `g = Σ_{j≤k} Λ_jk a_j a_k + Σ_j λ_j a_j`.
///
/// `quadratic` stores the upper triangle of `Λ` row by row
/// (`Λ_00, Λ_01, …, Λ_0n, Λ_11, …`); entries below the diagonal do not
/// exist. `constrained` puts the linear part through a softmax, as in [`Lla`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Qla {
    pub library: ActivationLibrary,
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
    pub constrained: bool,
}

/// Activation of a hidden layer. Learnable parameters are shared by all
/// nodes of the layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationSpec {
    Fixed(BaseActivation),
    Lla(Lla),
    Qla(Qla),
}

/// Parameter-free description of an activation, as written in configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActivationKind {
    Fixed(BaseActivation),
    Lla {
        #[serde(default = "default_true")]
        constrained: bool,
    },
    Qla {
        #[serde(default)]
        constrained: bool,
    },
}

fn default_true() -> bool {
    true
}

impl ActivationKind {
    pub fn is_learnable(&self) -> bool {
        !matches!(self, ActivationKind::Fixed(_))
    }

    /// Creates the activation with Kaiming-normal parameters, `fan_in = |S|`.
    pub fn instantiate(&self, library: Option<&ActivationLibrary>, rng: &mut Rng) -> Result<ActivationSpec> {
        let need_library = || {
            library
                .cloned()
                .ok_or_else(|| Error::Config("learnable activation requires a library".into()))
        };
        Ok(match *self {
            ActivationKind::Fixed(base) => ActivationSpec::Fixed(base),
            ActivationKind::Lla { constrained } => {
                let library = need_library()?;
                let n = library.len();
                let theta = kaiming_normal(rng, n, 1, n)?.into_vec();
                ActivationSpec::Lla(Lla {
                    library,
                    theta,
                    constrained,
                })
            }
            ActivationKind::Qla { constrained } => {
                let library = need_library()?;
                let n = library.len();
                let linear = kaiming_normal(rng, n, 1, n)?.into_vec();
                let quadratic = kaiming_normal(rng, n, 1, packed_len(n))?.into_vec();
                ActivationSpec::Qla(Qla {
                    library,
                    linear,
                    quadratic,
                    constrained,
                })
            }
        })
    }
}

/// Values needed by the backward pass of one activation call.
#[derive(Clone, Debug)]
pub enum ActivationCache {
    Fixed {
        derivative: Matrix,
    },
    Lla {
        lambda: Vec<f64>,
        constrained: bool,
        values: Vec<Matrix>,
        derivatives: Vec<Matrix>,
    },
    Qla {
        lambda: Vec<f64>,
        quadratic: Vec<f64>,
        constrained: bool,
        values: Vec<Matrix>,
        derivatives: Vec<Matrix>,
    },
}

impl ActivationCache {
    fn shape(&self) -> (usize, usize) {
        match self {
            ActivationCache::Fixed { derivative } => derivative.shape(),
            ActivationCache::Lla { derivatives, .. } | ActivationCache::Qla { derivatives, .. } => {
                derivatives[0].shape()
            }
        }
    }
}

/// Gradient w.r.t. the activation's own parameters, shaped like them.
#[derive(Clone, Debug, PartialEq)]
pub enum ActivationGrad {
    None,
    Lla { theta: Vec<f64> },
    Qla { linear: Vec<f64>, quadratic: Vec<f64> },
}

fn member_tables(library: &ActivationLibrary, x: &Matrix) -> (Vec<Matrix>, Vec<Matrix>) {
    library
        .members()
        .iter()
        .map(|&a| (base_eval(a, x), base_grad(a, x)))
        .unzip()
}

/// `Σ_j c_j m_j`, accumulated from zero in library order.
fn weighted_sum(coeffs: &[f64], mats: &[Matrix]) -> Matrix {
    let mut out = Matrix::zeros(mats[0].rows(), mats[0].cols());
    for (&c, m) in coeffs.iter().zip(mats) {
        for (o, &v) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *o += c * v;
        }
    }
    out
}

/// `Σ_{batch, nodes} upstream ⊙ m`.
fn contract(upstream: &Matrix, m: &Matrix) -> f64 {
    upstream
        .as_slice()
        .iter()
        .zip(m.as_slice())
        .map(|(u, v)| u * v)
        .sum()
}

fn check_cache(cache: &ActivationCache, upstream: &Matrix) -> Result<()> {
    if cache.shape() != upstream.shape() {
        return Err(Error::Internal(format!(
            "activation cache holds {:?} but upstream gradient is {:?}",
            cache.shape(),
            upstream.shape()
        )));
    }
    Ok(())
}

impl Lla {
    pub fn new(library: ActivationLibrary, theta: Vec<f64>, constrained: bool) -> Result<Self> {
        let lla = Self {
            library,
            theta,
            constrained,
        };
        lla.validate()?;
        Ok(lla)
    }

    /// Unconstrained LLA with `λ = e_index`: exactly the member at `index`.
    pub fn one_hot(library: ActivationLibrary, index: usize) -> Result<Self> {
        if index >= library.len() {
            return Err(Error::Param(format!(
                "one-hot index {index} outside library of {}",
                library.len()
            )));
        }
        let mut theta = vec![0.0; library.len()];
        theta[index] = 1.0;
        Self::new(library, theta, false)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.len() != self.library.len() {
            return Err(Error::Param(format!(
                "LLA has {} coefficients for a library of {}",
                self.theta.len(),
                self.library.len()
            )));
        }
        Ok(())
    }

    /// The coefficients actually applied: `softmax(θ)` or `θ`.
    pub fn coefficients(&self) -> Vec<f64> {
        if self.constrained {
            softmax(&self.theta)
        } else {
            self.theta.clone()
        }
    }

    /// `softmax(θ)`; only meaningful for constrained layers.
    pub fn effective_lambda(&self) -> Result<Vec<f64>> {
        if !self.constrained {
            return Err(Error::Usage(
                "effective_lambda called on an unconstrained LLA".into(),
            ));
        }
        Ok(softmax(&self.theta))
    }

    pub fn forward(&self, x: &Matrix) -> (Matrix, ActivationCache) {
        let lambda = self.coefficients();
        let (values, derivatives) = member_tables(&self.library, x);
        let out = weighted_sum(&lambda, &values);
        (
            out,
            ActivationCache::Lla {
                lambda,
                constrained: self.constrained,
                values,
                derivatives,
            },
        )
    }
}

/// Backward pass of an LLA call: `(∂input, ∂θ)`.
pub(crate) fn lla_backward(cache: &ActivationCache, upstream: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    let ActivationCache::Lla {
        lambda,
        constrained,
        values,
        derivatives,
    } = cache
    else {
        return Err(Error::Internal("LLA backward given a non-LLA cache".into()));
    };
    check_cache(cache, upstream)?;
    let slope = weighted_sum(lambda, derivatives);
    let d_input = upstream.hadamard(&slope)?;
    let d_lambda: Vec<f64> = values.iter().map(|v| contract(upstream, v)).collect();
    let d_theta = if *constrained {
        softmax_vjp(lambda, &d_lambda)
    } else {
        d_lambda
    };
    Ok((d_input, d_theta))
}

impl Qla {
    pub fn new(
        library: ActivationLibrary,
        linear: Vec<f64>,
        quadratic: Vec<f64>,
        constrained: bool,
    ) -> Result<Self> {
        let qla = Self {
            library,
            linear,
            quadratic,
            constrained,
        };
        qla.validate()?;
        Ok(qla)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.library.len();
        if self.linear.len() != n || self.quadratic.len() != packed_len(n) {
            return Err(Error::Param(format!(
                "QLA over {n} members needs {n} linear and {} quadratic coefficients, got {} and {}",
                packed_len(n),
                self.linear.len(),
                self.quadratic.len()
            )));
        }
        Ok(())
    }

    pub fn linear_coefficients(&self) -> Vec<f64> {
        if self.constrained {
            softmax(&self.linear)
        } else {
            self.linear.clone()
        }
    }

    /// `Λ_jk` for any `j, k`; zero below the diagonal.
    pub fn quadratic_entry(&self, j: usize, k: usize) -> f64 {
        let n = self.library.len();
        if j > k {
            return 0.0;
        }
        self.quadratic[packed_index(n, j, k)]
    }

    /// Dense `|S| × |S|` view of `Λ`.
    pub fn quadratic_dense(&self) -> Matrix {
        let n = self.library.len();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                m.set(j, k, self.quadratic_entry(j, k));
            }
        }
        m
    }

    pub fn forward(&self, x: &Matrix) -> (Matrix, ActivationCache) {
        let lambda = self.linear_coefficients();
        let (values, derivatives) = member_tables(&self.library, x);
        let mut out = weighted_sum(&lambda, &values);
        let n = values.len();
        let mut idx = 0;
        for j in 0..n {
            for k in j..n {
                let c = self.quadratic[idx];
                idx += 1;
                for ((o, &aj), &ak) in out
                    .as_mut_slice()
                    .iter_mut()
                    .zip(values[j].as_slice())
                    .zip(values[k].as_slice())
                {
                    *o += c * (aj * ak);
                }
            }
        }
        (
            out,
            ActivationCache::Qla {
                lambda,
                quadratic: self.quadratic.clone(),
                constrained: self.constrained,
                values,
                derivatives,
            },
        )
    }
}

fn packed_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j <= k && k < n);
    j * (2 * n - j + 1) / 2 + (k - j)
}

/// Backward pass of a QLA call: `(∂input, ∂λ-or-logits, ∂Λ packed)`.
pub(crate) fn qla_backward(
    cache: &ActivationCache,
    upstream: &Matrix,
) -> Result<(Matrix, Vec<f64>, Vec<f64>)> {
    let ActivationCache::Qla {
        lambda,
        quadratic,
        constrained,
        values,
        derivatives,
    } = cache
    else {
        return Err(Error::Internal("QLA backward given a non-QLA cache".into()));
    };
    check_cache(cache, upstream)?;
    let n = values.len();
    let mut slope = weighted_sum(lambda, derivatives);
    let mut d_quad = Vec::with_capacity(packed_len(n));
    let mut idx = 0;
    for j in 0..n {
        for k in j..n {
            let c = quadratic[idx];
            idx += 1;
            let (aj, ak) = (values[j].as_slice(), values[k].as_slice());
            let (dj, dk) = (derivatives[j].as_slice(), derivatives[k].as_slice());
            for (i, s) in slope.as_mut_slice().iter_mut().enumerate() {
                *s += c * (dj[i] * ak[i] + aj[i] * dk[i]);
            }
            let g: f64 = upstream
                .as_slice()
                .iter()
                .enumerate()
                .map(|(i, u)| u * (aj[i] * ak[i]))
                .sum();
            d_quad.push(g);
        }
    }
    let d_input = upstream.hadamard(&slope)?;
    let d_lambda: Vec<f64> = values.iter().map(|v| contract(upstream, v)).collect();
    let d_linear = if *constrained {
        softmax_vjp(lambda, &d_lambda)
    } else {
        d_lambda
    };
    Ok((d_input, d_linear, d_quad))
}

impl ActivationSpec {
    pub fn library(&self) -> Option<&ActivationLibrary> {
        match self {
            ActivationSpec::Fixed(_) => None,
            ActivationSpec::Lla(l) => Some(&l.library),
            ActivationSpec::Qla(q) => Some(&q.library),
        }
    }

    pub fn kind(&self) -> ActivationKind {
        match self {
            ActivationSpec::Fixed(b) => ActivationKind::Fixed(*b),
            ActivationSpec::Lla(l) => ActivationKind::Lla {
                constrained: l.constrained,
            },
            ActivationSpec::Qla(q) => ActivationKind::Qla {
                constrained: q.constrained,
            },
        }
    }

    /// Number of learnable activation parameters.
    pub fn parameter_count(&self) -> usize {
        match self {
            ActivationSpec::Fixed(_) => 0,
            ActivationSpec::Lla(l) => l.theta.len(),
            ActivationSpec::Qla(q) => q.linear.len() + q.quadratic.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ActivationSpec::Fixed(_) => Ok(()),
            ActivationSpec::Lla(l) => l.validate(),
            ActivationSpec::Qla(q) => q.validate(),
        }
    }

    pub fn forward(&self, x: &Matrix) -> (Matrix, ActivationCache) {
        match self {
            ActivationSpec::Fixed(base) => (
                base_eval(*base, x),
                ActivationCache::Fixed {
                    derivative: base_grad(*base, x),
                },
            ),
            ActivationSpec::Lla(l) => l.forward(x),
            ActivationSpec::Qla(q) => q.forward(x),
        }
    }

    pub fn backward(&self, cache: &ActivationCache, upstream: &Matrix) -> Result<(Matrix, ActivationGrad)> {
        match (self, cache) {
            (ActivationSpec::Fixed(_), ActivationCache::Fixed { derivative }) => {
                check_cache(cache, upstream)?;
                Ok((upstream.hadamard(derivative)?, ActivationGrad::None))
            }
            (ActivationSpec::Lla(_), _) => {
                let (d_input, theta) = lla_backward(cache, upstream)?;
                Ok((d_input, ActivationGrad::Lla { theta }))
            }
            (ActivationSpec::Qla(_), _) => {
                let (d_input, linear, quadratic) = qla_backward(cache, upstream)?;
                Ok((d_input, ActivationGrad::Qla { linear, quadratic }))
            }
            _ => Err(Error::Internal("activation cache does not match its layer".into())),
        }
    }

    /// Scalar evaluation, used for plotting learned activations.
    pub fn eval_scalar(&self, x: f64) -> f64 {
        self.forward(&Matrix::filled(1, 1, x)).0.get(0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Rng;
    use BaseActivation::*;

    fn lib(members: &[BaseActivation]) -> ActivationLibrary {
        ActivationLibrary::new(members.to_vec()).unwrap()
    }

    fn scalar(x: f64) -> Matrix {
        Matrix::filled(1, 1, x)
    }

    fn random_matrix(rng: &mut Rng, r: usize, c: usize, scale: f64) -> Matrix {
        Matrix::from_vec(r, c, (0..r * c).map(|_| rng.uniform_range(-scale, scale)).collect()).unwrap()
    }

    #[test]
    fn packed_indices_follow_row_order() {
        let n = 4;
        let mut expected = 0;
        for j in 0..n {
            for k in j..n {
                assert_eq!(packed_index(n, j, k), expected);
                expected += 1;
            }
        }
        assert_eq!(expected, packed_len(n));
    }

    #[test]
    fn lla_one_hot_is_the_member() {
        let s = lib(&[Relu, Gelu, Tanh, Sigmoid, Sine]);
        let x = random_matrix(&mut Rng::new(1), 10, 7, 5.0);
        for (k, &a) in s.members().iter().enumerate() {
            let lla = Lla::one_hot(s.clone(), k).unwrap();
            assert_eq!(lla.forward(&x).0, base_eval(a, &x));
        }
    }

    #[test]
    fn lla_hand_values() {
        let lla = Lla::new(lib(&[Relu, Tanh]), vec![0.5, 0.5], false).unwrap();
        let v = lla.forward(&scalar(1.0)).0.get(0, 0);
        assert!((v - 0.880_797).abs() < 1e-6);

        let uniform = Lla::new(lib(&[Relu, Gelu, Tanh, Sigmoid]), vec![0.0; 4], true).unwrap();
        assert_eq!(uniform.forward(&scalar(0.0)).0.get(0, 0), 0.125);
    }

    #[test]
    fn lla_zero_upstream_gives_zero_gradients() {
        let lla = Lla::new(lib(&[Relu, Tanh, Sine]), vec![0.3, -1.0, 2.0], true).unwrap();
        let x = random_matrix(&mut Rng::new(2), 4, 3, 2.0);
        let (_, cache) = lla.forward(&x);
        let (d_in, d_theta) = lla_backward(&cache, &Matrix::zeros(4, 3)).unwrap();
        assert!(d_in.as_slice().iter().all(|&v| v == 0.0));
        assert!(d_theta.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lla_single_member_unconstrained_collapses() {
        let lla = Lla::new(lib(&[Tanh]), vec![1.3], false).unwrap();
        let x = random_matrix(&mut Rng::new(3), 5, 2, 2.0);
        let up = random_matrix(&mut Rng::new(4), 5, 2, 1.0);
        let (_, cache) = lla.forward(&x);
        let (_, d_theta) = lla_backward(&cache, &up).unwrap();
        let expected: f64 = up
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .map(|(u, v)| u * v.tanh())
            .sum();
        assert!((d_theta[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn backward_rejects_mismatched_cache() {
        let lla = Lla::new(lib(&[Relu]), vec![1.0], false).unwrap();
        let (_, cache) = lla.forward(&Matrix::zeros(2, 2));
        assert!(matches!(lla_backward(&cache, &Matrix::zeros(3, 2)), Err(Error::Internal(_))));
        assert!(matches!(qla_backward(&cache, &Matrix::zeros(2, 2)), Err(Error::Internal(_))));
        let fixed = ActivationSpec::Fixed(Relu);
        assert!(fixed.backward(&cache, &Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn qla_restrictions() {
        let s = lib(&[Relu, Gelu, Tanh, Sigmoid]);
        let x = random_matrix(&mut Rng::new(5), 6, 5, 4.0);
        for (k, &a) in s.members().iter().enumerate() {
            let mut linear = vec![0.0; 4];
            linear[k] = 1.0;
            let qla = Qla::new(s.clone(), linear, vec![0.0; 10], false).unwrap();
            assert_eq!(qla.forward(&x).0, base_eval(a, &x));
        }
    }

    #[test]
    fn qla_hand_values() {
        let x = random_matrix(&mut Rng::new(6), 3, 3, 3.0);
        let cross = Qla::new(lib(&[Sine, Cosine]), vec![0.0, 0.0], vec![0.0, 1.0, 0.0], false).unwrap();
        let out = cross.forward(&x).0;
        for (o, v) in out.as_slice().iter().zip(x.as_slice()) {
            assert!((o - v.sin() * v.cos()).abs() < 1e-15);
        }
        let sq = Qla::new(lib(&[Tanh]), vec![0.0], vec![1.0], false).unwrap();
        assert!((sq.forward(&scalar(1.0)).0.get(0, 0) - 0.580_026).abs() < 1e-6);
    }

    #[test]
    fn qla_with_zero_quadratic_matches_lla_exactly() {
        let mut rng = Rng::new(8);
        let s = lib(&[Relu, Gelu, Tanh, Sigmoid]);
        for constrained in [false, true] {
            let theta: Vec<f64> = (0..4).map(|_| rng.normal(0.0, 1.0)).collect();
            let lla = Lla::new(s.clone(), theta.clone(), constrained).unwrap();
            let qla = Qla::new(s.clone(), theta, vec![0.0; 10], constrained).unwrap();
            let x = random_matrix(&mut rng, 8, 4, 3.0);
            let up = random_matrix(&mut rng, 8, 4, 1.0);
            let (yl, cl) = lla.forward(&x);
            let (yq, cq) = qla.forward(&x);
            assert_eq!(yl, yq);
            let (dl, tl) = lla_backward(&cl, &up).unwrap();
            let (dq, tq, _) = qla_backward(&cq, &up).unwrap();
            assert_eq!(dl, dq);
            assert_eq!(tl, tq);
        }
    }

    #[test]
    fn qla_zero_upstream_gives_zero_gradients() {
        let mut rng = Rng::new(9);
        let qla = ActivationKind::Qla { constrained: false }
            .instantiate(Some(&lib(&[Relu, Sine, Cosine])), &mut rng)
            .unwrap();
        let x = random_matrix(&mut rng, 3, 3, 2.0);
        let (_, cache) = qla.forward(&x);
        let (d_in, grad) = qla.backward(&cache, &Matrix::zeros(3, 3)).unwrap();
        assert!(d_in.as_slice().iter().all(|&v| v == 0.0));
        let ActivationGrad::Qla { linear, quadratic } = grad else { panic!() };
        assert!(linear.iter().chain(&quadratic).all(|&v| v == 0.0));
    }

    #[test]
    fn quadratic_dense_is_upper_triangular() {
        let q = Qla::new(lib(&[Relu, Tanh, Sine]), vec![0.0; 3], vec![1., 2., 3., 4., 5., 6.], false).unwrap();
        let d = q.quadratic_dense();
        assert_eq!(d.row(0), &[1., 2., 3.]);
        assert_eq!(d.row(1), &[0., 4., 5.]);
        assert_eq!(d.row(2), &[0., 0., 6.]);
    }

    #[test]
    fn effective_lambda_properties() {
        let s = lib(&[Relu, Gelu, Tanh, Sigmoid]);
        let eq = Lla::new(s.clone(), vec![0.7; 4], true).unwrap();
        assert!(eq.effective_lambda().unwrap().iter().all(|&l| (l - 0.25).abs() < 1e-15));
        let peaked = Lla::new(s.clone(), vec![20.0, 0.0, 0.0, 0.0], true).unwrap();
        assert!(peaked.effective_lambda().unwrap()[0] > 1.0 - 1e-8);
        let free = Lla::new(s, vec![1.0; 4], false).unwrap();
        assert!(matches!(free.effective_lambda(), Err(Error::Usage(_))));
    }

    #[test]
    fn instantiate_uses_kaiming_scale() {
        let s = lib(&[Relu, Gelu, Tanh, Sigmoid]);
        let spec = ActivationKind::Qla { constrained: false }
            .instantiate(Some(&s), &mut Rng::new(1))
            .unwrap();
        assert_eq!(spec.parameter_count(), 4 + 10);
        assert!(ActivationKind::Lla { constrained: true }
            .instantiate(None, &mut Rng::new(1))
            .is_err());
    }

    #[test]
    fn kind_serializes_compactly() {
        let k: ActivationKind = serde_json::from_str(r#"{"lla":{}}"#).unwrap();
        assert_eq!(k, ActivationKind::Lla { constrained: true });
        let k: ActivationKind = serde_json::from_str(r#"{"qla":{}}"#).unwrap();
        assert_eq!(k, ActivationKind::Qla { constrained: false });
        let k: ActivationKind = serde_json::from_str(r#"{"fixed":"relu"}"#).unwrap();
        assert_eq!(k, ActivationKind::Fixed(Relu));
        assert!(serde_json::from_str::<ActivationKind>(r#"{"lla":{"constrianed":true}}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use crate::numcore::Rng;

        proptest! {
            #[test]
            fn softmax_sums_to_one(theta in proptest::collection::vec(-50.0f64..50.0, 1..8)) {
                let l = softmax(&theta);
                let total: f64 = l.iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                prop_assert!(l.iter().all(|&v| v >= 0.0));
            }

            #[test]
            fn lla_restriction_holds_at_random_inputs(seed in any::<u64>(), k in 0usize..4) {
                let s = lib(&[Relu, Gelu, Tanh, Sigmoid]);
                let x = random_matrix(&mut Rng::new(seed), 50, 2, 100.0);
                let lla = Lla::one_hot(s.clone(), k).unwrap();
                let diff = lla.forward(&x).0.max_abs_diff(&base_eval(s.members()[k], &x)).unwrap();
                prop_assert!(diff <= 1e-12);
            }
        }
    }
}
