use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Matrix;

/// Slope of the logistic approximation `GELU(x) ≈ x σ(1.702 x)`.
const GELU_SIGMOID_SLOPE: f64 = 1.702;

/// A scalar activation function from the library.
///
/// `Gelu` is the logistic approximation; `GeluErf` is the exact
/// `x Φ(x)` form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseActivation {
    Relu,
    Gelu,
    GeluErf,
    Tanh,
    Sigmoid,
    Sine,
    Cosine,
    SquareRational,
}

impl BaseActivation {
    pub const ALL: [BaseActivation; 8] = [
        BaseActivation::Relu,
        BaseActivation::Gelu,
        BaseActivation::GeluErf,
        BaseActivation::Tanh,
        BaseActivation::Sigmoid,
        BaseActivation::Sine,
        BaseActivation::Cosine,
        BaseActivation::SquareRational,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseActivation::Relu => "relu",
            BaseActivation::Gelu => "gelu",
            BaseActivation::GeluErf => "gelu_erf",
            BaseActivation::Tanh => "tanh",
            BaseActivation::Sigmoid => "sigmoid",
            BaseActivation::Sine => "sine",
            BaseActivation::Cosine => "cosine",
            BaseActivation::SquareRational => "square_rational",
        }
    }

    #[inline]
    pub fn value(self, x: f64) -> f64 {
        match self {
            BaseActivation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            BaseActivation::Gelu => x * sigmoid(GELU_SIGMOID_SLOPE * x),
            BaseActivation::GeluErf => x * std_normal_cdf(x),
            BaseActivation::Tanh => x.tanh(),
            BaseActivation::Sigmoid => sigmoid(x),
            BaseActivation::Sine => x.sin(),
            BaseActivation::Cosine => x.cos(),
            BaseActivation::SquareRational => {
                if x.abs() <= 1.0 {
                    let x2 = x * x;
                    x2 / (1.0 + x2)
                } else {
                    let r = 1.0 / x;
                    1.0 / (1.0 + r * r)
                }
            }
        }
    }

    /// Derivative; `relu'(0)` is 0.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            BaseActivation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            BaseActivation::Gelu => {
                let s = sigmoid(GELU_SIGMOID_SLOPE * x);
                // x s (1 - s) -> 0 as |x| -> inf; guard the 0 * inf corner.
                let tail = GELU_SIGMOID_SLOPE * x * s * (1.0 - s);
                s + if tail.is_finite() { tail } else { 0.0 }
            }
            BaseActivation::GeluErf => {
                let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
                std_normal_cdf(x) + x * pdf
            }
            BaseActivation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            BaseActivation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            BaseActivation::Sine => x.cos(),
            BaseActivation::Cosine => -x.sin(),
            BaseActivation::SquareRational => {
                if x.abs() <= 1.0 {
                    let d = 1.0 + x * x;
                    2.0 * x / (d * d)
                } else {
                    let r = 1.0 / x;
                    let d = 1.0 + r * r;
                    2.0 * r * r * r / (d * d)
                }
            }
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

impl fmt::Display for BaseActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseActivation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseActivation::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown activation '{s}'")))
    }
}

/// Applies `act` entrywise.
pub fn base_eval(act: BaseActivation, x: &Matrix) -> Matrix {
    x.map(|v| act.value(v))
}

/// Entrywise derivative of `act`.
pub fn base_grad(act: BaseActivation, x: &Matrix) -> Matrix {
    x.map(|v| act.derivative(v))
}

/// Ordered, duplicate-free list of base activations. Coefficient indices of
/// learnable layers refer to this order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BaseActivation>", into = "Vec<BaseActivation>")]
pub struct ActivationLibrary {
    members: Vec<BaseActivation>,
}

impl ActivationLibrary {
    pub fn new(members: Vec<BaseActivation>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("activation library must not be empty".into()));
        }
        for (i, a) in members.iter().enumerate() {
            if members[..i].contains(a) {
                return Err(Error::Config(format!("activation '{a}' listed twice in library")));
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[BaseActivation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, act: BaseActivation) -> Option<usize> {
        self.members.iter().position(|&a| a == act)
    }
}

impl TryFrom<Vec<BaseActivation>> for ActivationLibrary {
    type Error = Error;

    fn try_from(members: Vec<BaseActivation>) -> Result<Self> {
        Self::new(members)
    }
}

impl From<ActivationLibrary> for Vec<BaseActivation> {
    fn from(lib: ActivationLibrary) -> Self {
        lib.members
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Rng;
    use BaseActivation::*;

    #[test]
    fn relu_values_and_derivative_convention() {
        assert_eq!(Relu.value(-1.0), 0.0);
        assert_eq!(Relu.value(2.0), 2.0);
        assert_eq!(Relu.derivative(0.0), 0.0);
        assert_eq!(Relu.derivative(1e-300), 1.0);
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(Sigmoid.value(0.0), 0.5);
        assert_eq!(Tanh.value(0.0), 0.0);
        assert_eq!(Gelu.value(0.0), 0.0);
        assert_eq!(GeluErf.value(0.0), 0.0);
        assert_eq!(SquareRational.value(0.0), 0.0);
        assert_eq!(Tanh.derivative(0.0), 1.0);
        assert_eq!(Sigmoid.derivative(0.0), 0.25);
    }

    #[test]
    fn hand_evaluated_points() {
        assert_eq!(SquareRational.value(1.0), 0.5);
        // 1 / (1 + e^-1.702)
        assert!((Gelu.value(1.0) - 0.845_79).abs() < 1e-5);
        // Φ(1) = 0.841344746...
        assert!((GeluErf.value(1.0) - 0.841_344_746_068_543).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = Rng::new(7);
        let h = 1e-5;
        for act in BaseActivation::ALL {
            for _ in 0..100 {
                let mut x = rng.uniform_range(-4.0, 4.0);
                if act == Relu && x.abs() < 1e-3 {
                    x += 0.01;
                }
                let fd = (act.value(x + h) - act.value(x - h)) / (2.0 * h);
                let an = act.derivative(x);
                let rel = (fd - an).abs() / an.abs().max(fd.abs()).max(1e-3);
                assert!(rel < 1e-6, "{act} at {x}: analytic {an} vs fd {fd}");
            }
        }
    }

    #[test]
    fn large_inputs_stay_finite() {
        for act in BaseActivation::ALL {
            for &x in &[-1e6, -1e3, -40.0, 40.0, 1e3, 1e6, 1e300, -1e300] {
                assert!(act.value(x).is_finite(), "{act}({x})");
                assert!(act.derivative(x).is_finite(), "{act}'({x})");
            }
        }
        assert_eq!(Sigmoid.value(-1e6), 0.0);
        assert_eq!(SquareRational.value(1e300), 1.0);
    }

    #[test]
    fn tags_round_trip_through_strings() {
        for act in BaseActivation::ALL {
            assert_eq!(act.name().parse::<BaseActivation>().unwrap(), act);
            let json = serde_json::to_string(&act).unwrap();
            assert_eq!(json, format!("\"{}\"", act.name()));
        }
        assert!("swish".parse::<BaseActivation>().is_err());
    }

    #[test]
    fn library_rejects_empty_and_duplicates() {
        assert!(ActivationLibrary::new(vec![]).is_err());
        assert!(ActivationLibrary::new(vec![Relu, Tanh, Relu]).is_err());
        let lib: ActivationLibrary = serde_json::from_str(r#"["relu","sine"]"#).unwrap();
        assert_eq!(lib.members(), &[Relu, Sine]);
        assert!(serde_json::from_str::<ActivationLibrary>(r#"["relu","relu"]"#).is_err());
    }
}
