//! Synthetic regression targets on boxed domains.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Matrix;
use crate::sampling::{scale_to_box, HaltonSampler};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Ackley,
    Shubert,
    HyperEllipsoid,
    Levy,
    Styblinski,
    Shekel,
    Griewank,
    Zhou,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 8] = [
        FunctionKind::Ackley,
        FunctionKind::Shubert,
        FunctionKind::HyperEllipsoid,
        FunctionKind::Levy,
        FunctionKind::Styblinski,
        FunctionKind::Shekel,
        FunctionKind::Griewank,
        FunctionKind::Zhou,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Ackley => "ackley",
            FunctionKind::Shubert => "shubert",
            FunctionKind::HyperEllipsoid => "hyperellipsoid",
            FunctionKind::Levy => "levy",
            FunctionKind::Styblinski => "styblinski",
            FunctionKind::Shekel => "shekel",
            FunctionKind::Griewank => "griewank",
            FunctionKind::Zhou => "zhou",
        }
    }

    /// Per-axis default evaluation interval.
    pub fn default_interval(self) -> (f64, f64) {
        match self {
            FunctionKind::Ackley => (-32.768, 32.768),
            FunctionKind::Shubert => (-10.0, 10.0),
            FunctionKind::HyperEllipsoid => (-65.536, 65.536),
            FunctionKind::Levy => (-10.0, 10.0),
            FunctionKind::Styblinski => (-5.0, 5.0),
            FunctionKind::Shekel => (0.0, 10.0),
            FunctionKind::Griewank => (-600.0, 600.0),
            FunctionKind::Zhou => (0.0, 1.0),
        }
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown test function '{s}'")))
    }
}

/// Shekel constants. `c` holds one 4-vector per term (the columns of the
/// usual 4×m matrix); coordinates beyond the function's `dim` are taken
/// from `fixed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShekelParams {
    pub c: Vec<[f64; 4]>,
    pub beta: Vec<f64>,
    #[serde(default = "default_shekel_fixed")]
    pub fixed: f64,
}

fn default_shekel_fixed() -> f64 {
    4.0
}

impl Default for ShekelParams {
    /// The usual m = 10 setting.
    fn default() -> Self {
        let a = [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0];
        let b = [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6];
        let c = (0..10).map(|i| [a[i], b[i], a[i], b[i]]).collect();
        let beta = [1.0, 2.0, 2.0, 4.0, 4.0, 6.0, 3.0, 7.0, 5.0, 5.0]
            .iter()
            .map(|v| 0.1 * v)
            .collect();
        Self {
            c,
            beta,
            fixed: default_shekel_fixed(),
        }
    }
}

impl ShekelParams {
    pub fn validate(&self) -> Result<()> {
        if self.c.is_empty() || self.c.len() != self.beta.len() {
            return Err(Error::Config(format!(
                "shekel needs matching non-empty c and beta, got {} and {}",
                self.c.len(),
                self.beta.len()
            )));
        }
        if self.beta.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::Config("shekel beta entries must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub kind: FunctionKind,
    pub dim: usize,
    pub domain: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shekel: Option<ShekelParams>,
}

impl TestFunction {
    /// Function on its default domain, with default Shekel constants.
    pub fn new(kind: FunctionKind, dim: usize) -> Result<Self> {
        let shekel = (kind == FunctionKind::Shekel).then(ShekelParams::default);
        Self::with_domain(kind, dim, vec![kind.default_interval(); dim], shekel)
    }

    pub fn with_domain(
        kind: FunctionKind,
        dim: usize,
        domain: Vec<(f64, f64)>,
        shekel: Option<ShekelParams>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config(format!("{kind}: dimension must be at least 1")));
        }
        if kind == FunctionKind::Shekel && dim > 4 {
            return Err(Error::Config(format!("shekel is defined on at most 4 inputs, got {dim}")));
        }
        if domain.len() != dim {
            return Err(Error::Config(format!(
                "{kind}: domain has {} axes for dimension {dim}",
                domain.len()
            )));
        }
        if let Some((axis, _)) = domain.iter().enumerate().find(|(_, (lo, hi))| !(lo < hi)) {
            return Err(Error::Config(format!("{kind}: domain axis {axis} is empty")));
        }
        let shekel = match (kind, shekel) {
            (FunctionKind::Shekel, None) => Some(ShekelParams::default()),
            (FunctionKind::Shekel, Some(p)) => {
                p.validate()?;
                Some(p)
            }
            (_, Some(_)) => {
                return Err(Error::Config(format!("{kind}: shekel constants given")));
            }
            (_, None) => None,
        };
        Ok(Self {
            kind,
            dim,
            domain,
            shekel,
        })
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn lower(&self) -> Vec<f64> {
        self.domain.iter().map(|d| d.0).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.domain.iter().map(|d| d.1).collect()
    }
}

/// Evaluates `f` at `x`, refusing points outside the declared domain.
pub fn eval_fn(f: &TestFunction, x: &[f64]) -> Result<f64> {
    if x.len() != f.dim {
        return Err(Error::Shape {
            op: "eval_fn",
            left: (1, x.len()),
            right: (1, f.dim),
        });
    }
    for (axis, (&v, &(lo, hi))) in x.iter().zip(&f.domain).enumerate() {
        if !(v >= lo && v <= hi) {
            return Err(Error::Domain {
                function: f.name().to_string(),
                axis,
                value: v,
                lo,
                hi,
            });
        }
    }
    Ok(eval_unchecked(f, x))
}

fn eval_unchecked(f: &TestFunction, x: &[f64]) -> f64 {
    let d = x.len() as f64;
    match f.kind {
        FunctionKind::Ackley => {
            let r = (x.iter().map(|v| v * v).sum::<f64>() / d).sqrt();
            let c = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
            // Grouped so both halves cancel exactly at the origin.
            (20.0 - 20.0 * (-0.2 * r).exp()) + (E - c.exp())
        }
        FunctionKind::Shubert => x
            .iter()
            .map(|&xk| {
                (1..=5)
                    .map(|i| {
                        let i = i as f64;
                        i * ((i + 1.0) * xk + i).cos()
                    })
                    .sum::<f64>()
            })
            .product(),
        FunctionKind::HyperEllipsoid => {
            let mut prefix = 0.0;
            let mut total = 0.0;
            for v in x {
                prefix += v * v;
                total += prefix;
            }
            total
        }
        FunctionKind::Levy => {
            let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
            let last = w[w.len() - 1];
            let body: f64 = w
                .iter()
                .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
                .sum();
            (PI * w[0]).sin().powi(2) + body + (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2))
        }
        FunctionKind::Styblinski => {
            0.5 * x.iter().map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>()
        }
        FunctionKind::Shekel => {
            let p = f.shekel.as_ref().expect("validated shekel constants");
            let mut full = [p.fixed; 4];
            full[..x.len()].copy_from_slice(x);
            -p.c
                .iter()
                .zip(&p.beta)
                .map(|(c, b)| {
                    let s: f64 = full.iter().zip(c).map(|(xj, cj)| (xj - cj).powi(2)).sum();
                    1.0 / (s + b)
                })
                .sum::<f64>()
        }
        FunctionKind::Griewank => {
            let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
            let prod: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            (1.0 - prod) + sum
        }
        FunctionKind::Zhou => {
            let phi = |center: f64| {
                let sq: f64 = x.iter().map(|v| (10.0 * (v - center)).powi(2)).sum();
                (2.0 * PI).powf(-d / 2.0) * (-0.5 * sq).exp()
            };
            10f64.powf(d) / 2.0 * (phi(1.0 / 3.0) + phi(2.0 / 3.0))
        }
    }
}

/// Row-wise evaluation of a point matrix.
pub fn eval_rows(f: &TestFunction, x: &Matrix) -> Result<Matrix> {
    let values = x.iter_rows().map(|r| eval_fn(f, r)).collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(x.rows(), 1, values)
}

/// Draws the next `n` points from `sampler`, maps them onto the domain and
/// evaluates `f` on each.
pub fn make_dataset(f: &TestFunction, sampler: &mut HaltonSampler, n: usize) -> Result<(Matrix, Matrix)> {
    if n == 0 {
        return Err(Error::Param("dataset size must be at least 1".into()));
    }
    if sampler.dim() != f.dim {
        return Err(Error::Param(format!(
            "sampler dimension {} does not match {} dimension {}",
            sampler.dim(),
            f.name(),
            f.dim
        )));
    }
    let x = scale_to_box(&sampler.take_points(n), &f.lower(), &f.upper())?;
    let y = eval_rows(f, &x)?;
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Rng;

    fn f2(kind: FunctionKind) -> TestFunction {
        TestFunction::new(kind, 2).unwrap()
    }

    #[test]
    fn values_at_minimizers() {
        assert_eq!(eval_fn(&f2(FunctionKind::Ackley), &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(eval_fn(&f2(FunctionKind::Griewank), &[0.0, 0.0]).unwrap(), 0.0);
        // sin(pi) is not exactly zero in floating point.
        assert!(eval_fn(&f2(FunctionKind::Levy), &[1.0, 1.0]).unwrap().abs() < 1e-30);
        assert_eq!(eval_fn(&f2(FunctionKind::HyperEllipsoid), &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(eval_fn(&f2(FunctionKind::HyperEllipsoid), &[1.0, 1.0]).unwrap(), 3.0);
    }

    #[test]
    fn hand_values() {
        // Ackley at (1, 0): r = 1/sqrt(2), cosine mean = 1.
        let want = 20.0 - 20.0 * (-0.2 / 2f64.sqrt()).exp() + E - E;
        let got = eval_fn(&f2(FunctionKind::Ackley), &[1.0, 0.0]).unwrap();
        assert!((got - want).abs() < 1e-12);
        // Styblinski at the origin and at 1: 0.5 * (1 - 16 + 5) per axis.
        assert_eq!(eval_fn(&f2(FunctionKind::Styblinski), &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(eval_fn(&f2(FunctionKind::Styblinski), &[1.0, 1.0]).unwrap(), -10.0);
        // Zhou at a center: the other bump is 10/3 standard deviations away.
        let z = eval_fn(&f2(FunctionKind::Zhou), &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let far = (-0.5 * 2.0 * (10.0f64 / 3.0).powi(2)).exp();
        assert!((z - 100.0 / 2.0 / (2.0 * PI) * (1.0 + far)).abs() < 1e-9);
    }

    #[test]
    fn shekel_near_its_optimum() {
        let v = eval_fn(&f2(FunctionKind::Shekel), &[4.0, 4.0]).unwrap();
        assert!((v + 10.5364).abs() < 2e-3, "{v}");
        let p = ShekelParams {
            fixed: 0.0,
            ..ShekelParams::default()
        };
        let moved = TestFunction::with_domain(FunctionKind::Shekel, 2, vec![(0.0, 10.0); 2], Some(p)).unwrap();
        assert!(eval_fn(&moved, &[4.0, 4.0]).unwrap() > -1.0);
        let four = TestFunction::new(FunctionKind::Shekel, 4).unwrap();
        assert_eq!(eval_fn(&four, &[4.0; 4]).unwrap(), v);
        assert!(TestFunction::new(FunctionKind::Shekel, 5).is_err());
    }

    #[test]
    fn domain_errors_name_the_axis() {
        let f = f2(FunctionKind::Zhou);
        match eval_fn(&f, &[0.5, 1.5]).unwrap_err() {
            Error::Domain { axis, value, .. } => {
                assert_eq!(axis, 1);
                assert_eq!(value, 1.5);
            }
            e => panic!("{e}"),
        }
        assert!(eval_fn(&f, &[f64::NAN, 0.5]).is_err());
        assert!(eval_fn(&f, &[0.5]).is_err());
        assert!(eval_fn(&f, &[0.0, 1.0]).is_ok());
    }

    #[test]
    fn symmetric_functions() {
        let mut rng = Rng::new(4);
        for kind in [FunctionKind::Ackley, FunctionKind::Zhou] {
            let f = f2(kind);
            let (lo, hi) = kind.default_interval();
            for _ in 0..200 {
                let a = rng.uniform_range(lo, hi);
                let b = rng.uniform_range(lo, hi);
                assert_eq!(eval_fn(&f, &[a, b]).unwrap(), eval_fn(&f, &[b, a]).unwrap());
            }
        }
        // Both of these weight their axes differently.
        let e = f2(FunctionKind::HyperEllipsoid);
        assert_ne!(eval_fn(&e, &[1.0, 2.0]).unwrap(), eval_fn(&e, &[2.0, 1.0]).unwrap());
        let g = f2(FunctionKind::Griewank);
        assert_ne!(eval_fn(&g, &[1.0, 2.0]).unwrap(), eval_fn(&g, &[2.0, 1.0]).unwrap());
    }

    #[test]
    fn nonnegative_functions() {
        let mut rng = Rng::new(5);
        for kind in [FunctionKind::Ackley, FunctionKind::Griewank, FunctionKind::HyperEllipsoid] {
            let f = f2(kind);
            let (lo, hi) = kind.default_interval();
            for _ in 0..2000 {
                let x = [rng.uniform_range(lo, hi), rng.uniform_range(lo, hi)];
                assert!(eval_fn(&f, &x).unwrap() >= 0.0, "{kind} {x:?}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for k in FunctionKind::ALL {
            assert_eq!(k.name().parse::<FunctionKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("rosenbrock".parse::<FunctionKind>().unwrap_err().is_config());
    }

    #[test]
    fn datasets() {
        let f = f2(FunctionKind::Ackley);
        let mut s = HaltonSampler::new(2).unwrap();
        let (x, y) = make_dataset(&f, &mut s, 1).unwrap();
        assert_eq!(x.row(0), &[0.0, -32.768 + 65.536 / 3.0]);
        assert_eq!(y.get(0, 0), eval_fn(&f, x.row(0)).unwrap());

        let (xa, ya) = make_dataset(&f, &mut HaltonSampler::new(2).unwrap(), 15_000).unwrap();
        let (xb, yb) = make_dataset(&f, &mut HaltonSampler::new(2).unwrap(), 15_000).unwrap();
        assert_eq!((&xa, &ya), (&xb, &yb));
        // The Ackley basin at the origin is a cusp narrower than the point
        // spacing, so the best sample sits a few tenths away from it.
        let (arg, min) = ya
            .as_slice()
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        assert!(min < 3.0, "{min}");
        assert!(xa.row(arg).iter().all(|v| v.abs() < 0.5), "{:?}", xa.row(arg));

        assert!(make_dataset(&f, &mut HaltonSampler::new(3).unwrap(), 5).is_err());
        assert!(make_dataset(&f, &mut s, 0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TestFunction::with_domain(FunctionKind::Levy, 2, vec![(0.0, 1.0)], None).is_err());
        assert!(TestFunction::with_domain(FunctionKind::Levy, 2, vec![(1.0, 0.0); 2], None).is_err());
        assert!(TestFunction::with_domain(FunctionKind::Levy, 2, vec![(0.0, 1.0); 2], Some(ShekelParams::default())).is_err());
        let bad = ShekelParams {
            beta: vec![0.1],
            ..ShekelParams::default()
        };
        assert!(TestFunction::with_domain(FunctionKind::Shekel, 2, vec![(0.0, 10.0); 2], Some(bad)).is_err());
    }
}
