//! Halton low-discrepancy points and regular grids.

use crate::error::{Error, Result};
use crate::numcore::Matrix;

/// The first `n` primes.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Van der Corput radical inverse of `index` in `base`.
///
/// The digit-reversed numerator and `base^k` denominator are built in exact
/// integer arithmetic, so the result is the correctly rounded rational.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let b = base as u128;
    let mut num: u128 = 0;
    let mut den: u128 = 1;
    while index > 0 {
        num = num * b + (index % base) as u128;
        den *= b;
        index /= base;
    }
    num as f64 / den as f64
}

/// Plain (unscrambled) Halton sequence over the first `dim` primes, starting
/// at index 1 so that no coordinate is ever 0.
#[derive(Clone, Debug, PartialEq)]
pub struct HaltonSampler {
    bases: Vec<u64>,
    index: u64,
}

impl HaltonSampler {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Param("Halton dimension must be at least 1".into()));
        }
        Ok(Self {
            bases: first_primes(dim),
            index: 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    /// Index of the next point to be emitted (1-based).
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.bases.iter().map(|&b| radical_inverse(i, b)).collect()
    }

    /// The next `n` points as an `n × dim` matrix.
    pub fn take_points(&mut self, n: usize) -> Matrix {
        let dim = self.dim();
        let mut data = Vec::with_capacity(n * dim);
        for _ in 0..n {
            data.extend(self.next_point());
        }
        Matrix::from_vec(n, dim, data).expect("sized by construction")
    }
}

/// Maps unit-cube points affinely onto `[lo_k, hi_k]` per column.
pub fn scale_to_box(points: &Matrix, lo: &[f64], hi: &[f64]) -> Result<Matrix> {
    if lo.len() != points.cols() || hi.len() != points.cols() {
        return Err(Error::Shape {
            op: "scale_to_box",
            left: points.shape(),
            right: (lo.len(), hi.len()),
        });
    }
    for k in 0..lo.len() {
        if !(lo[k] < hi[k]) {
            return Err(Error::Param(format!(
                "box axis {k} has lo {} >= hi {}",
                lo[k], hi[k]
            )));
        }
    }
    let mut out = points.clone();
    for r in 0..out.rows() {
        for (k, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = lo[k] + (hi[k] - lo[k]) * *v;
        }
    }
    Ok(out)
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// `n × n` lattice on `[lo_0, hi_0] × [lo_1, hi_1]`, endpoints included.
/// Rows run with the first coordinate outer and the second inner.
pub fn grid2d(lo: [f64; 2], hi: [f64; 2], n: usize) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::Param(format!("grid needs at least 2 points per axis, got {n}")));
    }
    if !(lo[0] < hi[0] && lo[1] < hi[1]) {
        return Err(Error::Param("grid bounds must satisfy lo < hi".into()));
    }
    let xs = axis(lo[0], hi[0], n);
    let ys = axis(lo[1], hi[1], n);
    let mut data = Vec::with_capacity(2 * n * n);
    for &x in &xs {
        for &y in &ys {
            data.push(x);
            data.push(y);
        }
    }
    Matrix::from_vec(n * n, 2, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_sequence() {
        let mut s = HaltonSampler::new(1).unwrap();
        assert_eq!(s.next_point(), vec![0.5]);
        assert_eq!(s.next_point(), vec![0.25]);
        assert_eq!(s.next_point(), vec![0.75]);
    }

    #[test]
    fn first_two_dimensional_point() {
        let mut s = HaltonSampler::new(2).unwrap();
        assert_eq!(s.next_point(), vec![0.5, 1.0 / 3.0]);
        assert_eq!(s.index(), 2);
    }

    #[test]
    fn primes_are_increasing() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(HaltonSampler::new(4).unwrap().bases(), &[2, 3, 5, 7]);
        assert!(HaltonSampler::new(0).is_err());
    }

    #[test]
    fn coordinates_stay_inside_the_open_cube() {
        let pts = HaltonSampler::new(5).unwrap().take_points(20_000);
        assert!(pts.as_slice().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn restart_reproduces_sequence() {
        let a = HaltonSampler::new(3).unwrap().take_points(500);
        let b = HaltonSampler::new(3).unwrap().take_points(500);
        assert_eq!(a, b);
    }

    #[test]
    fn quadrants_are_balanced() {
        let pts = HaltonSampler::new(2).unwrap().take_points(1024);
        let mut counts = [0usize; 4];
        for r in pts.iter_rows() {
            counts[(r[0] >= 0.5) as usize * 2 + (r[1] >= 0.5) as usize] += 1;
        }
        for c in counts {
            let dev = (c as f64 - 256.0).abs() / 256.0;
            assert!(dev <= 0.05, "{counts:?}");
        }
    }

    #[test]
    fn box_scaling() {
        let p = Matrix::from_rows(&[[0.25], [0.5]]).unwrap();
        let s = scale_to_box(&p, &[-10.0], &[10.0]).unwrap();
        assert_eq!(s.as_slice(), &[-5.0, 0.0]);
        assert_eq!(scale_to_box(&p, &[0.0], &[1.0]).unwrap(), p);
        assert!(scale_to_box(&p, &[1.0], &[-1.0]).is_err());
        assert!(scale_to_box(&p, &[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn grids() {
        let corners = grid2d([0.0, 0.0], [1.0, 1.0], 2).unwrap();
        assert_eq!(corners.as_slice(), &[0., 0., 0., 1., 1., 0., 1., 1.]);
        let g3 = grid2d([0.0, 0.0], [1.0, 1.0], 3).unwrap();
        assert_eq!(g3.rows(), 9);
        assert!(g3.iter_rows().any(|r| r == [0.5, 0.5]));
        let big = grid2d([-10.0, -10.0], [10.0, 10.0], 101).unwrap();
        assert_eq!(big.rows(), 10201);
        assert!((big.get(101, 0) - big.get(0, 0) - 0.2).abs() < 1e-12);
        assert!((big.get(1, 1) - big.get(0, 1) - 0.2).abs() < 1e-12);
        assert_eq!(big.get(10200, 0), 10.0);
        assert!(grid2d([0.0, 0.0], [1.0, 1.0], 1).is_err());
    }
}
