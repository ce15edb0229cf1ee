//! Dense matrices and deterministic random numbers.

mod matrix;
mod rng;

pub use matrix::{elementwise, BinaryOp, Matrix};
pub use rng::{rng_normal, Rng};
