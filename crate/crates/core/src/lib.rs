//! Feedforward networks whose hidden layers can use *learnable* activations:
//! linear (LLA) and quadratic (QLA) combinations over an ordered library of
//! base activation functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`numcore`]: dense row-major `f64` matrices and a seeded RNG.
//! - [`activations`]: the base library, LLA and QLA with analytic gradients.
//! - [`network`]: the MLP, its forward/backward passes and checkpoints.
//! - [`optim`]: Adam, initializers and the mini-batch training loop.
//! - [`sampling`]: Halton points and regular grids.
//! - [`benchmarks`]: the synthetic regression targets.
//! - [`tsdata`]: ETT-style CSV ingestion, splitting, normalization, windowing.
//! - [`harness`]: experiment configs, runners, metrics and the CLI.
//!
//! A learnable layer reduces exactly to a fixed-activation layer at one-hot
//! coefficients (and, for QLA, a zero quadratic part), so every fixed network
//! is a restriction of its LLA/QLA counterpart.

pub mod activations;
pub mod benchmarks;
pub mod error;
pub mod harness;
pub mod network;
pub mod numcore;
pub mod optim;
pub mod sampling;
pub mod tsdata;

pub use activations::{ActivationLibrary, ActivationSpec, BaseActivation, Lla, Qla};
pub use error::{Error, Result};
pub use network::{Architecture, Mlp};
pub use numcore::{Matrix, Rng};
