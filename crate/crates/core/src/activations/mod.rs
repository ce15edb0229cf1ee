//! Base activation library and the learnable combinations built on it.
//!
//! A library `S = (a_1, …, a_|S|)` is an ordered list of scalar functions.
//! Learnable layers combine its members with one coefficient set per layer:
//!
//! - LLA: `g(x) = Σ_j λ_j a_j(x)`
//! - QLA: `g(x) = Σ_{j≤k} Λ_jk a_j(x) a_k(x) + Σ_j λ_j a_j(x)`
//!
//! With `λ = e_k` (and `Λ = 0`) both collapse to `a_k`, so a fixed-activation
//! network is always reachable from its learnable counterpart.

mod base;
mod learnable;

pub use base::{base_eval, base_grad, ActivationLibrary, BaseActivation};
pub use learnable::{
    packed_len, softmax, ActivationCache, ActivationGrad, ActivationKind, ActivationSpec, Lla,
    Qla,
};
