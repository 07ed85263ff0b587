//! Recovering inputs from a hidden state.
//!
//! With `B = (1, …, 1)ᵀ` the state after `k` tokens is `x_k = V_k u_{1:k}ᵀ`, where `V_k`
//! holds decreasing eigenvalue powers. Inverting `V_k` (or `V_k Ψ_k` for inputs known
//! to live in the span of a basis `Ψ`) gives back the tokens.

mod haar;
mod map;
mod sweep;
mod vandermonde;

pub use haar::{haar_basis, BasisFamily, SparseBasis};
pub use map::{
    reconstruct_full, reconstruct_sparse, FullReconstruction, MapMode, ReconstructionMap,
    ReconstructionWarning, SparseReconstruction, ILL_CONDITIONED_WARN,
};
pub use sweep::{
    conditioning_sweep, reconstruction_error_profile, CondRow, ErrorProfile, ProfileMode, SweepInit,
    SweepMode, SweepSpec, INFINITE_LOG10_COND,
};
pub use vandermonde::{build_vandermonde, VandermondeMatrix};
