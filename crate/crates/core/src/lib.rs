//! Diagonal complex linear recurrences and their memory.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: dense complex matrices, one-sided Jacobi SVD, pseudoinverse, least squares.
//! - [`recurrence`]: the diagonal recursion `x_k = Λ x_{k-1} + B u_k`, sequential and
//!   prefix-scan evaluation, eigenvalue initializers, time channel and block lift.
//! - [`reconstruction`]: Vandermonde matrices, recovering inputs (or sparse coefficients)
//!   from a hidden state, Haar bases, conditioning and error sweeps.
//! - [`network`]: the trainable encoder → recurrence → head model with manual BPTT and Adam.
//! - [`datagen`]: controlled ODE trajectories, smooth and sparse input samplers, IDX images.

pub mod container;
pub mod datagen;
pub mod error;
pub mod network;
pub mod numerics;
pub mod reconstruction;
pub mod recurrence;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{CMatrix, RMatrix};
