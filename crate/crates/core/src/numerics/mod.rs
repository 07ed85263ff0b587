//! Dense complex linear algebra.
//!
//! Everything here is a pure function of its inputs. Sums run in a fixed order
//! (row-major, increasing inner index) so results are bit-stable across runs.

mod matrix;
mod solve;
mod svd;

pub use matrix::{matops, CMatrix, MatOp, RMatrix};
pub use solve::{condition_number, default_rcond, lstsq, pseudoinverse};
pub use svd::{svd, SvdResult, JACOBI_MAX_SWEEPS, JACOBI_TOL};
