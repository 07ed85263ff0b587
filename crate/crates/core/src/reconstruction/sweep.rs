//! Conditioning and reconstruction-error sweeps over eigenvalue initializations.
//!
//! Cells are independent and evaluated in parallel; output order is always the
//! deterministic grid order (r_min, then P, then seed).

use rayon::prelude::*;

use super::haar::{haar_basis, SparseBasis};
use super::map::ReconstructionMap;
use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::recurrence::{init_eigenvalues, DiagonalLinearRnn, EigenInit, EigenInitKind, RingDensity};
use crate::rng;
use crate::stats::median;

/// Stand-in for `log₁₀ ∞` so tables stay plottable.
pub const INFINITE_LOG10_COND: f64 = 308.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// `cond(V_L)`.
    Vandermonde,
    /// `cond(ΓᴴΓ)` with `Γ = V_L Ψ_L` for a Haar basis of size `P`.
    Omega,
}

impl SweepMode {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMode::Vandermonde => "vandermonde",
            SweepMode::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepInit {
    /// `λ ~ T[r_min, r_max]`, `r_min` taken from the grid.
    Ring { r_max: f64, density: RingDensity },
    /// `N`-th roots of unity; grid values are recorded but unused.
    RootsOfUnity,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub seq_len: usize,
    pub state_dim: usize,
    pub r_grid: Vec<f64>,
    /// Basis sizes `P`; only used in omega mode.
    pub basis_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub init: SweepInit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondRow {
    pub mode: SweepMode,
    pub r_min: f64,
    pub p: Option<usize>,
    pub seed: u64,
    pub log10_cond: f64,
}

fn eigen_init(init: SweepInit, n: usize, r_min: f64) -> EigenInit {
    match init {
        SweepInit::Ring { r_max, density } => EigenInit {
            kind: EigenInitKind::Ring {
                r_min,
                r_max,
                density,
            },
            n,
        },
        SweepInit::RootsOfUnity => EigenInit::roots_of_unity(n),
    }
}

fn eigen_stream(seed: u64, r_index: usize) -> rng::Rng {
    rng::indexed_stream(seed, "eigenvalues", r_index as u64)
}

fn log10_or_sentinel(cond: f64) -> f64 {
    if cond.is_finite() {
        cond.log10().min(INFINITE_LOG10_COND)
    } else {
        INFINITE_LOG10_COND
    }
}

pub fn conditioning_sweep(spec: &SweepSpec) -> Result<Vec<CondRow>> {
    if spec.r_grid.is_empty() || spec.seeds.is_empty() {
        return Err(Error::domain("conditioning sweep needs a non-empty r grid and seed list"));
    }
    if spec.mode == SweepMode::Omega && spec.basis_sizes.is_empty() {
        return Err(Error::domain("omega sweep needs at least one basis size"));
    }
    let sizes: Vec<Option<usize>> = match spec.mode {
        SweepMode::Vandermonde => vec![None],
        SweepMode::Omega => spec.basis_sizes.iter().map(|&p| Some(p)).collect(),
    };
    let mut cells = Vec::new();
    for (ri, &r_min) in spec.r_grid.iter().enumerate() {
        for &p in &sizes {
            for &seed in &spec.seeds {
                cells.push((ri, r_min, p, seed));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(ri, r_min, p, seed)| {
            let init = eigen_init(spec.init, spec.state_dim, r_min);
            let lambda = init_eigenvalues(&init, &mut eigen_stream(seed, ri))?;
            let log10_cond = match p {
                None => log10_or_sentinel(ReconstructionMap::full(&lambda, spec.seq_len, None)?.condition()),
                Some(p) => {
                    let basis = haar_basis(spec.seq_len, p)?;
                    let cond = ReconstructionMap::sparse(&lambda, &basis, spec.seq_len, None)?.condition();
                    // cond(ΓᴴΓ) = cond(Γ)², taken in log space to avoid squaring into overflow.
                    (2.0 * log10_or_sentinel(cond)).min(INFINITE_LOG10_COND)
                }
            };
            Ok(CondRow {
                mode: spec.mode,
                r_min,
                p,
                seed,
                log10_cond,
            })
        })
        .collect()
}

/// Which inverse the error profile uses.
#[derive(Debug, Clone)]
pub enum ProfileMode {
    Full,
    Sparse(SparseBasis),
}

/// Per-timestep squared reconstruction error from the terminal state `x_L`.
#[derive(Debug, Clone)]
pub struct ErrorProfile {
    pub seeds: Vec<u64>,
    /// `mse[s][t]`: mean over inputs of `(v̂_t − v_t)²` for seed `s`, timestep `t` (oldest first).
    pub mse: Vec<Vec<f64>>,
    /// Condition number of the inverted matrix per seed.
    pub cond: Vec<f64>,
}

impl ErrorProfile {
    pub fn seq_len(&self) -> usize {
        self.mse.first().map_or(0, Vec::len)
    }

    /// Median over seeds, per timestep.
    pub fn median_over_seeds(&self) -> Vec<f64> {
        (0..self.seq_len())
            .map(|t| median(&self.mse.iter().map(|row| row[t]).collect::<Vec<_>>()))
            .collect()
    }

    /// Mean over timesteps, per seed.
    pub fn mean_per_seed(&self) -> Vec<f64> {
        self.mse
            .iter()
            .map(|row| row.iter().sum::<f64>() / row.len() as f64)
            .collect()
    }
}

/// Scans every input with a `B = 1` recurrence drawn from `init` (one draw per seed),
/// reconstructs the whole sequence from `x_L` and records the per-timestep MSE.
pub fn reconstruction_error_profile(
    init: &EigenInit,
    seeds: &[u64],
    inputs: &[Vec<f64>],
    mode: &ProfileMode,
    rcond: Option<f64>,
) -> Result<ErrorProfile> {
    let len = match inputs.first() {
        Some(v) if !v.is_empty() => v.len(),
        _ => return Err(Error::domain("error profile needs at least one non-empty input")),
    };
    if inputs.iter().any(|v| v.len() != len) {
        return Err(Error::domain("all inputs must share one length"));
    }
    if seeds.is_empty() {
        return Err(Error::domain("error profile needs at least one seed"));
    }
    let rows: Vec<(Vec<f64>, f64)> = seeds
        .par_iter()
        .map(|&seed| {
            let lambda = init_eigenvalues(init, &mut eigen_stream(seed, 0))?;
            let map = match mode {
                ProfileMode::Full => ReconstructionMap::full(&lambda, len, rcond)?,
                ProfileMode::Sparse(basis) => ReconstructionMap::sparse(&lambda, basis, len, rcond)?,
            };
            let rnn = DiagonalLinearRnn::with_unit_input(lambda)?;
            let mut acc = vec![0.0; len];
            for v in inputs {
                let x = rnn.final_state(&CMatrix::from_real(1, len, v)?)?;
                let rec = map.recover_tokens(&x)?;
                for ((a, r), t) in acc.iter_mut().zip(&rec).zip(v) {
                    let d = r.re - t;
                    *a += d * d;
                }
            }
            let n = inputs.len() as f64;
            Ok((acc.into_iter().map(|a| a / n).collect(), map.condition()))
        })
        .collect::<Result<_>>()?;
    let (mse, cond) = rows.into_iter().unzip();
    Ok(ErrorProfile {
        seeds: seeds.to_vec(),
        mse,
        cond,
    })
}
