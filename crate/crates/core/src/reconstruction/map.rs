use num_complex::Complex64;

use super::haar::SparseBasis;
use super::vandermonde::build_vandermonde;
use crate::error::{Error, Result};
use crate::numerics::{default_rcond, svd, CMatrix};

/// `cond(V_k)` above which [`reconstruct_full`] attaches a warning.
pub const ILL_CONDITIONED_WARN: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMode {
    /// Recovers the `k` tokens directly: `Ω_k = V_k⁺`.
    Full,
    /// Recovers `P` basis coefficients: `Ω_k = Γ_k⁺` with `Γ_k = V_k Ψ_k`.
    Sparse,
}

/// Non-fatal diagnostics attached to a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum ReconstructionWarning {
    IllConditioned { cond: f64 },
    RankDeficient { rank: usize, wanted: usize, sigma_min: f64 },
}

/// Linear map from a hidden state `x_k ∈ ℂᴺ` to tokens (`Full`) or coefficients (`Sparse`).
#[derive(Debug, Clone)]
pub struct ReconstructionMap {
    /// `k × N` (full) or `P × N` (sparse).
    pub omega: CMatrix,
    pub horizon: usize,
    pub mode: MapMode,
    /// Singular values of the inverted matrix (`V_k` or `Γ_k`), descending.
    pub sigma: Vec<f64>,
    /// Singular values kept by the truncation.
    pub rank: usize,
    /// Truncated `Ψ_k` for sparse maps.
    psi_k: Option<CMatrix>,
}

impl ReconstructionMap {
    /// `Ω_k = V_k⁺` for a `B = 1` recurrence with eigenvalues `lambda`.
    pub fn full(lambda: &[Complex64], k: usize, rcond: Option<f64>) -> Result<Self> {
        let v = build_vandermonde(lambda, k)?;
        Self::from_matrix(&v.matrix, k, MapMode::Full, rcond, None)
    }

    /// `Ω_k = Γ_k⁺` with `Γ_k = V_k Ψ_k` and `Ψ_k` the first `k` rows of the basis.
    pub fn sparse(lambda: &[Complex64], basis: &SparseBasis, k: usize, rcond: Option<f64>) -> Result<Self> {
        if k > basis.len() {
            return Err(Error::domain(format!(
                "horizon {k} exceeds basis length {}",
                basis.len()
            )));
        }
        let v = build_vandermonde(lambda, k)?;
        let psi_k = basis.psi.top_rows(k).to_complex();
        let gamma = v.matrix.matmul(&psi_k)?;
        Self::from_matrix(&gamma, k, MapMode::Sparse, rcond, Some(psi_k))
    }

    fn from_matrix(
        a: &CMatrix,
        horizon: usize,
        mode: MapMode,
        rcond: Option<f64>,
        psi_k: Option<CMatrix>,
    ) -> Result<Self> {
        let rcond = rcond.unwrap_or_else(|| default_rcond(a));
        if !(rcond >= 0.0) {
            return Err(Error::domain(format!("rcond must be non-negative, got {rcond}")));
        }
        let s = svd(a)?;
        let cutoff = rcond * s.sigma_max();
        let (m, n) = a.shape();
        let kept: Vec<(usize, f64)> = s
            .sigma
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > cutoff && x > 0.0)
            .map(|(k, &x)| (k, 1.0 / x))
            .collect();
        let omega = CMatrix::from_fn(n, m, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(k, inv) in &kept {
                acc += s.v[(i, k)] * inv * s.u[(j, k)].conj();
            }
            acc
        });
        Ok(Self {
            omega,
            horizon,
            mode,
            rank: kept.len(),
            sigma: s.sigma,
            psi_k,
        })
    }

    /// Condition number of the inverted matrix; infinite if it is numerically singular.
    pub fn condition(&self) -> f64 {
        let hi = self.sigma.first().copied().unwrap_or(0.0);
        let lo = self.sigma.last().copied().unwrap_or(0.0);
        if lo < hi * 1e-300 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Spectral norm `‖Ω_k‖₂`.
    pub fn omega_norm(&self) -> f64 {
        self.sigma
            .iter()
            .take(self.rank)
            .last()
            .map(|s| 1.0 / s)
            .unwrap_or(0.0)
    }

    /// `Ω_k x`: tokens (full) or coefficients (sparse).
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.omega.matvec(x)
    }

    /// Tokens `v_{1:k}`, oldest first, for either mode.
    pub fn recover_tokens(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let y = self.apply(x)?;
        match &self.psi_k {
            None => Ok(y),
            Some(psi) => psi.matvec(&y),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FullReconstruction {
    /// `u_{1:k}`, oldest first.
    pub values: Vec<Complex64>,
    pub cond: f64,
    pub warnings: Vec<ReconstructionWarning>,
}

#[derive(Debug, Clone)]
pub struct SparseReconstruction {
    pub alpha: Vec<Complex64>,
    /// `Ψ_k α`, oldest first.
    pub values: Vec<Complex64>,
    pub sigma_min: f64,
    pub rank: usize,
    pub warnings: Vec<ReconstructionWarning>,
}

fn check_state(x: &[Complex64], lambda: &[Complex64]) -> Result<()> {
    if x.len() != lambda.len() {
        return Err(Error::Shape {
            op: "reconstruct: state vs eigenvalues",
            left: (x.len(), 1),
            right: (lambda.len(), 1),
        });
    }
    Ok(())
}

/// `V_k⁺ x_k` for a state produced with `B = (1, …, 1)ᵀ`.
pub fn reconstruct_full(
    x: &[Complex64],
    lambda: &[Complex64],
    k: usize,
    rcond: Option<f64>,
) -> Result<FullReconstruction> {
    check_state(x, lambda)?;
    let map = ReconstructionMap::full(lambda, k, rcond)?;
    let cond = map.condition();
    let mut warnings = Vec::new();
    if cond > ILL_CONDITIONED_WARN {
        log::warn!("reconstruction from an ill-conditioned Vandermonde (cond {cond:e})");
        warnings.push(ReconstructionWarning::IllConditioned { cond });
    }
    Ok(FullReconstruction {
        values: map.apply(x)?,
        cond,
        warnings,
    })
}

/// Coefficients `α_k = Γ_k⁺ x_k` and tokens `Ψ_k α_k`.
pub fn reconstruct_sparse(
    x: &[Complex64],
    lambda: &[Complex64],
    basis: &SparseBasis,
    k: usize,
    rcond: Option<f64>,
) -> Result<SparseReconstruction> {
    check_state(x, lambda)?;
    let map = ReconstructionMap::sparse(lambda, basis, k, rcond)?;
    let alpha = map.apply(x)?;
    let values = map.psi_k.as_ref().expect("sparse map keeps Ψ_k").matvec(&alpha)?;
    let sigma_min = map.sigma.last().copied().unwrap_or(0.0);
    let wanted = basis.size();
    let mut warnings = Vec::new();
    if map.rank < wanted {
        log::warn!("sparse reconstruction: rank {} < {wanted} (sigma_min {sigma_min:e})", map.rank);
        warnings.push(ReconstructionWarning::RankDeficient {
            rank: map.rank,
            wanted,
            sigma_min,
        });
    }
    Ok(SparseReconstruction {
        alpha,
        values,
        sigma_min,
        rank: map.rank,
        warnings,
    })
}
