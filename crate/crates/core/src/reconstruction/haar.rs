use crate::error::{Error, Result};
use crate::numerics::RMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Haar,
    UserSupplied,
}

/// Real `L × P` basis `Ψ`; inputs are assumed to be `v = Ψ α`.
#[derive(Debug, Clone)]
pub struct SparseBasis {
    pub psi: RMatrix,
    pub family: BasisFamily,
}

impl SparseBasis {
    pub fn user_supplied(psi: RMatrix) -> Result<Self> {
        if psi.rows() == 0 || psi.cols() == 0 {
            return Err(Error::domain("empty basis"));
        }
        Ok(Self {
            psi,
            family: BasisFamily::UserSupplied,
        })
    }

    pub fn len(&self) -> usize {
        self.psi.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.rows() == 0
    }

    pub fn size(&self) -> usize {
        self.psi.cols()
    }

    /// `Ψ α`.
    pub fn synthesize(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.psi.matvec(alpha)
    }

    /// `Ψᵀ v`, the coefficients of an orthonormal basis.
    pub fn analyze(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.psi.t_matvec(v)
    }
}

/// First `p` columns of the orthonormal Haar system on `len` samples.
///
/// Ordering: scaling function, then wavelets level by level (coarsest first),
/// left to right within a level.
pub fn haar_basis(len: usize, p: usize) -> Result<SparseBasis> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::domain(format!("Haar basis length must be a power of two, got {len}")));
    }
    if p == 0 || p > len {
        return Err(Error::domain(format!("Haar basis size must be in 1..={len}, got {p}")));
    }
    let mut psi = RMatrix::zeros(len, p);
    let scale = 1.0 / (len as f64).sqrt();
    for i in 0..len {
        psi[(i, 0)] = scale;
    }
    let mut col = 1;
    let mut level = 0;
    while col < p {
        let blocks = 1usize << level;
        let support = len / blocks;
        let amp = 1.0 / (support as f64).sqrt();
        for b in 0..blocks {
            if col == p {
                break;
            }
            let start = b * support;
            for i in 0..support {
                psi[(start + i, col)] = if i < support / 2 { amp } else { -amp };
            }
            col += 1;
        }
        level += 1;
    }
    Ok(SparseBasis {
        psi,
        family: BasisFamily::Haar,
    })
}
