use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// How radii are drawn on the annulus `r_min ≤ |λ| ≤ r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RingDensity {
    /// Uniform over the annulus area: `r = sqrt(u (r_max² − r_min²) + r_min²)`.
    #[default]
    Area,
    /// Uniform in radius: `r = r_min + u (r_max − r_min)`.
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenInitKind {
    Ring {
        r_min: f64,
        r_max: f64,
        density: RingDensity,
    },
    RootsOfUnity,
    RealUniform {
        lo: f64,
        hi: f64,
    },
}

/// Eigenvalue initializer for an `n`-state recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenInit {
    pub kind: EigenInitKind,
    pub n: usize,
}

impl EigenInit {
    pub fn ring(n: usize, r_min: f64, r_max: f64) -> Self {
        Self {
            kind: EigenInitKind::Ring {
                r_min,
                r_max,
                density: RingDensity::Area,
            },
            n,
        }
    }

    pub fn roots_of_unity(n: usize) -> Self {
        Self {
            kind: EigenInitKind::RootsOfUnity,
            n,
        }
    }

    pub fn real_uniform(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            kind: EigenInitKind::RealUniform { lo, hi },
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("eigenvalue count must be >= 1"));
        }
        match self.kind {
            EigenInitKind::Ring { r_min, r_max, .. } => {
                if !(0.0 <= r_min && r_min <= r_max && r_max <= 1.0) {
                    return Err(Error::domain(format!(
                        "ring radii must satisfy 0 <= r_min <= r_max <= 1, got [{r_min}, {r_max}]"
                    )));
                }
            }
            EigenInitKind::RealUniform { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::domain(format!("real range needs lo < hi, got [{lo}, {hi})")));
                }
            }
            EigenInitKind::RootsOfUnity => {}
        }
        Ok(())
    }
}

/// Draws eigenvalues; random kinds resample exact duplicates so the result is pairwise distinct.
pub fn init_eigenvalues<R: Rng + ?Sized>(spec: &EigenInit, rng: &mut R) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let n = spec.n;
    let draw = |rng: &mut R| -> Complex64 {
        match spec.kind {
            EigenInitKind::Ring {
                r_min,
                r_max,
                density,
            } => {
                let theta = TAU * rng.random::<f64>();
                let u = rng.random::<f64>();
                let r = match density {
                    RingDensity::Area => (u * (r_max * r_max - r_min * r_min) + r_min * r_min).sqrt(),
                    RingDensity::Radius => r_min + u * (r_max - r_min),
                };
                Complex64::from_polar(r, theta)
            }
            EigenInitKind::RealUniform { lo, hi } => Complex64::new(lo + (hi - lo) * rng.random::<f64>(), 0.0),
            EigenInitKind::RootsOfUnity => unreachable!(),
        }
    };
    if let EigenInitKind::RootsOfUnity = spec.kind {
        return Ok((0..n)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64))
            .collect());
    }
    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = draw(rng);
        if !out.contains(&z) {
            out.push(z);
        }
    }
    Ok(out)
}
