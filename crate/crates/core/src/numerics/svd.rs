//! One-sided (Hestenes) Jacobi SVD.
//!
//! Rotations act on the columns of `A` itself, never on `AᴴA`, so small singular
//! values keep their relative accuracy even when κ(A) approaches 1e15.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Column pairs with `|⟨a_p, a_q⟩| ≤ JACOBI_TOL · ‖a_p‖‖a_q‖` count as orthogonal.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 60;

/// Thin SVD `A = U · diag(sigma) · Vᴴ` with `r = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// m × r, orthonormal columns.
    pub u: CMatrix,
    /// Descending, non-negative.
    pub sigma: Vec<f64>,
    /// n × r, orthonormal columns.
    pub v: CMatrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `rcond · σ_max`.
    pub fn rank(&self, rcond: f64) -> usize {
        let cutoff = rcond * self.sigma_max();
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }

    /// `U · diag(sigma) · Vᴴ`.
    pub fn reconstruct(&self) -> CMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let r = self.sigma.len();
        CMatrix::from_fn(m, n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..r {
                acc += self.u[(i, k)] * self.sigma[k] * self.v[(j, k)].conj();
            }
            acc
        })
    }
}

pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::domain(format!("svd of empty {:?} matrix", a.shape())));
    }
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        // A = (Aᴴ)ᴴ: decompose the tall adjoint and swap the factors.
        let t = jacobi_tall(&a.adjoint())?;
        Ok(SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    // xᴴ y
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex64::new(re, im)
}

fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.re * z.re + z.im * z.im).sum()
}

/// Applies `[p, q] ← [p, q] · [[c, s], [-s·ē, c·ē]]` to two columns.
fn rotate(p: &mut [Complex64], q: &mut [Complex64], c: f64, s: f64, e_conj: Complex64) {
    for (x, y) in p.iter_mut().zip(q.iter_mut()) {
        let yq = *y * e_conj;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

fn two_columns(buf: &mut [Complex64], len: usize, p: usize, q: usize) -> (&mut [Complex64], &mut [Complex64]) {
    debug_assert!(p < q);
    let (lo, hi) = buf.split_at_mut(q * len);
    (&mut lo[p * len..(p + 1) * len], &mut hi[..len])
}

fn jacobi_tall(a: &CMatrix) -> Result<SvdResult> {
    let m = a.rows();
    let n = a.cols();
    // Column-major working copies.
    let mut w = vec![Complex64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for j in 0..n {
            w[j * m + i] = a[(i, j)];
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        v[j * n + j] = Complex64::new(1.0, 0.0);
    }

    let mut converged = n < 2;
    let mut residual = 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        residual = 0.0_f64;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (cp, cq) = two_columns(&mut w, m, p, q);
                let alpha = norm_sqr(cp);
                let beta = norm_sqr(cq);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(cp, cq);
                let g = gamma.norm();
                let off = g / (alpha.sqrt() * beta.sqrt());
                residual = residual.max(off);
                if off <= JACOBI_TOL {
                    continue;
                }
                rotated = true;
                let e_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cp, cq, c, s, e_conj);
                let (vp, vq) = two_columns(&mut v, n, p, q);
                rotate(vp, vq, c, s, e_conj);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            residual,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| norm_sqr(&w[j * m..(j + 1) * m]).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &j in &order {
        let col = &w[j * m..(j + 1) * m];
        if norms[j] > 0.0 {
            u_cols.push(col.iter().map(|z| z / norms[j]).collect());
        } else {
            u_cols.push(Vec::new());
        }
    }
    complete_orthonormal(&mut u_cols, m);

    let u = CMatrix::from_fn(m, n, |i, k| u_cols[k][i]);
    let v = CMatrix::from_fn(n, n, |i, k| v[order[k] * n + i]);
    Ok(SvdResult { u, sigma, v })
}

/// Fills empty columns (zero singular values) with unit vectors orthogonal to the rest.
fn complete_orthonormal(cols: &mut [Vec<Complex64>], m: usize) {
    let missing: Vec<usize> = (0..cols.len()).filter(|&k| cols[k].is_empty()).collect();
    let mut basis = 0;
    for k in missing {
        while basis < m {
            let mut cand = vec![Complex64::new(0.0, 0.0); m];
            cand[basis] = Complex64::new(1.0, 0.0);
            basis += 1;
            // Two passes of Gram–Schmidt.
            for _ in 0..2 {
                for other in cols.iter().filter(|c| !c.is_empty()) {
                    let proj = dot(other, &cand);
                    for (x, o) in cand.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let nrm = norm_sqr(&cand).sqrt();
            if nrm > 1e-8 {
                cols[k] = cand.into_iter().map(|z| z / nrm).collect();
                break;
            }
        }
    }
}
