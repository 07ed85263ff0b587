use num_complex::Complex64;

use super::matrix::CMatrix;
use super::svd::svd;
use crate::error::{Error, Result};

/// `max(rows, cols) · ε`.
pub fn default_rcond(a: &CMatrix) -> f64 {
    a.rows().max(a.cols()) as f64 * f64::EPSILON
}

/// `σ_max / σ_min` over the `min(rows, cols)` singular values.
///
/// Returns `f64::INFINITY` when `σ_min < σ_max · 1e-300`.
pub fn condition_number(a: &CMatrix) -> Result<f64> {
    if a.max_abs() == 0.0 {
        return Err(Error::domain("condition number of an all-zero matrix"));
    }
    let s = svd(a)?;
    let (hi, lo) = (s.sigma_max(), s.sigma_min());
    if lo < hi * 1e-300 {
        Ok(f64::INFINITY)
    } else {
        Ok(hi / lo)
    }
}

/// Truncated-SVD pseudoinverse; singular values `≤ rcond · σ_max` are dropped.
///
/// `rcond = None` uses [`default_rcond`].
pub fn pseudoinverse(a: &CMatrix, rcond: Option<f64>) -> Result<CMatrix> {
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
    // A⁺ = V Σ⁺ Uᴴ, n × m.
    Ok(CMatrix::from_fn(n, m, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, inv) in &kept {
            acc += s.v[(i, k)] * inv * s.u[(j, k)].conj();
        }
        acc
    }))
}

/// Minimal-norm least-squares solution `x = A⁺ b`.
pub fn lstsq(a: &CMatrix, b: &CMatrix, rcond: Option<f64>) -> Result<CMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape {
            op: "lstsq",
            left: a.shape(),
            right: b.shape(),
        });
    }
    pseudoinverse(a, rcond)?.matmul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = crate::rng::stream(seed, "solve-test");
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn condition_of_identity_and_diag() {
        assert_eq!(condition_number(&CMatrix::identity(5)).unwrap(), 1.0);
        let d = CMatrix::diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(condition_number(&d).unwrap(), 2.0);
        assert!(matches!(
            condition_number(&CMatrix::zeros(2, 2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn singular_matrix_is_infinite() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(condition_number(&a).unwrap(), f64::INFINITY);
    }

    #[test]
    fn pinv_of_invertible_is_inverse() {
        let a = random(5, 5, 3);
        let p = pseudoinverse(&a, None).unwrap();
        let eye = p.matmul(&a).unwrap();
        assert!(eye.sub(&CMatrix::identity(5)).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn pinv_of_zero_is_zero_transposed() {
        let p = pseudoinverse(&CMatrix::zeros(2, 3), None).unwrap();
        assert_eq!(p, CMatrix::zeros(3, 2));
    }

    #[test]
    fn rank_one_moore_penrose() {
        let a = CMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        let p = pseudoinverse(&a, None).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.sub(&a).unwrap().max_abs() < 1e-10);
        // Minimal-norm map for a = x yᵀ with x = y = (1, 2): A⁺ = A / 25.
        assert!(p.sub(&a.scale(c(1.0 / 25.0, 0.0))).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn negative_rcond_rejected() {
        assert!(pseudoinverse(&CMatrix::identity(2), Some(-1.0)).is_err());
    }

    #[test]
    fn lstsq_identity_and_planted() {
        let b = random(4, 2, 5);
        let x = lstsq(&CMatrix::identity(4), &b, None).unwrap();
        assert!(x.sub(&b).unwrap().max_abs() < 1e-15);

        let a = random(9, 4, 6);
        let planted = random(4, 1, 7);
        let rhs = a.matmul(&planted).unwrap();
        let x = lstsq(&a, &rhs, None).unwrap();
        assert!(x.sub(&planted).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn lstsq_inconsistent_satisfies_normal_equations() {
        let a = random(10, 3, 8);
        let b = random(10, 1, 9);
        let x = lstsq(&a, &b, None).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap();
        let normal = a.adjoint_matmul(&r).unwrap();
        assert!(normal.max_abs() < 1e-9);
        assert!(lstsq(&a, &random(9, 1, 1), None).is_err());
    }
}
