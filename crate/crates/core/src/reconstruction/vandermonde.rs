use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// `N × k` Vandermonde matrix in decreasing-power order: entry `(i, j) = λ_i^{k-1-j}`.
///
/// Column 0 multiplies the oldest token, the last column is all ones.
#[derive(Debug, Clone)]
pub struct VandermondeMatrix {
    pub matrix: CMatrix,
    pub eigenvalues: Vec<Complex64>,
    pub horizon: usize,
}

pub fn build_vandermonde(lambda: &[Complex64], k: usize) -> Result<VandermondeMatrix> {
    if k == 0 {
        return Err(Error::domain("Vandermonde horizon k must be >= 1"));
    }
    if lambda.is_empty() {
        return Err(Error::domain("Vandermonde needs at least one eigenvalue"));
    }
    let mut matrix = CMatrix::zeros(lambda.len(), k);
    for (i, &lam) in lambda.iter().enumerate() {
        let mut p = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            matrix[(i, j)] = p;
            p *= lam;
        }
    }
    Ok(VandermondeMatrix {
        matrix,
        eigenvalues: lambda.to_vec(),
        horizon: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    fn det(a: &CMatrix) -> Complex64 {
        let n = a.rows();
        let mut m: Vec<Vec<Complex64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
        let mut d = c(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm())).unwrap();
            if piv != col {
                m.swap(piv, col);
                d = -d;
            }
            let p = m[col][col];
            d *= p;
            for r in col + 1..n {
                let f = m[r][col] / p;
                for j in col..n {
                    let t = m[col][j];
                    m[r][j] -= f * t;
                }
            }
        }
        d
    }

    #[test]
    fn small_pattern() {
        let v = build_vandermonde(&[c(2.0, 0.0), c(3.0, 0.0)], 2).unwrap();
        assert_eq!(v.matrix.row(0), &[c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(v.matrix.row(1), &[c(3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn horizon_one_is_ones() {
        let v = build_vandermonde(&[c(0.3, 0.2), c(-2.0, 1.0), c(0.0, 0.0)], 1).unwrap();
        assert_eq!(v.matrix.col(0), vec![c(1.0, 0.0); 3]);
        assert!(build_vandermonde(&[c(1.0, 0.0)], 0).is_err());
    }

    #[test]
    fn entries_are_powers() {
        let lam = [c(0.9, 0.3), c(-0.5, 0.7)];
        let v = build_vandermonde(&lam, 6).unwrap();
        for (i, l) in lam.iter().enumerate() {
            for j in 0..6 {
                let want = l.powu((5 - j) as u32);
                assert!((v.matrix[(i, j)] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn determinant_product_formula() {
        let mut rng = crate::rng::stream(11, "vdm");
        for n in 2..=8 {
            for _ in 0..5 {
                let lam: Vec<Complex64> = (0..n)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let v = build_vandermonde(&lam, n).unwrap();
                let got = det(&v.matrix);
                let mut want = c(1.0, 0.0);
                for i in 0..n {
                    for j in i + 1..n {
                        want *= lam[i] - lam[j];
                    }
                }
                let tol = if n == 3 { 1e-10 } else { 1e-9 };
                let err = (got - want).norm().min((got + want).norm());
                assert!(err <= tol * want.norm(), "n={n} got {got} want ±{want}");
            }
        }
    }
}
