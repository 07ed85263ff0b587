//! The diagonal complex recursion `x_k = Λ x_{k-1} + B u_k`, `x_0 = 0`.

mod init;
mod scan;

pub use init::{init_eigenvalues, EigenInit, EigenInitKind, RingDensity};
pub use scan::{combine, prefix_scan_channel, ScanElement};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, RMatrix};

/// Diagonal linear RNN: eigenvalues `λ` (diagonal of Λ) and input matrix `B` (N × H).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalLinearRnn {
    lambda: Vec<Complex64>,
    b: CMatrix,
}

/// Hidden states, N × L; column `k` is `x_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenTrajectory {
    pub states: CMatrix,
}

impl HiddenTrajectory {
    pub fn len(&self) -> usize {
        self.states.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.states.cols() == 0
    }

    /// State after the last token.
    pub fn last(&self) -> Vec<Complex64> {
        self.states.col(self.states.cols() - 1)
    }
}

impl DiagonalLinearRnn {
    pub fn new(lambda: Vec<Complex64>, b: CMatrix) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::domain("recurrence needs at least one state"));
        }
        if b.rows() != lambda.len() {
            return Err(Error::Shape {
                op: "rnn: B rows vs state size",
                left: b.shape(),
                right: (lambda.len(), 1),
            });
        }
        if lambda.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("eigenvalues".into()));
        }
        Ok(Self { lambda, b })
    }

    /// Single-input RNN with `B = (1, …, 1)ᵀ`.
    pub fn with_unit_input(lambda: Vec<Complex64>) -> Result<Self> {
        let n = lambda.len();
        Self::new(lambda, CMatrix::from_fn(n, 1, |_, _| Complex64::new(1.0, 0.0)))
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn state_dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    fn check_input(&self, u: &CMatrix) -> Result<()> {
        if u.rows() != self.input_dim() || u.cols() == 0 {
            return Err(Error::Shape {
                op: "scan: input (H x L) vs B",
                left: u.shape(),
                right: self.b.shape(),
            });
        }
        Ok(())
    }

    /// Driving terms `B u_k`, stored channel-major (N rows of length L).
    fn drive(&self, u: &CMatrix) -> Vec<Vec<Complex64>> {
        let (n, h, l) = (self.state_dim(), self.input_dim(), u.cols());
        let mut out = vec![vec![Complex64::new(0.0, 0.0); l]; n];
        for (i, row) in out.iter_mut().enumerate() {
            let bi = self.b.row(i);
            for (k, w) in row.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..h {
                    acc += bi[j] * u[(j, k)];
                }
                *w = acc;
            }
        }
        out
    }

    /// Left-to-right evaluation.
    pub fn scan_sequential(&self, u: &CMatrix) -> Result<HiddenTrajectory> {
        self.check_input(u)?;
        let l = u.cols();
        let drive = self.drive(u);
        let mut states = CMatrix::zeros(self.state_dim(), l);
        for (i, w) in drive.iter().enumerate() {
            let lam = self.lambda[i];
            let mut x = Complex64::new(0.0, 0.0);
            for (k, wk) in w.iter().enumerate() {
                x = lam * x + wk;
                states[(i, k)] = x;
            }
        }
        Ok(HiddenTrajectory { states })
    }

    /// Work-efficient (Blelloch) prefix scan over `(Λ, B u_k)` pairs, one tree per channel.
    ///
    /// The tree shape depends only on `L`, so results are reproducible; channels run
    /// in parallel.
    pub fn scan_parallel(&self, u: &CMatrix) -> Result<HiddenTrajectory> {
        use rayon::prelude::*;

        self.check_input(u)?;
        let l = u.cols();
        let drive = self.drive(u);
        let rows: Vec<Vec<Complex64>> = drive
            .into_par_iter()
            .zip(self.lambda.par_iter())
            .map(|(w, &lam)| prefix_scan_channel(lam, &w))
            .collect();
        let mut states = CMatrix::zeros(self.state_dim(), l);
        for (i, row) in rows.iter().enumerate() {
            for (k, &x) in row.iter().enumerate() {
                states[(i, k)] = x;
            }
        }
        Ok(HiddenTrajectory { states })
    }

    /// `x_L` only, evaluated sequentially without storing the trajectory.
    pub fn final_state(&self, u: &CMatrix) -> Result<Vec<Complex64>> {
        self.check_input(u)?;
        let drive = self.drive(u);
        Ok(drive
            .iter()
            .zip(&self.lambda)
            .map(|(w, &lam)| w.iter().fold(Complex64::new(0.0, 0.0), |x, wk| lam * x + wk))
            .collect())
    }

    /// Prepends a counting state: `λ₀ = 1` fed by a constant-1 input channel.
    ///
    /// The returned RNN expects inputs `(1, v_k)`; its first state is then `k`.
    pub fn with_time_channel(&self) -> Self {
        let (n, h) = (self.state_dim(), self.input_dim());
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut lambda = Vec::with_capacity(n + 1);
        lambda.push(one);
        lambda.extend_from_slice(&self.lambda);
        let b = CMatrix::from_fn(n + 1, h + 1, |i, j| match (i, j) {
            (0, 0) => one,
            (0, _) | (_, 0) => zero,
            _ => self.b[(i - 1, j - 1)],
        });
        Self { lambda, b }
    }
}

/// Stacks single-input RNNs into one block-diagonal RNN; input `m` drives block `m` only.
pub fn block_diag_lift(per_dim: &[DiagonalLinearRnn]) -> Result<DiagonalLinearRnn> {
    match per_dim {
        [] => Err(Error::domain("block lift of an empty RNN list")),
        [only] => {
            if only.input_dim() != 1 {
                return Err(Error::domain("block lift expects single-input RNNs"));
            }
            Ok(only.clone())
        }
        _ => {
            if let Some(pos) = per_dim.iter().position(|r| r.input_dim() != 1) {
                return Err(Error::domain(format!(
                    "block lift expects single-input RNNs; entry {pos} has {} inputs",
                    per_dim[pos].input_dim()
                )));
            }
            let m = per_dim.len();
            let n: usize = per_dim.iter().map(|r| r.state_dim()).sum();
            let mut lambda = Vec::with_capacity(n);
            let mut b = CMatrix::zeros(n, m);
            let mut offset = 0;
            for (dim, rnn) in per_dim.iter().enumerate() {
                lambda.extend_from_slice(rnn.lambda());
                for i in 0..rnn.state_dim() {
                    b[(offset + i, dim)] = rnn.b()[(i, 0)];
                }
                offset += rnn.state_dim();
            }
            DiagonalLinearRnn::new(lambda, b)
        }
    }
}

/// `|λ_i|^j` for `j = 0..L`: how strongly a token `j` steps old survives in channel `i`.
pub fn memory_profile(lambda: &[Complex64], len: usize) -> Result<RMatrix> {
    if len == 0 {
        return Err(Error::domain("memory profile needs L >= 1"));
    }
    let mut out = RMatrix::zeros(lambda.len(), len);
    for (i, lam) in lambda.iter().enumerate() {
        let r = lam.norm();
        let mut p = 1.0;
        for j in 0..len {
            out[(i, j)] = p;
            p *= r;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_row(values: &[f64]) -> CMatrix {
        CMatrix::from_real(1, values.len(), values).unwrap()
    }

    #[test]
    fn halving_recurrence() {
        let rnn = DiagonalLinearRnn::with_unit_input(vec![c(0.5, 0.0)]).unwrap();
        let x = rnn.scan_sequential(&real_row(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(x.states.row(0), &[c(1.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)]);
    }

    #[test]
    fn memoryless_case() {
        let b = CMatrix::new(2, 1, vec![c(2.0, 0.0), c(0.0, 1.0)]).unwrap();
        let rnn = DiagonalLinearRnn::new(vec![c(0.0, 0.0); 2], b).unwrap();
        let u = real_row(&[1.0, -3.0, 2.0]);
        let x = rnn.scan_sequential(&u).unwrap();
        for k in 0..3 {
            assert_eq!(x.states[(0, k)], c(2.0, 0.0) * u[(0, k)]);
            assert_eq!(x.states[(1, k)], c(0.0, 1.0) * u[(0, k)]);
        }
    }

    #[test]
    fn single_and_two_step_parallel() {
        let rnn = DiagonalLinearRnn::with_unit_input(vec![c(0.3, 0.4), c(-0.9, 0.1)]).unwrap();
        let u1 = real_row(&[0.7]);
        assert_eq!(rnn.scan_parallel(&u1).unwrap(), rnn.scan_sequential(&u1).unwrap());
        let u2 = real_row(&[0.7, -1.1]);
        let p = rnn.scan_parallel(&u2).unwrap();
        for (i, &lam) in rnn.lambda().iter().enumerate() {
            let want = lam * c(0.7, 0.0) + c(-1.1, 0.0);
            assert!((p.states[(i, 1)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let rnn = DiagonalLinearRnn::with_unit_input(vec![c(0.5, 0.0)]).unwrap();
        assert!(rnn.scan_sequential(&CMatrix::zeros(2, 3)).is_err());
        assert!(rnn.scan_parallel(&CMatrix::zeros(2, 3)).is_err());
        assert!(DiagonalLinearRnn::new(vec![c(1.0, 0.0)], CMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn time_channel_counts() {
        let rnn = DiagonalLinearRnn::with_unit_input(vec![c(0.5, 0.5), c(0.9, 0.0)])
            .unwrap()
            .with_time_channel();
        assert_eq!(rnn.state_dim(), 3);
        assert_eq!(rnn.input_dim(), 2);
        let l = 6;
        let u = CMatrix::from_fn(2, l, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let x = rnn.scan_sequential(&u).unwrap();
        for k in 0..l {
            assert_eq!(x.states[(0, k)], c((k + 1) as f64, 0.0));
            assert_eq!(x.states[(1, k)], c(0.0, 0.0));
            assert_eq!(x.states[(2, k)], c(0.0, 0.0));
        }
    }

    #[test]
    fn block_lift_pattern() {
        let a = DiagonalLinearRnn::with_unit_input(vec![c(0.1, 0.0), c(0.2, 0.0)]).unwrap();
        let b = DiagonalLinearRnn::with_unit_input(vec![c(0.3, 0.0), c(0.4, 0.0)]).unwrap();
        assert_eq!(block_diag_lift(std::slice::from_ref(&a)).unwrap(), a);
        let lifted = block_diag_lift(&[a, b]).unwrap();
        let ones = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        for (i, row) in ones.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(lifted.b()[(i, j)], c(v, 0.0));
            }
        }
        assert!(block_diag_lift(&[]).is_err());
    }

    #[test]
    fn memory_profile_values() {
        let p = memory_profile(&[c(0.0, 1.0), c(0.5, 0.0)], 3).unwrap();
        assert_eq!(p.row(0), &[1.0, 1.0, 1.0]);
        assert_eq!(p.row(1), &[1.0, 0.5, 0.25]);
        assert!(memory_profile(&[c(1.0, 0.0)], 0).is_err());
    }
}
