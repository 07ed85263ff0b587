use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::RMatrix;
use crate::reconstruction::{haar_basis, SparseBasis};

/// Basis the smooth input sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowFrequencyFamily {
    /// Coarsest Haar functions (scaling function first).
    #[default]
    Haar,
    /// Orthonormal DCT-II cosines of lowest frequency.
    Cosine,
}

fn cosine_basis(len: usize, n: usize) -> RMatrix {
    let l = len as f64;
    RMatrix::from_fn(len, n, |t, j| {
        let scale = if j == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() };
        scale * (std::f64::consts::PI * j as f64 * (t as f64 + 0.5) / l).cos()
    })
}

/// `v = Σ c_j φ_j` with `c_j ~ N(0, 1)` over the first `n_basis` low-frequency functions,
/// rescaled so that `max |v| = 1`.
pub fn smooth_input_sampler<R: Rng + ?Sized>(
    len: usize,
    n_basis: usize,
    family: LowFrequencyFamily,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n_basis == 0 || n_basis > len {
        return Err(Error::domain(format!("n_basis must be in 1..={len}, got {n_basis}")));
    }
    let basis = match family {
        LowFrequencyFamily::Haar => haar_basis(len, n_basis)?.psi,
        LowFrequencyFamily::Cosine => cosine_basis(len, n_basis),
    };
    let coeffs: Vec<f64> = (0..n_basis).map(|_| rng.sample(StandardNormal)).collect();
    let v = basis.matvec(&coeffs)?;
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Ok(v);
    }
    Ok(v.into_iter().map(|x| x / peak).collect())
}

/// `n` signals `v = Ψ α` with `α ~ N(0, I_P)`.
pub fn sparse_signal_sampler<R: Rng + ?Sized>(basis: &SparseBasis, rng: &mut R, n: usize) -> Result<Vec<Vec<f64>>> {
    (0..n)
        .map(|_| {
            let alpha: Vec<f64> = (0..basis.size()).map(|_| rng.sample(StandardNormal)).collect();
            basis.synthesize(&alpha)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn projection_residual(basis: &RMatrix, v: &[f64]) -> f64 {
        let coeffs = basis.t_matvec(v).unwrap();
        let back = basis.matvec(&coeffs).unwrap();
        back.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn single_basis_is_constant() {
        let v = smooth_input_sampler(64, 1, LowFrequencyFamily::Haar, &mut rng::stream(1, "s")).unwrap();
        assert!(v.iter().all(|&x| (x.abs() - 1.0).abs() < 1e-15 && x == v[0]));
    }

    #[test]
    fn lies_in_span_and_normalized() {
        for family in [LowFrequencyFamily::Haar, LowFrequencyFamily::Cosine] {
            let v = smooth_input_sampler(256, 16, family, &mut rng::stream(2, "s")).unwrap();
            let basis = match family {
                LowFrequencyFamily::Haar => haar_basis(256, 16).unwrap().psi,
                LowFrequencyFamily::Cosine => cosine_basis(256, 16),
            };
            assert!(projection_residual(&basis, &v) <= 1e-12);
            let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            assert!((peak - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic() {
        let a = smooth_input_sampler(128, 16, LowFrequencyFamily::Haar, &mut rng::stream(3, "s")).unwrap();
        let b = smooth_input_sampler(128, 16, LowFrequencyFamily::Haar, &mut rng::stream(3, "s")).unwrap();
        assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        assert!(smooth_input_sampler(100, 16, LowFrequencyFamily::Haar, &mut rng::stream(3, "s")).is_err());
    }

    #[test]
    fn sparse_samples_are_exactly_sparse() {
        let basis = haar_basis(64, 8).unwrap();
        let samples = sparse_signal_sampler(&basis, &mut rng::stream(4, "s"), 20).unwrap();
        for v in &samples {
            assert!(projection_residual(&basis.psi, v) <= 1e-12);
        }
    }

    #[test]
    fn coefficient_variance_is_one() {
        let basis = haar_basis(32, 4).unwrap();
        let samples = sparse_signal_sampler(&basis, &mut rng::stream(5, "s"), 10_000).unwrap();
        for j in 0..4 {
            let var = samples
                .iter()
                .map(|v| basis.analyze(v).unwrap()[j].powi(2))
                .sum::<f64>()
                / samples.len() as f64;
            assert!((var - 1.0).abs() < 0.05, "coefficient {j}: {var}");
        }
    }

    #[test]
    fn full_basis_is_rotated_gaussian() {
        // P = L: the coefficients of an orthonormal basis are unconstrained N(0, 1).
        let basis = haar_basis(8, 8).unwrap();
        let samples = sparse_signal_sampler(&basis, &mut rng::stream(6, "s"), 4000).unwrap();
        let var_t0 = samples.iter().map(|v| v[0] * v[0]).sum::<f64>() / 4000.0;
        assert!((var_t0 - 1.0).abs() < 0.08, "{var_t0}");
    }
}
