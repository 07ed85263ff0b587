use lrnn_memory::recurrence::{init_eigenvalues, DiagonalLinearRnn, EigenInit, EigenInitKind, RingDensity};
use lrnn_memory::{rng, CMatrix, Complex64};
use proptest::prelude::*;
use rand::Rng;

fn cnormal(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

fn model(n: usize, m: usize, r_min: f64, seed: u64) -> DiagonalLinearRnn {
    let lambda = init_eigenvalues(&EigenInit::ring(n, r_min, 1.0), &mut rng::stream(seed, "eigenvalues")).unwrap();
    let mut r = rng::stream(seed, "b");
    DiagonalLinearRnn::new(lambda, CMatrix::from_fn(n, m, |_, _| cnormal(&mut r))).unwrap()
}

fn inputs(m: usize, l: usize, seed: u64, label: &str) -> CMatrix {
    let mut r = rng::stream(seed, label);
    CMatrix::from_fn(m, l, |_, _| cnormal(&mut r))
}

/// Worst per-channel error, each channel normalized by its own peak magnitude.
fn channel_rel(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.rows() {
        let scale = a.row(i).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let diff = a.row(i).iter().zip(b.row(i)).fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()));
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn parallel_scan_matches_sequential(n in 1usize..48, m in 1usize..4, l in 1usize..700, r_min in 0.0f64..1.0, seed in any::<u64>()) {
        let rnn = model(n, m, r_min, seed);
        let u = inputs(m, l, seed, "u");
        let seq = rnn.scan_sequential(&u).unwrap().states;
        let par = rnn.scan_parallel(&u).unwrap().states;
        prop_assert!(channel_rel(&seq, &par) <= 1e-12);
    }

    #[test]
    fn scan_is_linear(n in 1usize..24, m in 1usize..3, l in 1usize..200, seed in any::<u64>()) {
        let rnn = model(n, m, 0.5, seed);
        let (u, w) = (inputs(m, l, seed, "u"), inputs(m, l, seed, "w"));
        let mut r = rng::stream(seed, "coefficients");
        let (alpha, beta) = (cnormal(&mut r), cnormal(&mut r));
        let mix = CMatrix::from_fn(m, l, |i, j| alpha * u[(i, j)] + beta * w[(i, j)]);
        let lhs = rnn.scan_parallel(&mix).unwrap().states;
        let (xu, xw) = (rnn.scan_parallel(&u).unwrap().states, rnn.scan_parallel(&w).unwrap().states);
        let rhs = CMatrix::from_fn(n, l, |i, j| alpha * xu[(i, j)] + beta * xw[(i, j)]);
        prop_assert!(channel_rel(&rhs, &lhs) <= 1e-12);
    }

    #[test]
    fn impulse_decays_by_powers(n in 1usize..16, l in 1usize..300, r_min in 0.0f64..1.0, seed in any::<u64>()) {
        let rnn = model(n, 1, r_min, seed);
        let u1 = Complex64::new(0.7, -0.2);
        let u = CMatrix::from_fn(1, l, |_, j| if j == 0 { u1 } else { Complex64::new(0.0, 0.0) });
        for x in [rnn.scan_sequential(&u).unwrap().states, rnn.scan_parallel(&u).unwrap().states] {
            for i in 0..n {
                let b = rnn.b()[(i, 0)] * u1;
                for k in 0..l {
                    let want = rnn.lambda()[i].powu(k as u32) * b;
                    prop_assert!((x[(i, k)] - want).norm() <= 1e-12 * b.norm().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn init_is_reproducible(n in 1usize..64, seed in any::<u64>(), lo in 0.0f64..0.9) {
        let kinds = [
            EigenInitKind::Ring { r_min: lo, r_max: 1.0, density: RingDensity::Area },
            EigenInitKind::Ring { r_min: lo, r_max: 1.0, density: RingDensity::Radius },
            EigenInitKind::RealUniform { lo, hi: 0.95 },
            EigenInitKind::RootsOfUnity,
        ];
        for kind in kinds {
            let spec = EigenInit { kind, n };
            let a = init_eigenvalues(&spec, &mut rng::stream(seed, "eig")).unwrap();
            let b = init_eigenvalues(&spec, &mut rng::stream(seed, "eig")).unwrap();
            prop_assert_eq!(a.len(), n);
            let bits = |v: &[Complex64]| v.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a), bits(&b));
        }
    }
}

#[test]
fn large_scan_equivalence() {
    let rnn = model(256, 1, 0.0, 3);
    let u = inputs(1, 4096, 3, "u");
    let seq = rnn.scan_sequential(&u).unwrap().states;
    let par = rnn.scan_parallel(&u).unwrap().states;
    assert!(channel_rel(&seq, &par) <= 1e-12);
}
