use lrnn_memory::datagen::{generate_trajectories, lv_system, OdeSystem, TrajectoryConfig, BLOWUP_LIMIT};
use lrnn_memory::network::{
    avoid_relu_kinks, fit, grad_check, Activation, AdamHyper, HeadKind, ModelConfig, Readout, Seq2SeqModel, StateView,
};
use lrnn_memory::{rng, RMatrix};
use proptest::prelude::*;
use rand::Rng;

fn model(seed: u64, n: usize, d: usize, mlp: bool) -> Seq2SeqModel {
    let head = if mlp {
        HeadKind::Mlp {
            width: d,
            activation: Activation::Relu,
        }
    } else {
        HeadKind::Linear
    };
    Seq2SeqModel::init(&ModelConfig::new(1, 3, n, 1, head), &mut rng::stream(seed, "model")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_eigenvalues_stay_in_open_disk(nu in prop::collection::vec(-80.0f64..8.0, 1..16), theta in -10.0f64..10.0) {
        let mut m = model(1, nu.len(), 4, false);
        m.recurrence.log_log_magnitude = nu.clone();
        m.recurrence.phase = vec![theta; nu.len()];
        prop_assert!(m.recurrence.eigenvalues().iter().all(|l| l.norm() < 1.0));
        prop_assert!(m.max_eigen_magnitude() < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gradients_match_finite_differences(
        seed in any::<u64>(),
        n in 1usize..=8,
        l in 1usize..=8,
        d in 1usize..=16,
        mlp in any::<bool>(),
        time_channel in any::<bool>(),
        last in any::<bool>(),
    ) {
        let mut cfg = ModelConfig::new(2, 3, n, 2, if mlp { HeadKind::Mlp { width: d, activation: Activation::Sigmoid } } else { HeadKind::Linear });
        cfg.view = StateView { time_channel, drop_imaginary: false };
        cfg.readout = if last { Readout::LastState } else { Readout::PerStep };
        cfg.r_min = 0.5;
        cfg.r_max = 0.99;
        let mut m = Seq2SeqModel::init(&cfg, &mut rng::stream(seed, "model")).unwrap();
        let mut r = rng::stream(seed, "data");
        let v = RMatrix::from_fn(2, l, |_, _| r.random_range(-1.0..1.0));
        let y = RMatrix::from_fn(2, if last { 1 } else { l }, |_, _| r.random_range(-1.0..1.0));
        avoid_relu_kinks(&mut m, &v, 1e-3).unwrap();
        prop_assert!(grad_check(&m, &v, &y, 1e-5).unwrap() <= 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generators_and_training_are_pure(seed in any::<u64>()) {
        let mut sys = lv_system();
        sys.horizon = 32;
        let a = generate_trajectories(&sys, &TrajectoryConfig::new(6, seed)).unwrap();
        let b = generate_trajectories(&sys, &TrajectoryConfig::new(6, seed)).unwrap();
        prop_assert_eq!(a.to_container().to_bytes(), b.to_container().to_bytes());

        let hyper = AdamHyper::with_lr(1e-2);
        let mut m1 = model(seed, 4, 8, true);
        let mut m2 = m1.clone();
        let c1 = fit(&mut m1, &a, 2, 3, &hyper, seed).unwrap();
        let c2 = fit(&mut m2, &b, 2, 3, &hyper, seed).unwrap();
        prop_assert_eq!(
            c1.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            c2.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        prop_assert_eq!(m1.to_container().to_bytes(), m2.to_container().to_bytes());
    }
}

fn riccati(z: &[f64], v: f64, _: &[f64], out: &mut [f64]) {
    out[0] = v * z[0] * z[0];
}

#[test]
fn rejected_trajectories_are_counted_not_dropped() {
    // z' = v z² from z = 1 escapes once the integrated input reaches 1, which
    // happens for some random inputs and not others.
    let sys = OdeSystem {
        name: "riccati",
        state_dim: 1,
        params: Vec::new(),
        rhs: riccati,
        readout: 0,
        z0: vec![1.0],
        delta: 0.1,
        horizon: 64,
    };
    let ds = generate_trajectories(&sys, &TrajectoryConfig::new(20, 9)).unwrap();
    assert_eq!(ds.len(), 20);
    assert!(ds.meta.rejected > 0);
    assert!(ds.targets.iter().all(|t| t.as_slice().iter().all(|y| y.is_finite() && y.abs() <= BLOWUP_LIMIT)));
}
