use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::adam::{apply_adam, AdamHyper, AdamState};
use super::forward::{backward, forward, mse, predict};
use super::{Gradients, ModelConfig, Seq2SeqModel};
use crate::datagen::TrajectoryDataset;
use crate::error::{Error, Result};
use crate::rng;

/// Learning-rate schedule over epochs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LrSchedule {
    #[default]
    Constant,
    /// Cosine decay from the base rate to `floor · base` at the last epoch.
    Cosine { floor: f64 },
}

impl LrSchedule {
    pub fn factor(&self, epoch: usize, epochs: usize) -> f64 {
        match *self {
            LrSchedule::Constant => 1.0,
            LrSchedule::Cosine { floor } => {
                let t = if epochs > 1 { epoch as f64 / (epochs - 1) as f64 } else { 0.0 };
                floor + (1.0 - floor) * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub hyper: AdamHyper,
    pub schedule: LrSchedule,
    /// Each seed trains a fresh model; the one with the lowest test loss is kept.
    pub seeds: Vec<u64>,
}

impl TrainConfig {
    pub fn new(epochs: usize, batch_size: usize, lr: f64, seeds: Vec<u64>) -> Self {
        Self {
            epochs,
            batch_size,
            hyper: AdamHyper::with_lr(lr),
            schedule: LrSchedule::Constant,
            seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    /// Mean minibatch loss per completed epoch.
    pub train_loss: Vec<f64>,
    pub test_loss: Option<f64>,
    /// Reason the run diverged, if it did.
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub runs: Vec<SeedRun>,
    /// Index into `runs` of the best successful seed.
    pub best: Option<usize>,
    pub best_model: Option<Seq2SeqModel>,
}

impl TrainOutcome {
    pub fn best_run(&self) -> Option<&SeedRun> {
        self.best.map(|i| &self.runs[i])
    }
}

/// Mean per-sample MSE of `model` on `data`.
pub fn evaluate(model: &Seq2SeqModel, data: &TrajectoryDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::domain("cannot evaluate on an empty dataset"));
    }
    let losses: Vec<f64> = data
        .inputs
        .par_iter()
        .zip(&data.targets)
        .map(|(v, y)| mse(&predict(model, v)?, y))
        .collect::<Result<_>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

fn batch_gradient(model: &Seq2SeqModel, data: &TrajectoryDataset, idx: &[usize]) -> Result<(f64, Gradients)> {
    let per_sample: Vec<(f64, Gradients)> = idx
        .par_iter()
        .map(|&i| {
            let (_, cache) = forward(model, &data.inputs[i])?;
            backward(model, Some(&cache), &data.targets[i])
        })
        .collect::<Result<_>>()?;
    // Summed in batch order so results do not depend on thread scheduling.
    let mut total = model.zero_gradients();
    let mut loss = 0.0;
    for (l, g) in &per_sample {
        loss += l;
        total.add_scaled(g, 1.0);
    }
    let n = idx.len() as f64;
    total.scale(1.0 / n);
    Ok((loss / n, total))
}

/// Minibatch Adam on `model` at a constant rate, shuffling with a stream derived
/// from `seed`. Returns the mean training loss of every epoch.
pub fn fit(model: &mut Seq2SeqModel, data: &TrajectoryDataset, epochs: usize, batch_size: usize, hyper: &AdamHyper, seed: u64) -> Result<Vec<f64>> {
    fit_scheduled(model, data, epochs, batch_size, hyper, LrSchedule::Constant, seed)
}

pub fn fit_scheduled(
    model: &mut Seq2SeqModel,
    data: &TrajectoryDataset,
    epochs: usize,
    batch_size: usize,
    hyper: &AdamHyper,
    schedule: LrSchedule,
    seed: u64,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::domain("cannot train on an empty dataset"));
    }
    if batch_size == 0 {
        return Err(Error::domain("batch size must be >= 1"));
    }
    let mut state = AdamState::new();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut curve = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        order.sort_unstable();
        order.shuffle(&mut rng::indexed_stream(seed, "shuffle", epoch as u64));
        let hyper = AdamHyper {
            lr: hyper.lr * schedule.factor(epoch, epochs),
            ..*hyper
        };
        let mut sum = 0.0;
        let mut batches = 0;
        for idx in order.chunks(batch_size) {
            let (loss, grads) = batch_gradient(model, data, idx)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!("training loss at epoch {epoch}")));
            }
            apply_adam(model, &grads, &mut state, &hyper)?;
            sum += loss;
            batches += 1;
        }
        curve.push(sum / batches as f64);
        log::debug!("seed {seed} epoch {epoch}: train loss {:.6e}", sum / batches as f64);
    }
    Ok(curve)
}

/// Trains one fresh model per seed and keeps the one with the lowest test loss.
/// Seeds whose loss or gradients become non-finite are recorded as failed and
/// excluded from the selection.
pub fn train(cfg: &ModelConfig, train_set: &TrajectoryDataset, test_set: &TrajectoryDataset, tc: &TrainConfig) -> Result<TrainOutcome> {
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::domain("training needs non-empty train and test sets"));
    }
    if tc.seeds.is_empty() {
        return Err(Error::domain("training needs at least one seed"));
    }
    let mut runs = Vec::with_capacity(tc.seeds.len());
    let mut best: Option<(usize, f64, Seq2SeqModel)> = None;
    for &seed in &tc.seeds {
        let mut model = Seq2SeqModel::init(cfg, &mut rng::stream(seed, "model-init"))?;
        let result = fit_scheduled(&mut model, train_set, tc.epochs, tc.batch_size, &tc.hyper, tc.schedule, seed)
            .and_then(|curve| Ok((curve, evaluate(&model, test_set)?)));
        let run = match result {
            Ok((curve, test)) if test.is_finite() => {
                if best.as_ref().is_none_or(|b| test < b.1) {
                    best = Some((runs.len(), test, model));
                }
                SeedRun { seed, train_loss: curve, test_loss: Some(test), failure: None }
            }
            Ok((curve, test)) => SeedRun {
                seed,
                train_loss: curve,
                test_loss: None,
                failure: Some(format!("non-finite test loss {test}")),
            },
            Err(e @ (Error::NonFinite(_) | Error::NonFiniteGradient(_))) => {
                log::warn!("seed {seed} diverged: {e}");
                SeedRun { seed, train_loss: Vec::new(), test_loss: None, failure: Some(e.to_string()) }
            }
            Err(e) => return Err(e),
        };
        runs.push(run);
    }
    let (best, best_model) = match best {
        Some((i, _, m)) => (Some(i), Some(m)),
        None => (None, None),
    };
    Ok(TrainOutcome { runs, best, best_model })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::DatasetMeta;
    use crate::network::{HeadKind, Readout};
    use crate::numerics::{lstsq, CMatrix, RMatrix};
    use rand::Rng;

    fn meta() -> DatasetMeta {
        DatasetMeta {
            generator: "test".into(),
            seed: 0,
            params: vec![],
            rejected: 0,
        }
    }

    fn random_inputs(n: usize, l: usize, seed: u64) -> Vec<RMatrix> {
        let mut r = rng::stream(seed, "train-test");
        (0..n).map(|_| RMatrix::from_fn(1, l, |_, _| r.random_range(-1.0..1.0))).collect()
    }

    #[test]
    fn learns_current_token_copy() {
        // y_k = v_k per step; exactly representable by a linear head once N ≥ L.
        let l = 6;
        let make = |seed| {
            let v = random_inputs(64, l, seed);
            TrajectoryDataset::new(v.clone(), v, meta()).unwrap()
        };
        let (tr, te) = (make(1), make(2));
        let mut cfg = ModelConfig::new(1, 1, 8, 1, HeadKind::Linear);
        cfg.r_min = 0.0;
        cfg.r_max = 0.5;
        let out = train(&cfg, &tr, &te, &TrainConfig::new(300, 16, 1e-2, vec![1])).unwrap();
        let best = out.best_run().unwrap();
        assert!(best.test_loss.unwrap() < 1e-3, "{best:?}");
    }

    #[test]
    fn frozen_recurrence_matches_lstsq() {
        // Decode the Haar coefficients of sparse signals from x_L with a trained linear head.
        let (l, p) = (16, 4);
        let basis = crate::reconstruction::haar_basis(l, p).unwrap();
        let mut r = rng::stream(3, "sparse");
        let (mut v, mut y) = (Vec::new(), Vec::new());
        for _ in 0..64 {
            let alpha: Vec<f64> = (0..p).map(|_| r.random_range(-1.0..1.0)).collect();
            v.push(RMatrix::row_vector(basis.synthesize(&alpha).unwrap()));
            y.push(RMatrix::new(p, 1, alpha).unwrap());
        }
        let data = TrajectoryDataset::new(v, y, meta()).unwrap();
        let mut cfg = ModelConfig::new(1, 1, 4, p, HeadKind::Linear);
        cfg.readout = Readout::LastState;
        cfg.train_encoder = false;
        cfg.train_recurrence = false;
        let mut model = Seq2SeqModel::init(&cfg, &mut rng::stream(4, "m")).unwrap();
        let before = model.recurrence.clone();
        fit(&mut model, &data, 3000, 64, &AdamHyper::with_lr(1e-2), 4).unwrap();
        assert_eq!(model.recurrence, before);
        let trained = evaluate(&model, &data).unwrap();

        // Closed form: least squares on features [Re x_L, Im x_L, 1].
        let rows: Vec<Vec<f64>> = data.inputs.iter().map(|s| features_of(&model, s).into_iter().chain([1.0]).collect()).collect();
        let a = CMatrix::from_fn(rows.len(), 9, |i, j| rows[i][j].into());
        let b = CMatrix::from_fn(rows.len(), p, |i, j| data.targets[i][(j, 0)].into());
        let coef = lstsq(&a, &b, None).unwrap();
        let resid = a.matmul(&coef).unwrap().sub(&b).unwrap();
        let best = resid.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / (rows.len() * p) as f64;
        assert!(trained - best < 1e-3, "trained {trained} vs lstsq {best}");
        assert!(trained >= best - 1e-12);
    }

    fn features_of(model: &Seq2SeqModel, v: &RMatrix) -> Vec<f64> {
        let lam = model.recurrence.eigenvalues();
        let n = lam.len();
        let mut x = vec![num_complex::Complex64::new(0.0, 0.0); n];
        for k in 0..v.cols() {
            let u: Vec<f64> = (0..model.embed_dim())
                .map(|h| model.encoder.bias[h] + model.encoder.w[(h, 0)] * v[(0, k)])
                .collect();
            for c in 0..n {
                let bu = (0..u.len())
                    .map(|h| num_complex::Complex64::new(model.recurrence.b_real[(c, h)], model.recurrence.b_imag[(c, h)]) * u[h])
                    .sum::<num_complex::Complex64>();
                x[c] = lam[c] * x[c] + bu * model.recurrence.gamma[c];
            }
        }
        x.iter().map(|z| z.re).chain(x.iter().map(|z| z.im)).collect()
    }

    #[test]
    fn deterministic_curves_and_failure_handling() {
        let v = random_inputs(12, 5, 5);
        let data = TrajectoryDataset::new(v.clone(), v, meta()).unwrap();
        let cfg = ModelConfig::new(1, 2, 3, 1, HeadKind::Mlp { width: 4, activation: Default::default() });
        let tc = TrainConfig::new(3, 4, 1e-2, vec![1, 2]);
        let a = train(&cfg, &data, &data, &tc).unwrap();
        let b = train(&cfg, &data, &data, &tc).unwrap();
        assert_eq!(a.runs, b.runs);
        assert_eq!(a.runs.len(), 2);

        // An absurd learning rate drives the loss to overflow; the seed is reported as failed.
        let wild = TrainConfig::new(20, 4, 1e200, vec![3]);
        let out = train(&cfg, &data, &data, &wild).unwrap();
        assert!(out.best.is_none());
        assert!(out.runs[0].failure.is_some());
    }

    #[test]
    fn cosine_schedule_endpoints() {
        let s = LrSchedule::Cosine { floor: 0.1 };
        assert!((s.factor(0, 11) - 1.0).abs() < 1e-15);
        assert!((s.factor(10, 11) - 0.1).abs() < 1e-15);
        assert!((s.factor(5, 11) - 0.55).abs() < 1e-15);
        assert_eq!(LrSchedule::Constant.factor(3, 4), 1.0);
    }

    #[test]
    fn empty_dataset_rejected() {
        let empty = TrajectoryDataset::new(vec![], vec![], meta()).unwrap();
        let cfg = ModelConfig::new(1, 1, 1, 1, HeadKind::Linear);
        assert!(train(&cfg, &empty, &empty, &TrainConfig::new(1, 1, 1e-3, vec![1])).is_err());
    }
}
