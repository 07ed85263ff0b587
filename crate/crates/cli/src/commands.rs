//! The experiment subcommands. Each one reads an [`ExperimentConfig`], writes its
//! outputs through a [`RunWriter`] and returns the numbers it wrote.

use lrnn_memory::datagen::{
    generate_trajectories, load_idx_images, lorenz_system, lv_system, pt_system, smooth_input_sampler, sparse_signal_sampler,
    synthetic_images, DatasetMeta, LowFrequencyFamily, OdeSystem, TrajectoryConfig, TrajectoryDataset,
};
use lrnn_memory::network::{
    predict, train, Activation, HeadKind, LrSchedule, ModelConfig, Readout, SeedRun, Seq2SeqModel, TrainConfig,
};
use lrnn_memory::reconstruction::{
    conditioning_sweep, haar_basis, reconstruction_error_profile, CondRow, ProfileMode, SweepInit, SweepMode, SweepSpec,
};
use lrnn_memory::recurrence::{EigenInit, EigenInitKind};
use lrnn_memory::rng;
use lrnn_memory::stats::median;
use lrnn_memory::RMatrix;

use crate::config::{DataSource, ExperimentConfig, InitKind};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, Csv, RunWriter};
use crate::svg::LinePlot;

/// Cosine schedules decay to this fraction of the base learning rate.
pub const COSINE_FLOOR: f64 = 0.01;
const SMOOTH_BASIS: usize = 16;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn eigen_init(cfg: &ExperimentConfig, n: usize, r_min: f64) -> EigenInit {
    let r_max = cfg.init.r_max;
    let kind = match cfg.init.kind {
        InitKind::Ring => EigenInitKind::Ring {
            r_min,
            r_max,
            density: cfg.init.density,
        },
        InitKind::Roots => EigenInitKind::RootsOfUnity,
        InitKind::Real => EigenInitKind::RealUniform { lo: r_min, hi: r_max },
    };
    EigenInit { kind, n }
}

/// `n` input sequences of length `dims.L`, starting at `offset` for file-backed sources.
pub fn sequence_inputs(cfg: &ExperimentConfig, label: &str, offset: usize, n: usize) -> CliResult<Vec<Vec<f64>>> {
    let l = cfg.dims.l;
    let mut r = rng::stream(cfg.seed, label);
    let inputs = match &cfg.data.source {
        DataSource::Synthetic => {
            let side = l.isqrt();
            if side * side != l {
                return Err(usage(format!("synthetic images need dims.L to be a perfect square, got {l}")));
            }
            synthetic_images(n, side, &mut r)
        }
        DataSource::Idx(path) => {
            let images = load_idx_images(path)?;
            if images.len() < offset + n {
                return Err(usage(format!("{} holds {} images, need {}", path.display(), images.len(), offset + n)));
            }
            let images = images[offset..offset + n].to_vec();
            if images.first().is_some_and(|im| im.len() != l) {
                return Err(usage(format!("images have {} pixels but dims.L = {l}", images[0].len())));
            }
            images
        }
        DataSource::Sparse => {
            let basis = haar_basis(l, single_p(cfg)?)?;
            sparse_signal_sampler(&basis, &mut r, n)?
        }
        DataSource::Smooth => (0..n)
            .map(|_| smooth_input_sampler(l, SMOOTH_BASIS.min(l), LowFrequencyFamily::Haar, &mut r))
            .collect::<Result<_, _>>()?,
        other => return Err(usage(format!("data.source {other:?} does not provide input sequences"))),
    };
    if inputs.is_empty() {
        return Err(usage("no input sequences requested"));
    }
    Ok(inputs)
}

fn single_p(cfg: &ExperimentConfig) -> CliResult<usize> {
    match cfg.dims.p.as_slice() {
        [p] => Ok(*p),
        ps => Err(usage(format!("this command takes one basis size, got dims.P = {ps:?}"))),
    }
}

fn single_n(cfg: &ExperimentConfig) -> CliResult<usize> {
    match cfg.dims.n.as_slice() {
        [n] => Ok(*n),
        ns => Err(usage(format!("this command takes one state size, got dims.N = {ns:?}"))),
    }
}

fn schedule(cfg: &ExperimentConfig) -> LrSchedule {
    if cfg.train.cosine {
        LrSchedule::Cosine { floor: COSINE_FLOOR }
    } else {
        LrSchedule::Constant
    }
}

fn head_kind(cfg: &ExperimentConfig, name: &str) -> HeadKind {
    match name {
        "linear" => HeadKind::Linear,
        _ => HeadKind::Mlp {
            width: cfg.dims.d,
            activation: if cfg.train.sigmoid { Activation::Sigmoid } else { Activation::Relu },
        },
    }
}

#[derive(Debug, Clone)]
pub struct CondSweepReport {
    pub rows: Vec<CondRow>,
    /// `(r_min, P, median log₁₀ cond)` in grid order.
    pub medians: Vec<(f64, Option<usize>, f64)>,
}

pub fn cond_sweep(cfg: &ExperimentConfig, w: &mut RunWriter) -> CliResult<CondSweepReport> {
    let mode = match cfg.sweep.mode.as_str() {
        "vandermonde" => SweepMode::Vandermonde,
        "omega" => SweepMode::Omega,
        m => return Err(usage(format!("sweep.mode for cond-sweep is vandermonde or omega, got `{m}`"))),
    };
    let init = match cfg.init.kind {
        InitKind::Ring => SweepInit::Ring {
            r_max: cfg.init.r_max,
            density: cfg.init.density,
        },
        InitKind::Roots => SweepInit::RootsOfUnity,
        InitKind::Real => return Err(usage("cond-sweep supports init.kind ring or roots")),
    };
    let spec = SweepSpec {
        mode,
        seq_len: cfg.dims.l,
        state_dim: single_n(cfg)?,
        r_grid: cfg.init.r_min.clone(),
        basis_sizes: cfg.dims.p.clone(),
        seeds: cfg.sweep_seeds(),
        init,
    };
    let rows = conditioning_sweep(&spec)?;

    let mut csv = Csv::new(&cfg.experiment, &["mode", "r_min", "P", "seed", "log10_cond"]);
    for r in &rows {
        csv.row(&[
            r.mode.name().to_string(),
            fmt_f64(r.r_min),
            r.p.map_or(String::new(), |p| p.to_string()),
            r.seed.to_string(),
            fmt_f64(r.log10_cond),
        ]);
    }
    w.write_csv("cond_sweep.csv", &csv)?;

    let mut medians = Vec::new();
    let mut cells: Vec<(f64, Option<usize>)> = rows.iter().map(|r| (r.r_min, r.p)).collect();
    cells.dedup();
    for (r_min, p) in cells {
        let v: Vec<f64> = rows.iter().filter(|r| r.r_min == r_min && r.p == p).map(|r| r.log10_cond).collect();
        medians.push((r_min, p, median(&v)));
    }
    if cfg.plot {
        let mut plot = LinePlot::new(&format!("{} conditioning", mode.name()), "r_min", "median log10 cond", false);
        let mut ps: Vec<Option<usize>> = medians.iter().map(|m| m.1).collect();
        ps.sort();
        ps.dedup();
        for p in ps {
            let label = p.map_or(format!("N={}", spec.state_dim), |p| format!("P={p}"));
            plot.push(label, medians.iter().filter(|m| m.1 == p).map(|m| (m.0, m.2)).collect());
        }
        w.write("cond_sweep.svg", plot.render().as_bytes())?;
    }
    Ok(CondSweepReport { rows, medians })
}

#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub n: usize,
    pub r_min: f64,
    /// Median over seeds of the per-timestep MSE, oldest timestep first.
    pub mse: Vec<f64>,
}

pub fn reconstruct(cfg: &ExperimentConfig, w: &mut RunWriter) -> CliResult<Vec<ProfileCurve>> {
    let mode = match cfg.sweep.mode.as_str() {
        "full" => ProfileMode::Full,
        "sparse" => ProfileMode::Sparse(haar_basis(cfg.dims.l, single_p(cfg)?)?),
        m => return Err(usage(format!("sweep.mode for reconstruct is full or sparse, got `{m}`"))),
    };
    let inputs = sequence_inputs(cfg, "inputs", 0, cfg.data.n_test)?;
    let seeds = cfg.sweep_seeds();
    let mut curves = Vec::new();
    for &n in &cfg.dims.n {
        for &r_min in &cfg.init.r_min {
            let init = eigen_init(cfg, n, r_min);
            let profile = reconstruction_error_profile(&init, &seeds, &inputs, &mode, cfg.sweep.rcond)?;
            curves.push(ProfileCurve {
                n,
                r_min,
                mse: profile.median_over_seeds(),
            });
        }
    }

    let mut csv = Csv::new(&cfg.experiment, &["N", "r_min", "timestep", "mse"]);
    for c in &curves {
        for (t, &m) in c.mse.iter().enumerate() {
            csv.row(&[c.n.to_string(), fmt_f64(c.r_min), (t + 1).to_string(), fmt_f64(m)]);
        }
    }
    w.write_csv("reconstruct.csv", &csv)?;
    if cfg.plot {
        let mut plot = LinePlot::new("reconstruction from the last state", "timestep", "median MSE", true);
        for c in &curves {
            let pts = c.mse.iter().enumerate().map(|(t, &m)| ((t + 1) as f64, m)).collect();
            plot.push(format!("N={} r_min={}", c.n, c.r_min), pts);
        }
        w.write("reconstruct.svg", plot.render().as_bytes())?;
    }
    Ok(curves)
}

#[derive(Debug, Clone)]
pub struct HeadResult {
    pub head: &'static str,
    pub n: usize,
    pub runs: Vec<SeedRun>,
    pub best_test: Option<f64>,
    pub best_model: Option<Seq2SeqModel>,
}

fn run_training(
    cfg: &ExperimentConfig,
    head: &'static str,
    n: usize,
    model_cfg: ModelConfig,
    train_set: &TrajectoryDataset,
    test_set: &TrajectoryDataset,
) -> CliResult<HeadResult> {
    let mut tc = TrainConfig::new(
        cfg.train.epochs,
        cfg.train.batch,
        cfg.train.lr,
        cfg.train.seeds_protocol.seeds(cfg.seed),
    );
    tc.schedule = schedule(cfg);
    log::info!("training {head} head, N={n}, seeds {:?}", tc.seeds);
    let outcome = train(&model_cfg, train_set, test_set, &tc)?;
    let best_test = outcome.best_run().and_then(|r| r.test_loss);
    Ok(HeadResult {
        head,
        n,
        runs: outcome.runs,
        best_test,
        best_model: outcome.best_model,
    })
}

fn training_csv(cfg: &ExperimentConfig, results: &[HeadResult]) -> Csv {
    let mut csv = Csv::new(
        &cfg.experiment,
        &["head", "N", "seed", "status", "train_mse", "test_mse", "best_test_mse"],
    );
    for r in results {
        for run in &r.runs {
            csv.row(&[
                r.head.to_string(),
                r.n.to_string(),
                run.seed.to_string(),
                if run.failure.is_some() { "failed" } else { "ok" }.to_string(),
                fmt_f64(run.train_loss.last().copied().unwrap_or(f64::NAN)),
                fmt_f64(run.test_loss.unwrap_or(f64::NAN)),
                fmt_f64(r.best_test.unwrap_or(f64::NAN)),
            ]);
        }
    }
    csv
}

fn reconstruction_dataset(cfg: &ExperimentConfig, label: &str, offset: usize, n: usize) -> CliResult<TrajectoryDataset> {
    let seqs = sequence_inputs(cfg, label, offset, n)?;
    let l = cfg.dims.l;
    let inputs = seqs.iter().map(|v| RMatrix::row_vector(v.clone())).collect();
    let targets = seqs.into_iter().map(|v| RMatrix::new(l, 1, v)).collect::<Result<_, _>>()?;
    let meta = DatasetMeta {
        generator: format!("{:?}", cfg.data.source),
        seed: cfg.seed,
        params: Vec::new(),
        rejected: 0,
    };
    Ok(TrajectoryDataset::new(inputs, targets, meta)?)
}

/// Trains encoder, recurrence and decoder to output the whole input from `x_L`.
pub fn train_reconstruct(cfg: &ExperimentConfig, w: &mut RunWriter) -> CliResult<Vec<HeadResult>> {
    if cfg.dims.m != 1 || cfg.dims.s != cfg.dims.l {
        return Err(usage("train-reconstruct needs dims.M = 1 and dims.S = dims.L"));
    }
    let train_set = reconstruction_dataset(cfg, "train-inputs", 0, cfg.data.n_train)?;
    let test_set = reconstruction_dataset(cfg, "test-inputs", cfg.data.n_train, cfg.data.n_test)?;
    let mut results = Vec::new();
    for &n in &cfg.dims.n {
        for &head in cfg.train.head.names() {
            let mut mc = ModelConfig::new(1, cfg.dims.h, n, cfg.dims.l, head_kind(cfg, head));
            mc.readout = Readout::LastState;
            mc.r_min = cfg.init.r_min[0];
            mc.r_max = cfg.init.r_max;
            results.push(run_training(cfg, head, n, mc, &train_set, &test_set)?);
        }
    }
    w.write_csv("train_reconstruct.csv", &training_csv(cfg, &results))?;
    for r in &results {
        if let Some(m) = &r.best_model {
            w.write(&format!("model_{}_N{}.lrnn", r.head, r.n), &m.to_container().to_bytes())?;
        }
    }
    if cfg.plot {
        let mut plot = LinePlot::new("learned reconstruction", "N", "best test MSE", true);
        for &head in cfg.train.head.names() {
            let pts = results
                .iter()
                .filter(|r| r.head == head)
                .filter_map(|r| r.best_test.map(|t| (r.n as f64, t)))
                .collect();
            plot.push(head, pts);
        }
        w.write("train_reconstruct.svg", plot.render().as_bytes())?;
    }
    Ok(results)
}

pub fn ode_system(cfg: &ExperimentConfig) -> CliResult<OdeSystem> {
    let mut sys = match cfg.data.source {
        DataSource::Pt => pt_system(),
        DataSource::Lv => lv_system(),
        DataSource::Lorenz => lorenz_system(),
        ref other => return Err(usage(format!("ode needs data.source pt, lv or lorenz, got {other:?}"))),
    };
    sys.horizon = cfg.dims.l;
    Ok(sys)
}

#[derive(Debug, Clone)]
pub struct OdeReport {
    pub heads: Vec<HeadResult>,
    pub train_rejected: usize,
    pub test_rejected: usize,
}

impl OdeReport {
    pub fn best_test(&self, head: &str) -> Option<f64> {
        self.heads.iter().find(|h| h.head == head).and_then(|h| h.best_test)
    }
}

/// Learns the input-to-output map of a controlled ODE with per-step readout.
pub fn ode(cfg: &ExperimentConfig, w: &mut RunWriter) -> CliResult<OdeReport> {
    if cfg.dims.m != 1 || cfg.dims.s != 1 {
        return Err(usage("ode needs dims.M = 1 and dims.S = 1"));
    }
    let n = single_n(cfg)?;
    let sys = ode_system(cfg)?;
    let train_set = generate_trajectories(&sys, &TrajectoryConfig::new(cfg.data.n_train, cfg.seed.wrapping_add(1)))?;
    let test_set = generate_trajectories(&sys, &TrajectoryConfig::new(cfg.data.n_test, cfg.seed.wrapping_add(2)))?;
    w.record_rejected("train", train_set.meta.rejected);
    w.record_rejected("test", test_set.meta.rejected);
    if cfg.data.cache {
        w.write("train.data", &train_set.to_container().to_bytes())?;
        w.write("test.data", &test_set.to_container().to_bytes())?;
    }

    let mut heads = Vec::new();
    for &head in cfg.train.head.names() {
        let mut mc = ModelConfig::new(1, cfg.dims.h, n, 1, head_kind(cfg, head));
        mc.r_min = cfg.init.r_min[0];
        mc.r_max = cfg.init.r_max;
        heads.push(run_training(cfg, head, n, mc, &train_set, &test_set)?);
    }
    w.write_csv("ode_results.csv", &training_csv(cfg, &heads))?;

    let shown = test_set.len().min(2);
    let mut traj = Csv::new(&cfg.experiment, &["head", "sample", "timestep", "input", "true", "predicted"]);
    let mut eig = Csv::new(&cfg.experiment, &["head", "index", "abs", "theta"]);
    let mut plot = LinePlot::new(&format!("{} test trajectory", sys.name), "timestep", "output", false);
    if shown > 0 {
        plot.push("true", test_set.targets[0].row(0).iter().enumerate().map(|(t, &y)| (t as f64, y)).collect());
    }
    for h in &heads {
        let Some(model) = &h.best_model else { continue };
        for s in 0..shown {
            let pred = predict(model, &test_set.inputs[s])?;
            let (v, y, p) = (test_set.inputs[s].row(0), test_set.targets[s].row(0), pred.row(0));
            for t in 0..v.len() {
                traj.row(&[
                    h.head.to_string(),
                    s.to_string(),
                    (t + 1).to_string(),
                    fmt_f64(v[t]),
                    fmt_f64(y[t]),
                    fmt_f64(p[t]),
                ]);
            }
            if s == 0 {
                plot.push(h.head, p.iter().enumerate().map(|(t, &y)| (t as f64, y)).collect());
            }
        }
        for (i, lam) in model.recurrence.eigenvalues().iter().enumerate() {
            eig.row(&[h.head.to_string(), i.to_string(), fmt_f64(lam.norm()), fmt_f64(lam.arg())]);
        }
        w.write(&format!("model_{}.lrnn", h.head), &model.to_container().to_bytes())?;
    }
    w.write_csv("ode_trajectories.csv", &traj)?;
    w.write_csv("ode_eigenvalues.csv", &eig)?;
    if cfg.plot {
        w.write("ode_trajectory.svg", plot.render().as_bytes())?;
    }
    Ok(OdeReport {
        heads,
        train_rejected: train_set.meta.rejected,
        test_rejected: test_set.meta.rejected,
    })
}
