//! Trainable sequence-to-sequence model: linear encoder, polar-parametrized diagonal
//! recurrence, real/imaginary state view and a position-wise head.
//!
//! Gradients are computed by hand (BPTT through the linear recurrence) and the model
//! is optimized with Adam.

mod adam;
mod bound;
mod forward;
mod gemm;
mod gradcheck;
mod train;

pub use adam::{adam_step, apply_adam, AdamHyper, AdamState, ParamSlot};
pub use bound::mlp_width_bound;
pub use forward::{backward, forward, mse, predict, ForwardCache};
pub use gradcheck::{avoid_relu_kinks, grad_check, GRAD_CHECK_FLOOR};
pub use train::{evaluate, fit, fit_scheduled, train, LrSchedule, SeedRun, TrainConfig, TrainOutcome};

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::container::Container;
use crate::error::{Error, Result};
use crate::numerics::RMatrix;
use crate::recurrence::{init_eigenvalues, EigenInit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative given the pre-activation `z` and the output `h = σ(z)`.
    #[inline]
    pub fn derivative(self, z: f64, h: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => h * (1.0 - h),
        }
    }
}

/// `u_k = W v_k + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    /// H × M.
    pub w: RMatrix,
    pub bias: Vec<f64>,
    pub trainable: bool,
}

/// Diagonal recurrence with `λ = exp(−exp(ν)) · e^{iθ}` and input `γ ⊙ (B u_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRecurrence {
    /// `ν`; `|λ| = exp(−exp(ν))` lies in (0, 1) for every finite `ν`.
    pub log_log_magnitude: Vec<f64>,
    pub phase: Vec<f64>,
    /// N × H.
    pub b_real: RMatrix,
    /// N × H.
    pub b_imag: RMatrix,
    pub gamma: Vec<f64>,
    pub trainable: bool,
}

impl PolarRecurrence {
    /// Polar form of `lambda` with `γ = sqrt(1 − |λ|²)`.
    pub fn from_eigenvalues(lambda: &[Complex64], b_real: RMatrix, b_imag: RMatrix) -> Result<Self> {
        let n = lambda.len();
        if b_real.rows() != n || b_imag.shape() != b_real.shape() {
            return Err(Error::Shape {
                op: "polar recurrence: B vs eigenvalues",
                left: b_real.shape(),
                right: (n, b_imag.cols()),
            });
        }
        let mut nu = Vec::with_capacity(n);
        let mut gamma = Vec::with_capacity(n);
        for z in lambda {
            let r = z.norm();
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::domain(format!("polar recurrence needs 0 < |λ| < 1, got {r}")));
            }
            nu.push((-r.ln()).ln());
            gamma.push((1.0 - r * r).sqrt());
        }
        Ok(Self {
            log_log_magnitude: nu,
            phase: lambda.iter().map(|z| z.arg()).collect(),
            b_real,
            b_imag,
            gamma,
            trainable: true,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.phase.len()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.log_log_magnitude
            .iter()
            .zip(&self.phase)
            .map(|(&nu, &th)| Complex64::from_polar(polar_magnitude(nu), th))
            .collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.log_log_magnitude.iter().map(|&nu| polar_magnitude(nu)).collect()
    }
}

/// Largest magnitude a polar eigenvalue can take. `exp(−exp(ν))` rounds to
/// exactly 1 once `ν < −37`; the cap keeps `|λ| < 1` after the polar-to-Cartesian
/// rounding too.
pub const MAX_MAGNITUDE: f64 = 1.0 - 1e-15;

fn polar_magnitude(nu: f64) -> f64 {
    (-nu.exp()).exp().min(MAX_MAGNITUDE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearHead {
    /// S × I.
    pub w: RMatrix,
    pub b: Vec<f64>,
    pub trainable: bool,
}

/// `y = W2 σ(W1 f + b1) + b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpHead {
    /// D × I.
    pub w1: RMatrix,
    pub b1: Vec<f64>,
    /// S × D.
    pub w2: RMatrix,
    pub b2: Vec<f64>,
    pub activation: Activation,
    pub trainable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Head {
    Linear(LinearHead),
    Mlp(MlpHead),
}

impl Head {
    pub fn output_dim(&self) -> usize {
        match self {
            Head::Linear(h) => h.w.rows(),
            Head::Mlp(h) => h.w2.rows(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Head::Linear(h) => h.w.cols(),
            Head::Mlp(h) => h.w1.cols(),
        }
    }

    pub fn trainable(&self) -> bool {
        match self {
            Head::Linear(h) => h.trainable,
            Head::Mlp(h) => h.trainable,
        }
    }

    pub fn set_trainable(&mut self, on: bool) {
        match self {
            Head::Linear(h) => h.trainable = on,
            Head::Mlp(h) => h.trainable = on,
        }
    }
}

/// How the complex state is presented to the head: `(Re x, Im x)` by default,
/// optionally without `Im x` and optionally followed by the step index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StateView {
    pub time_channel: bool,
    pub drop_imaginary: bool,
}

impl StateView {
    pub fn feature_dim(&self, n: usize) -> usize {
        n * if self.drop_imaginary { 1 } else { 2 } + usize::from(self.time_channel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    /// Head applied at every step; output S × L.
    #[default]
    PerStep,
    /// Head applied to `x_L` only; output S × 1.
    LastState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadKind {
    Linear,
    Mlp { width: usize, activation: Activation },
}

/// Dimensions and initialization of a fresh model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub embed_dim: usize,
    pub state_dim: usize,
    pub output_dim: usize,
    pub head: HeadKind,
    pub view: StateView,
    pub readout: Readout,
    /// Eigenvalue magnitudes are drawn area-uniformly from `[r_min, r_max]`.
    pub r_min: f64,
    pub r_max: f64,
    pub train_encoder: bool,
    pub train_recurrence: bool,
}

impl ModelConfig {
    pub fn new(input_dim: usize, embed_dim: usize, state_dim: usize, output_dim: usize, head: HeadKind) -> Self {
        Self {
            input_dim,
            embed_dim,
            state_dim,
            output_dim,
            head,
            view: StateView::default(),
            readout: Readout::default(),
            r_min: 0.9,
            r_max: 0.999,
            train_encoder: true,
            train_recurrence: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.embed_dim == 0 || self.state_dim == 0 || self.output_dim == 0 {
            return Err(Error::domain("model dimensions must all be >= 1"));
        }
        if let HeadKind::Mlp { width: 0, .. } = self.head {
            return Err(Error::domain("MLP width must be >= 1"));
        }
        if !(0.0 <= self.r_min && self.r_min <= self.r_max && self.r_max < 1.0) {
            return Err(Error::domain(format!(
                "trainable recurrence needs 0 <= r_min <= r_max < 1, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }
}

/// One named parameter block.
#[derive(Debug)]
pub struct ParamBlock<'a> {
    pub name: &'static str,
    pub values: &'a [f64],
    pub trainable: bool,
}

/// Gradients in the same block order as [`Seq2SeqModel::params`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub blocks: Vec<(&'static str, Vec<f64>)>,
}

impl Gradients {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.blocks.iter().find(|(n, _)| *n == name).map(|(_, g)| g.as_slice())
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().flat_map(|(_, g)| g.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `self += scale · other`, block by block.
    pub fn add_scaled(&mut self, other: &Gradients, scale: f64) {
        for ((_, a), (_, b)) in self.blocks.iter_mut().zip(&other.blocks) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for (_, g) in &mut self.blocks {
            g.iter_mut().for_each(|x| *x *= s);
        }
    }
}

/// Encoder → recurrence → state view → head.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqModel {
    pub encoder: Encoder,
    pub recurrence: PolarRecurrence,
    pub state_view: StateView,
    pub head: Head,
    pub readout: Readout,
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, std: f64, rng: &mut R) -> RMatrix {
    let normal = Normal::new(0.0, std).expect("finite std");
    RMatrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

impl Seq2SeqModel {
    /// Fresh model: Gaussian weights scaled by fan-in, zero biases, ring eigenvalues
    /// and `γ = sqrt(1 − |λ|²)`.
    pub fn init<R: Rng + ?Sized>(cfg: &ModelConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let (m, h, n, s) = (cfg.input_dim, cfg.embed_dim, cfg.state_dim, cfg.output_dim);
        let encoder = Encoder {
            w: gaussian_matrix(h, m, (1.0 / m as f64).sqrt(), rng),
            bias: vec![0.0; h],
            trainable: cfg.train_encoder,
        };
        let mut lambda = init_eigenvalues(&EigenInit::ring(n, cfg.r_min, cfg.r_max), rng)?;
        for z in &mut lambda {
            if z.norm() < f64::MIN_POSITIVE {
                *z = Complex64::new(f64::MIN_POSITIVE, 0.0);
            }
        }
        let b_std = (1.0 / (2.0 * h as f64)).sqrt();
        let b_real = gaussian_matrix(n, h, b_std, rng);
        let b_imag = gaussian_matrix(n, h, b_std, rng);
        let mut recurrence = PolarRecurrence::from_eigenvalues(&lambda, b_real, b_imag)?;
        recurrence.trainable = cfg.train_recurrence;
        let i = cfg.view.feature_dim(n);
        let head = match cfg.head {
            HeadKind::Linear => Head::Linear(LinearHead {
                w: gaussian_matrix(s, i, (1.0 / i as f64).sqrt(), rng),
                b: vec![0.0; s],
                trainable: true,
            }),
            HeadKind::Mlp { width, activation } => Head::Mlp(MlpHead {
                w1: gaussian_matrix(width, i, (2.0 / i as f64).sqrt(), rng),
                b1: vec![0.0; width],
                w2: gaussian_matrix(s, width, (1.0 / width as f64).sqrt(), rng),
                b2: vec![0.0; s],
                activation,
                trainable: true,
            }),
        };
        let model = Self {
            encoder,
            recurrence,
            state_view: cfg.view,
            head,
            readout: cfg.readout,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks that dimensions chain `M → H → N → I → S` and all entries are finite.
    pub fn validate(&self) -> Result<()> {
        let h = self.encoder.w.rows();
        let n = self.recurrence.state_dim();
        let r = &self.recurrence;
        let chain = [
            (self.encoder.bias.len(), h, "encoder bias"),
            (r.log_log_magnitude.len(), n, "log-log magnitudes"),
            (r.gamma.len(), n, "gamma"),
            (r.b_real.rows(), n, "B rows"),
            (r.b_imag.rows(), n, "B rows"),
            (r.b_real.cols(), h, "B cols"),
            (r.b_imag.cols(), h, "B cols"),
            (self.head.input_dim(), self.feature_dim(), "head input"),
        ];
        for (got, want, what) in chain {
            if got != want {
                return Err(Error::domain(format!("{what}: dimension {got}, expected {want}")));
            }
        }
        match &self.head {
            Head::Linear(l) if l.b.len() != l.w.rows() => return Err(Error::domain("linear head bias length")),
            Head::Mlp(p) if p.b1.len() != p.w1.rows() || p.w2.cols() != p.w1.rows() || p.b2.len() != p.w2.rows() => {
                return Err(Error::domain("MLP head dimensions do not chain"))
            }
            _ => {}
        }
        for b in self.params() {
            if b.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(b.name.to_string()));
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.w.cols()
    }

    pub fn embed_dim(&self) -> usize {
        self.encoder.w.rows()
    }

    pub fn state_dim(&self) -> usize {
        self.recurrence.state_dim()
    }

    pub fn feature_dim(&self) -> usize {
        self.state_view.feature_dim(self.state_dim())
    }

    pub fn output_dim(&self) -> usize {
        self.head.output_dim()
    }

    pub fn max_eigen_magnitude(&self) -> f64 {
        self.recurrence.magnitudes().into_iter().fold(0.0, f64::max)
    }

    /// Freezes or unfreezes the encoder.
    pub fn set_encoder_trainable(&mut self, on: bool) {
        self.encoder.trainable = on;
    }

    /// Parameter blocks in declaration order.
    pub fn params(&self) -> Vec<ParamBlock<'_>> {
        let e = self.encoder.trainable;
        let r = self.recurrence.trainable;
        let mut out = vec![
            ParamBlock { name: "encoder.w", values: self.encoder.w.as_slice(), trainable: e },
            ParamBlock { name: "encoder.bias", values: &self.encoder.bias, trainable: e },
            ParamBlock { name: "recurrence.log_log_magnitude", values: &self.recurrence.log_log_magnitude, trainable: r },
            ParamBlock { name: "recurrence.phase", values: &self.recurrence.phase, trainable: r },
            ParamBlock { name: "recurrence.b_real", values: self.recurrence.b_real.as_slice(), trainable: r },
            ParamBlock { name: "recurrence.b_imag", values: self.recurrence.b_imag.as_slice(), trainable: r },
            ParamBlock { name: "recurrence.gamma", values: &self.recurrence.gamma, trainable: r },
        ];
        match &self.head {
            Head::Linear(l) => {
                out.push(ParamBlock { name: "head.w", values: l.w.as_slice(), trainable: l.trainable });
                out.push(ParamBlock { name: "head.b", values: &l.b, trainable: l.trainable });
            }
            Head::Mlp(p) => {
                out.push(ParamBlock { name: "head.w1", values: p.w1.as_slice(), trainable: p.trainable });
                out.push(ParamBlock { name: "head.b1", values: &p.b1, trainable: p.trainable });
                out.push(ParamBlock { name: "head.w2", values: p.w2.as_slice(), trainable: p.trainable });
                out.push(ParamBlock { name: "head.b2", values: &p.b2, trainable: p.trainable });
            }
        }
        out
    }

    /// Mutable parameter blocks, same order as [`Self::params`]; the flag is trainability.
    pub fn params_mut(&mut self) -> Vec<(&'static str, &mut [f64], bool)> {
        let e = self.encoder.trainable;
        let PolarRecurrence {
            log_log_magnitude,
            phase,
            b_real,
            b_imag,
            gamma,
            trainable: r,
        } = &mut self.recurrence;
        let r = *r;
        let mut out: Vec<(&'static str, &mut [f64], bool)> = vec![
            ("encoder.w", self.encoder.w.as_mut_slice(), e),
            ("encoder.bias", &mut self.encoder.bias, e),
            ("recurrence.log_log_magnitude", log_log_magnitude, r),
            ("recurrence.phase", phase, r),
            ("recurrence.b_real", b_real.as_mut_slice(), r),
            ("recurrence.b_imag", b_imag.as_mut_slice(), r),
            ("recurrence.gamma", gamma, r),
        ];
        match &mut self.head {
            Head::Linear(l) => {
                let t = l.trainable;
                out.push(("head.w", l.w.as_mut_slice(), t));
                out.push(("head.b", &mut l.b, t));
            }
            Head::Mlp(p) => {
                let t = p.trainable;
                out.push(("head.w1", p.w1.as_mut_slice(), t));
                out.push(("head.b1", &mut p.b1, t));
                out.push(("head.w2", p.w2.as_mut_slice(), t));
                out.push(("head.b2", &mut p.b2, t));
            }
        }
        out
    }

    pub fn n_params(&self) -> usize {
        self.params().iter().map(|b| b.values.len()).sum()
    }

    pub fn zero_gradients(&self) -> Gradients {
        Gradients {
            blocks: self.params().iter().map(|b| (b.name, vec![0.0; b.values.len()])).collect(),
        }
    }

    /// Serializes to the `LRNN` container: a dimension/flag table, then every
    /// parameter block in declaration order.
    pub fn to_container(&self) -> Container {
        let (width, kind, act) = match &self.head {
            Head::Linear(_) => (0, 0, 0),
            Head::Mlp(p) => (p.w1.rows(), 1, matches!(p.activation, Activation::Sigmoid) as u64),
        };
        let dims = vec![
            self.input_dim() as u64,
            self.embed_dim() as u64,
            self.state_dim() as u64,
            self.output_dim() as u64,
            width as u64,
            kind,
            act,
            u64::from(self.state_view.time_channel),
            u64::from(self.state_view.drop_imaginary),
            u64::from(self.readout == Readout::LastState),
            u64::from(self.encoder.trainable)
                | u64::from(self.recurrence.trainable) << 1
                | u64::from(self.head.trainable()) << 2,
        ];
        let mut c = Container::new(*b"LRNN", dims);
        for b in self.params() {
            c.push(b.name, b.values.to_vec());
        }
        c
    }

    pub fn from_container_bytes(bytes: &[u8]) -> Result<Self> {
        let c = Container::from_bytes(bytes, *b"LRNN")?;
        let d: [u64; 11] = c
            .dims
            .as_slice()
            .try_into()
            .map_err(|_| Error::format(12, format!("LRNN container needs 11 dims, found {}", c.dims.len())))?;
        let [m, h, n, s, width] = [d[0], d[1], d[2], d[3], d[4]].map(|x| x as usize);
        let view = StateView {
            time_channel: d[7] != 0,
            drop_imaginary: d[8] != 0,
        };
        let i = view.feature_dim(n);
        let mat = |name: &str, rows: usize, cols: usize| -> Result<RMatrix> {
            let v = c.block(name)?;
            RMatrix::new(rows, cols, v.to_vec()).map_err(|_| Error::format(0, format!("block `{name}` has wrong size")))
        };
        let vec_of = |name: &str, len: usize| -> Result<Vec<f64>> {
            let v = c.block(name)?;
            if v.len() != len {
                return Err(Error::format(0, format!("block `{name}` has {} values, expected {len}", v.len())));
            }
            Ok(v.to_vec())
        };
        let head = match d[5] {
            0 => Head::Linear(LinearHead {
                w: mat("head.w", s, i)?,
                b: vec_of("head.b", s)?,
                trainable: d[10] & 4 != 0,
            }),
            1 => Head::Mlp(MlpHead {
                w1: mat("head.w1", width, i)?,
                b1: vec_of("head.b1", width)?,
                w2: mat("head.w2", s, width)?,
                b2: vec_of("head.b2", s)?,
                activation: if d[6] == 1 { Activation::Sigmoid } else { Activation::Relu },
                trainable: d[10] & 4 != 0,
            }),
            k => return Err(Error::format(12, format!("unknown head kind {k}"))),
        };
        let model = Self {
            encoder: Encoder {
                w: mat("encoder.w", h, m)?,
                bias: vec_of("encoder.bias", h)?,
                trainable: d[10] & 1 != 0,
            },
            recurrence: PolarRecurrence {
                log_log_magnitude: vec_of("recurrence.log_log_magnitude", n)?,
                phase: vec_of("recurrence.phase", n)?,
                b_real: mat("recurrence.b_real", n, h)?,
                b_imag: mat("recurrence.b_imag", n, h)?,
                gamma: vec_of("recurrence.gamma", n)?,
                trainable: d[10] & 2 != 0,
            },
            state_view: view,
            head,
            readout: if d[9] != 0 { Readout::LastState } else { Readout::PerStep },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_container().to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_container_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn cfg(head: HeadKind) -> ModelConfig {
        ModelConfig::new(2, 3, 4, 2, head)
    }

    #[test]
    fn init_invariants() {
        let m = Seq2SeqModel::init(&cfg(HeadKind::Linear), &mut rng::stream(0, "m")).unwrap();
        for (g, r) in m.recurrence.gamma.iter().zip(m.recurrence.magnitudes()) {
            assert!(r > 0.0 && r < 1.0);
            assert!((g - (1.0 - r * r).sqrt()).abs() < 1e-12);
        }
        assert_eq!(m.feature_dim(), 8);
        let lam = m.recurrence.eigenvalues();
        assert!(lam.iter().all(|z| z.norm() >= 0.9 - 1e-12 && z.norm() <= 0.999 + 1e-12));
    }

    #[test]
    fn polar_round_trip() {
        let lam = vec![Complex64::from_polar(0.5, 1.0), Complex64::from_polar(0.99, -2.0)];
        let r = PolarRecurrence::from_eigenvalues(&lam, RMatrix::zeros(2, 1), RMatrix::zeros(2, 1)).unwrap();
        for (a, b) in r.eigenvalues().iter().zip(&lam) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(PolarRecurrence::from_eigenvalues(&[Complex64::new(1.0, 0.0)], RMatrix::zeros(1, 1), RMatrix::zeros(1, 1)).is_err());
    }

    #[test]
    fn extreme_nu_stays_in_disk() {
        let mut r = PolarRecurrence::from_eigenvalues(&[Complex64::new(0.5, 0.0)], RMatrix::zeros(1, 1), RMatrix::zeros(1, 1)).unwrap();
        for nu in [-800.0, -40.0, -30.0, -5.0, 0.0, 3.0] {
            r.log_log_magnitude[0] = nu;
            let m = r.magnitudes()[0];
            assert!((0.0..1.0).contains(&m), "{nu} -> {m}");
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(HeadKind::Mlp { width: 0, activation: Activation::Relu });
        assert!(c.validate().is_err());
        c.head = HeadKind::Linear;
        c.r_max = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut c = cfg(HeadKind::Mlp { width: 5, activation: Activation::Sigmoid });
        c.view.time_channel = true;
        c.readout = Readout::LastState;
        c.train_encoder = false;
        let m = Seq2SeqModel::init(&c, &mut rng::stream(1, "m")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.lrnn");
        m.save(&path).unwrap();
        assert_eq!(Seq2SeqModel::load(&path).unwrap(), m);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"LRNN");
        assert!(Seq2SeqModel::from_container_bytes(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn param_blocks_are_consistent() {
        let mut m = Seq2SeqModel::init(&cfg(HeadKind::Mlp { width: 3, activation: Activation::Relu }), &mut rng::stream(2, "m")).unwrap();
        let names: Vec<_> = m.params().iter().map(|b| b.name).collect();
        let names_mut: Vec<_> = m.params_mut().iter().map(|b| b.0).collect();
        assert_eq!(names, names_mut);
        assert_eq!(m.n_params(), 3 * 2 + 3 + 4 * 2 + 4 * 3 * 2 + 4 + 3 * 8 + 3 + 2 * 3 + 2);
    }
}
