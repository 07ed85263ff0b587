//! Controlled ODEs `ż = f(z, v)`, `y = z_readout`, sampled on a fixed grid.
//!
//! Integration is classical fixed-step RK4. The input is held constant over each
//! step (zero-order hold): step `k` advances from `(k-1)Δ` to `kΔ` using `v_k`, and
//! `y_k = z_readout(kΔ)`.

use rayon::prelude::*;

use super::signals::{smooth_input_sampler, LowFrequencyFamily};
use crate::container::Container;
use crate::error::{Error, Result};
use crate::numerics::RMatrix;
use crate::rng;

/// States with a component above this magnitude are rejected.
pub const BLOWUP_LIMIT: f64 = 1e6;

/// `rhs(state, input, params, out)` writes `ż` into `out`.
pub type RhsFn = fn(&[f64], f64, &[f64], &mut [f64]);

#[derive(Debug, Clone)]
pub struct OdeSystem {
    pub name: &'static str,
    pub state_dim: usize,
    /// Named parameters, passed to `rhs` in this order.
    pub params: Vec<(&'static str, f64)>,
    pub rhs: RhsFn,
    pub readout: usize,
    pub z0: Vec<f64>,
    pub delta: f64,
    pub horizon: usize,
}

impl OdeSystem {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::domain(format!("step size must be positive, got {}", self.delta)));
        }
        if self.z0.len() != self.state_dim {
            return Err(Error::domain(format!(
                "z0 has {} entries for a {}-state system",
                self.z0.len(),
                self.state_dim
            )));
        }
        if self.readout >= self.state_dim {
            return Err(Error::domain("readout index out of range"));
        }
        Ok(())
    }

    fn param_values(&self) -> Vec<f64> {
        self.params.iter().map(|&(_, v)| v).collect()
    }
}

#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    /// `state_dim × L`; column `k` is `z((k+1)Δ)`.
    pub states: RMatrix,
    pub outputs: Vec<f64>,
}

pub fn rk4_integrate(system: &OdeSystem, input: &[f64]) -> Result<OdeTrajectory> {
    system.validate()?;
    if input.len() != system.horizon {
        return Err(Error::domain(format!(
            "input length {} differs from horizon {}",
            input.len(),
            system.horizon
        )));
    }
    let d = system.state_dim;
    let h = system.delta;
    let p = system.param_values();
    let mut z = system.z0.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut states = RMatrix::zeros(d, input.len());
    let mut outputs = Vec::with_capacity(input.len());
    for (step, &v) in input.iter().enumerate() {
        (system.rhs)(&z, v, &p, &mut k1);
        for i in 0..d {
            tmp[i] = z[i] + 0.5 * h * k1[i];
        }
        (system.rhs)(&tmp, v, &p, &mut k2);
        for i in 0..d {
            tmp[i] = z[i] + 0.5 * h * k2[i];
        }
        (system.rhs)(&tmp, v, &p, &mut k3);
        for i in 0..d {
            tmp[i] = z[i] + h * k3[i];
        }
        (system.rhs)(&tmp, v, &p, &mut k4);
        for i in 0..d {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let magnitude = z.iter().fold(0.0_f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY });
        if magnitude > BLOWUP_LIMIT {
            return Err(Error::TrajectoryRejected {
                step: step + 1,
                magnitude,
            });
        }
        for i in 0..d {
            states[(i, step)] = z[i];
        }
        outputs.push(z[system.readout]);
    }
    Ok(OdeTrajectory { states, outputs })
}

fn pt_rhs(z: &[f64], v: f64, p: &[f64], out: &mut [f64]) {
    let (k1, k2, k3, k4, vmax, km) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    let mm = vmax * z[4] / (km + z[4]);
    out[0] = -k1 * z[0] - k2 * z[0] * z[2] + k3 * z[3] + v;
    out[1] = k1 * z[0];
    out[2] = -k2 * z[0] * z[2] + k3 * z[3] + mm;
    out[3] = k2 * z[0] * z[2] - (k3 + k4) * z[3];
    out[4] = k4 * z[3] - mm;
}

/// Protein transduction: 5 states, input on the first equation, readout `z1`.
pub fn pt_system() -> OdeSystem {
    OdeSystem {
        name: "pt",
        state_dim: 5,
        params: vec![("k1", 0.07), ("k2", 0.6), ("k3", 0.05), ("k4", 0.3), ("V", 0.017), ("Km", 0.3)],
        rhs: pt_rhs,
        readout: 0,
        z0: vec![1.0, 0.0, 1.0, 0.0, 0.0],
        delta: 0.01,
        horizon: 2048,
    }
}

fn lv_rhs(z: &[f64], v: f64, p: &[f64], out: &mut [f64]) {
    let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
    out[0] = z[0] * (a - b * z[1]);
    out[1] = -z[1] * (c - d * z[0]) + v;
}

/// Lotka–Volterra predator–prey, input on the second equation, readout `z1`.
pub fn lv_system() -> OdeSystem {
    OdeSystem {
        name: "lv",
        state_dim: 2,
        params: vec![("a", 1.0), ("b", 0.6), ("c", 1.0), ("d", 0.7)],
        rhs: lv_rhs,
        readout: 0,
        z0: vec![1.0, 0.5],
        delta: 0.01,
        horizon: 2048,
    }
}

fn lorenz_rhs(z: &[f64], v: f64, p: &[f64], out: &mut [f64]) {
    let (sigma, r, b) = (p[0], p[1], p[2]);
    out[0] = sigma * (z[1] - z[0]);
    out[1] = (r - z[2]) * z[0] - z[1] + v;
    out[2] = z[1] * z[0] - b * z[2];
}

/// Lorenz system, input on the second equation, readout `z1`.
pub fn lorenz_system() -> OdeSystem {
    OdeSystem {
        name: "lorenz",
        state_dim: 3,
        params: vec![("sigma", 10.0), ("r", 26.0), ("b", 8.0 / 3.0)],
        rhs: lorenz_rhs,
        readout: 0,
        z0: vec![-0.89229143, 1.08417925, 2.34322702],
        delta: 0.002,
        horizon: 512,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    pub generator: String,
    pub seed: u64,
    pub params: Vec<(String, f64)>,
    /// Trajectories that blew up and were resampled.
    pub rejected: usize,
}

/// Paired sequences: `inputs[i]` is `M × L`, `targets[i]` is `S × T` (`T = L` for
/// per-step targets, `T = 1` for targets read from the last state).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDataset {
    pub inputs: Vec<RMatrix>,
    pub targets: Vec<RMatrix>,
    pub meta: DatasetMeta,
}

const DATA_MAGIC: [u8; 4] = *b"DATA";

impl TrajectoryDataset {
    pub fn new(inputs: Vec<RMatrix>, targets: Vec<RMatrix>, meta: DatasetMeta) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::domain("inputs and targets differ in count"));
        }
        if let (Some(i0), Some(t0)) = (inputs.first(), targets.first()) {
            let ok = inputs.iter().all(|m| m.shape() == i0.shape())
                && targets.iter().all(|m| m.shape() == t0.shape());
            if !ok {
                return Err(Error::domain("inconsistent sample shapes"));
            }
        }
        Ok(Self { inputs, targets, meta })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(0, RMatrix::rows)
    }

    pub fn output_dim(&self) -> usize {
        self.targets.first().map_or(0, RMatrix::rows)
    }

    pub fn seq_len(&self) -> usize {
        self.inputs.first().map_or(0, RMatrix::cols)
    }

    pub fn target_len(&self) -> usize {
        self.targets.first().map_or(0, RMatrix::cols)
    }

    /// Samples `[start, end)` as a new dataset with the same metadata.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            inputs: self.inputs[start..end].to_vec(),
            targets: self.targets[start..end].to_vec(),
            meta: self.meta.clone(),
        }
    }

    /// Serializes to the `DATA` container.
    pub fn to_container(&self) -> Container {
        let dims = vec![
            self.len() as u64,
            self.input_dim() as u64,
            self.output_dim() as u64,
            self.seq_len() as u64,
            self.target_len() as u64,
            self.meta.seed,
            self.meta.rejected as u64,
        ];
        let mut c = Container::new(DATA_MAGIC, dims);
        c.push(format!("generator:{}", self.meta.generator), Vec::new());
        for (name, value) in &self.meta.params {
            c.push(format!("param:{name}"), vec![*value]);
        }
        c.push("inputs", self.inputs.iter().flat_map(|m| m.as_slice().iter().copied()).collect());
        c.push("targets", self.targets.iter().flat_map(|m| m.as_slice().iter().copied()).collect());
        c
    }

    pub fn from_container_bytes(bytes: &[u8]) -> Result<Self> {
        let c = Container::from_bytes(bytes, DATA_MAGIC)?;
        let [n, m, s, l, t, seed, rejected]: [u64; 7] = c
            .dims
            .as_slice()
            .try_into()
            .map_err(|_| Error::format(12, "DATA container needs 7 dims"))?;
        let (n, m, s, l, t) = (n as usize, m as usize, s as usize, l as usize, t as usize);
        let inputs = c.block("inputs")?;
        let targets = c.block("targets")?;
        if inputs.len() != n * m * l || targets.len() != n * s * t {
            return Err(Error::format(0, "DATA block sizes disagree with dims"));
        }
        let generator = c
            .blocks
            .iter()
            .find_map(|b| b.name.strip_prefix("generator:").map(str::to_string))
            .unwrap_or_default();
        let params = c
            .blocks
            .iter()
            .filter_map(|b| b.name.strip_prefix("param:").map(|k| (k.to_string(), b.values.first().copied().unwrap_or(f64::NAN))))
            .collect();
        let split = |data: &[f64], rows: usize, cols: usize| -> Result<Vec<RMatrix>> {
            if rows * cols == 0 {
                return Ok(vec![RMatrix::zeros(rows, cols); n]);
            }
            data.chunks(rows * cols).map(|ch| RMatrix::new(rows, cols, ch.to_vec())).collect()
        };
        Self::new(
            split(inputs, m, l)?,
            split(targets, s, t)?,
            DatasetMeta {
                generator,
                seed,
                params,
                rejected: rejected as usize,
            },
        )
    }
}

/// How [`generate_trajectories`] samples inputs.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub n_basis: usize,
    pub family: LowFrequencyFamily,
    /// Resampling attempts per sample before giving up.
    pub max_attempts: usize,
}

impl TrajectoryConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            n_basis: 16,
            family: LowFrequencyFamily::Haar,
            max_attempts: 100,
        }
    }
}

/// Drives `system` with smooth random inputs; sample `i` uses a stream derived from
/// `(seed, i)`, so samples can be generated in any order.
pub fn generate_trajectories(system: &OdeSystem, cfg: &TrajectoryConfig) -> Result<TrajectoryDataset> {
    system.validate()?;
    let len = system.horizon;
    let samples: Vec<(Vec<f64>, Vec<f64>, usize)> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| {
            let sample_seed = rng::derive_indexed_seed(cfg.seed, system.name, i as u64);
            for attempt in 0..cfg.max_attempts {
                let mut r = rng::indexed_stream(sample_seed, "attempt", attempt as u64);
                let v = smooth_input_sampler(len, cfg.n_basis, cfg.family, &mut r)?;
                match rk4_integrate(system, &v) {
                    Ok(traj) => return Ok((v, traj.outputs, attempt)),
                    Err(Error::TrajectoryRejected { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::domain(format!(
                "sample {i}: every one of {} attempts blew up",
                cfg.max_attempts
            )))
        })
        .collect::<Result<_>>()?;
    let mut inputs = Vec::with_capacity(samples.len());
    let mut targets = Vec::with_capacity(samples.len());
    let mut rejected = 0;
    for (v, y, r) in samples {
        inputs.push(RMatrix::row_vector(v));
        targets.push(RMatrix::row_vector(y));
        rejected += r;
    }
    if rejected > 0 {
        log::info!("{}: resampled {rejected} blown-up trajectories", system.name);
    }
    TrajectoryDataset::new(
        inputs,
        targets,
        DatasetMeta {
            generator: system.name.to_string(),
            seed: cfg.seed,
            params: system.params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            rejected,
        },
    )
}
