//! Flat `key = value` experiment configuration.
//!
//! Values are layered: command defaults, then the config file, then `--set`
//! overrides, then `LRNN_SEED`. Lists are comma-separated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lrnn_memory::recurrence::RingDensity;

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "LRNN_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CondSweep,
    Reconstruct,
    TrainReconstruct,
    Ode,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CondSweep => "cond-sweep",
            Command::Reconstruct => "reconstruct",
            Command::TrainReconstruct => "train-reconstruct",
            Command::Ode => "ode",
        }
    }
}

const KEYS: &[&str] = &[
    "experiment",
    "seed",
    "output_dir",
    "plot",
    "dims.L",
    "dims.N",
    "dims.H",
    "dims.M",
    "dims.S",
    "dims.D",
    "dims.P",
    "init.kind",
    "init.r_min",
    "init.r_max",
    "init.density",
    "train.epochs",
    "train.lr",
    "train.batch",
    "train.seeds_protocol",
    "train.schedule",
    "train.head",
    "train.activation",
    "data.source",
    "data.n_train",
    "data.n_test",
    "data.cache",
    "sweep.seeds",
    "sweep.mode",
    "sweep.rcond",
];

fn defaults(cmd: Command) -> BTreeMap<String, String> {
    let common: &[(&str, &str)] = &[
        ("seed", "0"),
        ("output_dir", "out"),
        ("plot", "true"),
        ("dims.H", "16"),
        ("dims.M", "1"),
        ("dims.S", "1"),
        ("dims.D", "128"),
        ("dims.P", "32"),
        ("init.kind", "ring"),
        ("init.r_max", "1"),
        ("init.density", "area"),
        ("train.epochs", "40"),
        ("train.lr", "0.003"),
        ("train.batch", "8"),
        ("train.seeds_protocol", "single"),
        ("train.schedule", "cosine"),
        ("train.head", "both"),
        ("train.activation", "relu"),
        ("data.n_train", "1000"),
        ("data.n_test", "200"),
        ("data.cache", "false"),
        ("sweep.seeds", "10"),
        ("sweep.rcond", "default"),
    ];
    let specific: &[(&str, &str)] = match cmd {
        Command::CondSweep => &[
            ("dims.L", "128"),
            ("dims.N", "256"),
            ("init.r_min", "0,0.2,0.4,0.6,0.8,0.9,0.99"),
            ("sweep.mode", "vandermonde"),
            ("data.source", "none"),
        ],
        Command::Reconstruct => &[
            ("dims.L", "256"),
            ("dims.N", "512"),
            ("init.r_min", "0"),
            ("sweep.mode", "full"),
            ("data.source", "synthetic"),
            ("data.n_test", "50"),
        ],
        Command::TrainReconstruct => &[
            ("dims.L", "64"),
            ("dims.N", "128"),
            ("dims.S", "64"),
            ("dims.D", "256"),
            ("init.r_min", "0.9"),
            ("init.r_max", "0.999"),
            ("train.epochs", "100"),
            ("train.lr", "0.003"),
            ("train.batch", "16"),
            ("sweep.mode", "full"),
            ("data.source", "synthetic"),
            ("data.n_train", "400"),
            ("data.n_test", "100"),
        ],
        Command::Ode => &[
            ("dims.L", "256"),
            ("dims.N", "64"),
            ("init.r_min", "0.9"),
            ("init.r_max", "0.999"),
            ("train.seeds_protocol", "best-of-3"),
            ("sweep.mode", "full"),
            ("data.source", "lv"),
        ],
    };
    let mut map: BTreeMap<String, String> = common.iter().chain(specific).map(|(k, v)| (k.to_string(), v.to_string())).collect();
    map.insert("experiment".into(), cmd.name().into());
    map
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value, got `{raw}`", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_override(s: &str) -> CliResult<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{s}`")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Ring,
    Roots,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    None,
    Synthetic,
    Idx(PathBuf),
    Sparse,
    Smooth,
    Pt,
    Lv,
    Lorenz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedsProtocol {
    Single,
    BestOf(usize),
}

impl SeedsProtocol {
    /// Training seeds `master + 1 ..= master + k`.
    pub fn seeds(self, master: u64) -> Vec<u64> {
        let k = match self {
            SeedsProtocol::Single => 1,
            SeedsProtocol::BestOf(k) => k,
        };
        (1..=k as u64).map(|i| master.wrapping_add(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadChoice {
    Linear,
    Mlp,
    Both,
}

impl HeadChoice {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            HeadChoice::Linear => &["linear"],
            HeadChoice::Mlp => &["mlp"],
            HeadChoice::Both => &["linear", "mlp"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dims {
    pub l: usize,
    pub n: Vec<usize>,
    pub h: usize,
    pub m: usize,
    pub s: usize,
    pub d: usize,
    pub p: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitSpec {
    pub kind: InitKind,
    pub r_min: Vec<f64>,
    pub r_max: f64,
    pub density: RingDensity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSpec {
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub seeds_protocol: SeedsProtocol,
    pub cosine: bool,
    pub head: HeadChoice,
    pub sigmoid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub source: DataSource,
    pub n_train: usize,
    pub n_test: usize,
    pub cache: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub seeds: usize,
    pub mode: String,
    pub rcond: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub experiment: String,
    pub seed: u64,
    pub dims: Dims,
    pub init: InitSpec,
    pub train: TrainSpec,
    pub data: DataSpec,
    pub sweep: SweepOptions,
    pub output_dir: PathBuf,
    pub plot: bool,
    raw: BTreeMap<String, String>,
}

fn num<T: FromStr>(raw: &BTreeMap<String, String>, key: &str) -> CliResult<T> {
    let v = &raw[key];
    v.parse()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse `{v}`")))
}

fn list<T: FromStr>(raw: &BTreeMap<String, String>, key: &str) -> CliResult<Vec<T>> {
    raw[key]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("{key}: cannot parse `{s}`"))))
        .collect()
}

fn flag(raw: &BTreeMap<String, String>, key: &str) -> CliResult<bool> {
    match raw[key].as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        v => Err(CliError::Usage(format!("{key}: expected true or false, got `{v}`"))),
    }
}

impl ExperimentConfig {
    /// Builds a config from command defaults plus `entries` applied in order.
    pub fn from_entries(cmd: Command, entries: &[(String, String)]) -> CliResult<Self> {
        let mut raw = defaults(cmd);
        for (k, v) in entries {
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::Usage(format!("unknown config key `{k}`")));
            }
            raw.insert(k.clone(), v.clone());
        }
        Self::from_raw(cmd, raw)
    }

    /// Layers the optional file, the `--set` overrides and `LRNN_SEED`.
    pub fn load(cmd: Command, file: Option<&Path>, sets: &[String], env_seed: Option<String>) -> CliResult<Self> {
        let mut entries = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_kv(&text)?
            }
            None => Vec::new(),
        };
        for s in sets {
            entries.push(parse_override(s)?);
        }
        if let Some(seed) = env_seed {
            entries.push(("seed".into(), seed));
        }
        Self::from_entries(cmd, &entries)
    }

    fn from_raw(command: Command, raw: BTreeMap<String, String>) -> CliResult<Self> {
        let dims = Dims {
            l: num(&raw, "dims.L")?,
            n: list(&raw, "dims.N")?,
            h: num(&raw, "dims.H")?,
            m: num(&raw, "dims.M")?,
            s: num(&raw, "dims.S")?,
            d: num(&raw, "dims.D")?,
            p: list(&raw, "dims.P")?,
        };
        let kind = match raw["init.kind"].as_str() {
            "ring" => InitKind::Ring,
            "roots" => InitKind::Roots,
            "real" => InitKind::Real,
            v => return Err(CliError::Usage(format!("init.kind: expected ring, roots or real, got `{v}`"))),
        };
        let density = match raw["init.density"].as_str() {
            "area" => RingDensity::Area,
            "radius" => RingDensity::Radius,
            v => return Err(CliError::Usage(format!("init.density: expected area or radius, got `{v}`"))),
        };
        let init = InitSpec {
            kind,
            r_min: list(&raw, "init.r_min")?,
            r_max: num(&raw, "init.r_max")?,
            density,
        };
        let seeds_protocol = match raw["train.seeds_protocol"].as_str() {
            "single" => SeedsProtocol::Single,
            v => match v.strip_prefix("best-of-").map(str::parse::<usize>) {
                Some(Ok(k)) if k > 0 => SeedsProtocol::BestOf(k),
                _ => return Err(CliError::Usage(format!("train.seeds_protocol: expected single or best-of-K, got `{v}`"))),
            },
        };
        let head = match raw["train.head"].as_str() {
            "linear" => HeadChoice::Linear,
            "mlp" => HeadChoice::Mlp,
            "both" => HeadChoice::Both,
            v => return Err(CliError::Usage(format!("train.head: expected linear, mlp or both, got `{v}`"))),
        };
        let train = TrainSpec {
            epochs: num(&raw, "train.epochs")?,
            lr: num(&raw, "train.lr")?,
            batch: num(&raw, "train.batch")?,
            seeds_protocol,
            cosine: match raw["train.schedule"].as_str() {
                "cosine" => true,
                "constant" => false,
                v => return Err(CliError::Usage(format!("train.schedule: expected cosine or constant, got `{v}`"))),
            },
            head,
            sigmoid: match raw["train.activation"].as_str() {
                "relu" => false,
                "sigmoid" => true,
                v => return Err(CliError::Usage(format!("train.activation: expected relu or sigmoid, got `{v}`"))),
            },
        };
        let source = match raw["data.source"].as_str() {
            "none" => DataSource::None,
            "synthetic" => DataSource::Synthetic,
            "sparse" => DataSource::Sparse,
            "smooth" => DataSource::Smooth,
            "pt" => DataSource::Pt,
            "lv" => DataSource::Lv,
            "lorenz" => DataSource::Lorenz,
            v => match v.strip_prefix("idx:") {
                Some(path) if !path.is_empty() => DataSource::Idx(PathBuf::from(path)),
                _ => return Err(CliError::Usage(format!("data.source: unknown source `{v}`"))),
            },
        };
        let data = DataSpec {
            source,
            n_train: num(&raw, "data.n_train")?,
            n_test: num(&raw, "data.n_test")?,
            cache: flag(&raw, "data.cache")?,
        };
        let sweep = SweepOptions {
            seeds: num(&raw, "sweep.seeds")?,
            mode: raw["sweep.mode"].clone(),
            rcond: match raw["sweep.rcond"].as_str() {
                "default" => None,
                _ => Some(num(&raw, "sweep.rcond")?),
            },
        };
        let cfg = Self {
            command,
            experiment: raw["experiment"].clone(),
            seed: num(&raw, "seed")?,
            dims,
            init,
            train,
            data,
            sweep,
            output_dir: PathBuf::from(&raw["output_dir"]),
            plot: flag(&raw, "plot")?,
            raw,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let d = &self.dims;
        if d.n.is_empty() {
            return Err(CliError::Usage("dims.N grid is empty".into()));
        }
        if self.init.r_min.is_empty() {
            return Err(CliError::Usage("init.r_min grid is empty".into()));
        }
        if d.p.is_empty() {
            return Err(CliError::Usage("dims.P grid is empty".into()));
        }
        let scalars = [("L", d.l), ("H", d.h), ("M", d.m), ("S", d.s), ("D", d.d)];
        for (name, v) in scalars.into_iter().chain(d.n.iter().map(|&n| ("N", n))).chain(d.p.iter().map(|&p| ("P", p))) {
            if v == 0 {
                return Err(CliError::Usage(format!("dims.{name} must be at least 1")));
            }
        }
        let r_max = self.init.r_max;
        if !(r_max.is_finite() && r_max <= 1.0) {
            return Err(CliError::Usage(format!("init.r_max must be at most 1, got {r_max}")));
        }
        if let Some(r) = self.init.r_min.iter().find(|r| !(r.is_finite() && **r >= 0.0 && **r <= r_max)) {
            return Err(CliError::Usage(format!("init.r_min {r} outside [0, r_max = {r_max}]")));
        }
        if self.sweep.seeds == 0 {
            return Err(CliError::Usage("sweep.seeds must be at least 1".into()));
        }
        let t = &self.train;
        if t.epochs == 0 || t.batch == 0 || !(t.lr > 0.0 && t.lr.is_finite()) {
            return Err(CliError::Usage("train.epochs, train.batch and train.lr must be positive".into()));
        }
        Ok(())
    }

    /// Canonical `key = value` text, one line per key in sorted order.
    pub fn snapshot(&self) -> String {
        self.raw.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.raw
    }

    /// Seeds `seed, seed + 1, …` for sweep-style commands.
    pub fn sweep_seeds(&self) -> Vec<u64> {
        (0..self.sweep.seeds as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_validate_for_every_command() {
        for cmd in [Command::CondSweep, Command::Reconstruct, Command::TrainReconstruct, Command::Ode] {
            let c = ExperimentConfig::from_entries(cmd, &[]).unwrap();
            assert_eq!(c.experiment, cmd.name());
        }
    }

    #[test]
    fn cond_sweep_defaults() {
        let c = ExperimentConfig::from_entries(Command::CondSweep, &[]).unwrap();
        assert_eq!((c.dims.l, c.dims.n.as_slice()), (128, &[256][..]));
        assert_eq!(c.init.r_min.len(), 7);
        assert_eq!(c.sweep_seeds(), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn file_then_overrides_then_env() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "# comment\ndims.N = 64, 128\nseed = 3\n\ninit.r_min = 0.5 # trailing\n").unwrap();
        let c = ExperimentConfig::load(Command::CondSweep, Some(&path), &["dims.N=32".into()], None).unwrap();
        assert_eq!(c.dims.n, vec![32]);
        assert_eq!(c.seed, 3);
        assert_eq!(c.init.r_min, vec![0.5]);
        let c = ExperimentConfig::load(Command::CondSweep, Some(&path), &[], Some("11".into())).unwrap();
        assert_eq!(c.seed, 11);
        assert_eq!(c.dims.n, vec![64, 128]);
    }

    #[test]
    fn usage_errors() {
        let bad = [
            ("init.r_min", ""),
            ("dims.N", ""),
            ("dims.L", "0"),
            ("init.r_max", "1.5"),
            ("init.r_min", "0.5,0.99"),
            ("nope", "1"),
            ("train.seeds_protocol", "best-of-0"),
            ("seed", "x"),
        ];
        for (k, v) in bad {
            let mut entries = set(&[(k, v)]);
            if k == "init.r_min" && v.contains("0.99") {
                entries.push(("init.r_max".into(), "0.9".into()));
            }
            let err = ExperimentConfig::from_entries(Command::CondSweep, &entries).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{k}={v}");
        }
    }

    #[test]
    fn parse_kv_rejects_missing_equals() {
        assert!(parse_kv("dims.N 4").is_err());
        assert!(parse_override("dims.N").is_err());
    }

    #[test]
    fn seeds_protocol() {
        assert_eq!(SeedsProtocol::BestOf(6).seeds(0), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(SeedsProtocol::Single.seeds(10), vec![11]);
        let c = ExperimentConfig::from_entries(Command::Ode, &set(&[("train.seeds_protocol", "best-of-6")])).unwrap();
        assert_eq!(c.train.seeds_protocol, SeedsProtocol::BestOf(6));
    }

    #[test]
    fn snapshot_is_sorted_and_complete() {
        let c = ExperimentConfig::from_entries(Command::Ode, &[]).unwrap();
        let snap = c.snapshot();
        let keys: Vec<&str> = snap.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), KEYS.len());
        let reparsed = parse_kv(&snap).unwrap();
        assert_eq!(ExperimentConfig::from_entries(Command::Ode, &reparsed).unwrap(), c);
    }
}
