//! Run output: CSV tables, the single file writer and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use lrnn_memory::rng::fnv1a64;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_NAME: &str = "manifest.json";

/// In-memory CSV table with the versioned header comment.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        let mut text = format!("# lrnn-memory v{VERSION} {experiment}\n");
        text.push_str(&columns.join(","));
        text.push('\n');
        Self {
            text,
            columns: columns.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "csv row width");
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Shortest round-trip formatting, so equal values always print identically.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    /// FNV-1a 64 of the file contents, 16 hex digits.
    pub fnv1a64: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub files: Vec<FileEntry>,
    pub rejected: BTreeMap<String, usize>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Failed(format!("bad manifest {}: {e}", path.display())))
    }

    /// Recomputes every digest; returns the paths whose contents no longer match.
    pub fn verify(&self, dir: &Path) -> CliResult<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.files {
            let path = dir.join(&f.path);
            let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            if digest_hex(&bytes) != f.fnv1a64 || bytes.len() as u64 != f.bytes {
                bad.push(f.path.clone());
            }
        }
        Ok(bad)
    }

    pub fn digest_of(&self, path: &str) -> Option<&str> {
        self.files.iter().find(|f| f.path == path).map(|f| f.fnv1a64.as_str())
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    format!("{:016x}", fnv1a64(bytes))
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// Write-then-rename so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Every file a command produces goes through one of these; `finish` writes the manifest last.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    started: u128,
    files: Vec<FileEntry>,
    rejected: BTreeMap<String, usize>,
}

impl RunWriter {
    pub fn create(dir: impl Into<PathBuf>) -> CliResult<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            dir,
            started: now_ms(),
            files: Vec::new(),
            rejected: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        if self.files.iter().any(|f| f.path == name) {
            return Err(CliError::Failed(format!("output `{name}` written twice")));
        }
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            fnv1a64: digest_hex(bytes),
        });
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_csv(&mut self, name: &str, csv: &Csv) -> CliResult<PathBuf> {
        self.write(name, csv.as_str().as_bytes())
    }

    pub fn record_rejected(&mut self, label: &str, count: usize) {
        *self.rejected.entry(label.to_string()).or_default() += count;
    }

    pub fn finish(self, cfg: &ExperimentConfig) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            experiment: cfg.experiment.clone(),
            command: cfg.command.name().to_string(),
            version: VERSION.to_string(),
            config: cfg.entries().clone(),
            started_unix_ms: self.started,
            finished_unix_ms: now_ms(),
            files: self.files,
            rejected: self.rejected,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Failed(e.to_string()))?;
        let _ = writeln!(text);
        write_atomic(&self.dir.join(MANIFEST_NAME), text.as_bytes())?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn csv_header_and_rows() {
        let mut c = Csv::new("demo", &["a", "b"]);
        c.row(&["1".into(), fmt_f64(0.1)]);
        assert_eq!(c.as_str(), format!("# lrnn-memory v{VERSION} demo\na,b\n1,0.1\n"));
    }

    #[test]
    fn fmt_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 308.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn manifest_lists_every_file_with_recomputable_digest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::from_entries(Command::CondSweep, &[]).unwrap();
        let mut w = RunWriter::create(dir.path()).unwrap();
        w.write("a.csv", b"hello").unwrap();
        w.write("b.bin", &[0u8, 1, 2]).unwrap();
        w.record_rejected("train", 2);
        assert!(w.write("a.csv", b"again").is_err());
        let m = w.finish(&cfg).unwrap();
        let loaded = RunManifest::load(dir.path()).unwrap();
        assert_eq!(loaded, m);
        assert_eq!(loaded.files.len(), 2);
        assert_eq!(loaded.digest_of("a.csv"), Some(digest_hex(b"hello").as_str()));
        assert!(loaded.verify(dir.path()).unwrap().is_empty());
        assert_eq!(loaded.rejected["train"], 2);
        std::fs::write(dir.path().join("b.bin"), [9u8]).unwrap();
        assert_eq!(loaded.verify(dir.path()).unwrap(), vec!["b.bin".to_string()]);
        assert!(!dir.path().join("a.partial").exists());
    }
}
