use std::path::Path;
use std::process::{Command, Output};

use lrnn_cli::commands::train_reconstruct;
use lrnn_cli::{ExperimentConfig, RunManifest, RunWriter};

fn lrnn(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lrnn"));
    c.args(args).env_remove("LRNN_SEED");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("spawn lrnn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn empty_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrnn(&["cond-sweep", "--set", "init.r_min=", "--out", &out_arg(dir.path())], &[]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn bad_flags_and_keys_exit_2() {
    assert_eq!(lrnn(&["cond-sweep", "--bogus"], &[]).status.code(), Some(2));
    assert_eq!(lrnn(&["cond-sweep", "--set", "dims.Q=3"], &[]).status.code(), Some(2));
    assert_eq!(lrnn(&["cond-sweep", "--config", "/nonexistent/cfg"], &[]).status.code(), Some(2));
}

#[test]
fn config_file_overrides_and_seed_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "dims.L = 16\ndims.N = 32\ninit.r_min = 0, 0.5, 0.9\nsweep.seeds = 2\n").unwrap();
    let out = dir.path().join("run");
    let o = lrnn(
        &["cond-sweep", "--config", cfg.to_str().unwrap(), "--set", "sweep.seeds=3", "--out", &out_arg(&out), "--jobs", "2"],
        &[("LRNN_SEED", "5")],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = RunManifest::load(&out).unwrap();
    assert_eq!(m.config["seed"], "5");
    assert_eq!(m.config["sweep.seeds"], "3");
    assert!(m.verify(&out).unwrap().is_empty());
    let csv = std::fs::read_to_string(out.join("cond_sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 9);
    let seeds: Vec<&str> = rows.iter().map(|r| r.split(',').nth(3).unwrap()).collect();
    assert_eq!(&seeds[..3], ["5", "6", "7"]);
    assert!(stdout(&o).contains("median log10 cond"));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}"));
        let o = lrnn(
            &["reconstruct", "--set", "dims.L=64", "--set", "dims.N=48,96", "--set", "sweep.seeds=3", "--set", "data.n_test=6", "--out", &out_arg(&out)],
            &[],
        );
        assert!(o.status.success());
        let m = RunManifest::load(&out).unwrap();
        digests.push(m.digest_of("reconstruct.csv").unwrap().to_string());
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn verify_reports_runtime_and_fails_on_corrupted_tolerance() {
    let ok = lrnn(&["verify", "--only", "1,8"], &[]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert!(text.lines().all(|l| !l.starts_with("PASS") || l.contains("s /")));

    let bad = lrnn(&["verify", "--only", "9", "--set", "tol.c9.factor_hi=2"], &[]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("FAIL"));

    let unknown = lrnn(&["verify", "--set", "tol.c1.what=1"], &[]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn lorenz_config_uses_its_own_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrnn(
        &[
            "ode",
            "--out",
            &out_arg(dir.path()),
            "--set",
            "data.source=lorenz",
            "--set",
            "dims.L=512",
            "--set",
            "dims.N=8",
            "--set",
            "dims.H=4",
            "--set",
            "dims.D=8",
            "--set",
            "data.n_train=8",
            "--set",
            "data.n_test=2",
            "--set",
            "train.epochs=1",
            "--set",
            "train.seeds_protocol=single",
            "--set",
            "train.head=mlp",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = ExperimentConfig::from_entries(
        lrnn_cli::Command::Ode,
        &[("data.source".into(), "lorenz".into()), ("dims.L".into(), "512".into())],
    )
    .unwrap();
    let sys = lrnn_cli::commands::ode_system(&cfg).unwrap();
    assert_eq!((sys.delta, sys.horizon), (0.002, 512));
    let traj = std::fs::read_to_string(dir.path().join("ode_trajectories.csv")).unwrap();
    assert_eq!(traj.lines().count(), 2 + 2 * 512);
    let eig = std::fs::read_to_string(dir.path().join("ode_eigenvalues.csv")).unwrap();
    for line in eig.lines().skip(2) {
        let abs: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(abs < 1.0);
    }
}

#[test]
fn learned_reconstruction_in_the_exact_regime() {
    // N = 2L: the last state determines the whole input, so training should get close.
    let cfg = ExperimentConfig::from_entries(
        lrnn_cli::Command::TrainReconstruct,
        &[("train.head".into(), "linear".into()), ("plot".into(), "false".into())],
    )
    .unwrap();
    assert_eq!((cfg.dims.l, cfg.dims.n.as_slice()), (64, &[128][..]));
    let dir = tempfile::tempdir().unwrap();
    let res = train_reconstruct(&cfg, &mut RunWriter::create(dir.path()).unwrap()).unwrap();
    let best = res[0].best_test.unwrap();
    assert!(best < 1e-2, "{best}");
}

#[test]
fn best_of_six_has_best_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrnn(
        &[
            "train-reconstruct",
            "--out",
            &out_arg(dir.path()),
            "--set",
            "dims.L=16",
            "--set",
            "dims.S=16",
            "--set",
            "dims.N=16",
            "--set",
            "dims.H=4",
            "--set",
            "dims.D=16",
            "--set",
            "data.n_train=16",
            "--set",
            "data.n_test=4",
            "--set",
            "train.epochs=2",
            "--set",
            "train.seeds_protocol=best-of-6",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("train_reconstruct.csv")).unwrap();
    let mut lines = csv.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let best_col = header.iter().position(|h| *h == "best_test_mse").unwrap();
    let test_col = header.iter().position(|h| *h == "test_mse").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    for head in ["linear", "mlp"] {
        let group: Vec<&Vec<&str>> = rows.iter().filter(|r| r[0] == head).collect();
        let min = group.iter().map(|r| r[test_col].parse::<f64>().unwrap()).fold(f64::INFINITY, f64::min);
        assert!(group.iter().all(|r| r[best_col].parse::<f64>().unwrap() == min));
    }
}
