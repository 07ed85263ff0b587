use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lrnn_cli::acceptance::{criterion_ids, run_criterion, Tolerances};
use lrnn_cli::config::SEED_ENV;
use lrnn_cli::{commands, CliError, CliResult, Command, ExperimentConfig, RunWriter};

/// Memory and reconstruction experiments for diagonal linear recurrences.
#[derive(Parser, Debug)]
#[command(name = "lrnn", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Condition number of the reconstruction map across eigenvalue radii.
    CondSweep(RunArgs),
    /// Per-timestep error of recovering inputs from the last hidden state.
    Reconstruct(RunArgs),
    /// Train recurrence and decoder to reproduce the input from the last state.
    TrainReconstruct(RunArgs),
    /// Learn a controlled ODE's input-output map.
    Ode(RunArgs),
    /// Run the acceptance suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set dims.N=128
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (overrides output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Override a tolerance, e.g. --set tol.c2.max_rel=1e-10
    #[arg(long = "set", value_name = "tol.KEY=VALUE")]
    set: Vec<String>,
    /// Run only these criteria
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn init_pool(jobs: Option<usize>) -> CliResult<()> {
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    Ok(())
}

fn run(cmd: Command, args: RunArgs) -> CliResult<()> {
    init_pool(args.jobs)?;
    let mut sets = args.set;
    if let Some(out) = args.out {
        sets.push(format!("output_dir={}", out.display()));
    }
    let cfg = ExperimentConfig::load(cmd, args.config.as_deref(), &sets, std::env::var(SEED_ENV).ok())?;
    let mut w = RunWriter::create(&cfg.output_dir)?;
    match cmd {
        Command::CondSweep => {
            let rep = commands::cond_sweep(&cfg, &mut w)?;
            for (r, p, m) in &rep.medians {
                let p = p.map_or(String::new(), |p| format!(" P={p}"));
                println!("r_min={r}{p}  median log10 cond = {m:.3}");
            }
        }
        Command::Reconstruct => {
            for c in commands::reconstruct(&cfg, &mut w)? {
                let l = c.mse.len();
                let k = 16.min(l);
                let first = c.mse[..k].iter().sum::<f64>() / k as f64;
                let last = c.mse[l - k..].iter().sum::<f64>() / k as f64;
                println!("N={} r_min={}  mean MSE first {k}: {first:.3e}  last {k}: {last:.3e}", c.n, c.r_min);
            }
        }
        Command::TrainReconstruct => {
            for r in commands::train_reconstruct(&cfg, &mut w)? {
                println!("{:<6} N={:<5} best test MSE {}", r.head, r.n, r.best_test.map_or("failed".into(), |t| format!("{t:.4e}")));
            }
        }
        Command::Ode => {
            let rep = commands::ode(&cfg, &mut w)?;
            for h in &rep.heads {
                let mag = h.best_model.as_ref().map_or(f64::NAN, |m| m.max_eigen_magnitude());
                println!(
                    "{:<6} best test MSE {}  max |lambda| {mag:.6}",
                    h.head,
                    h.best_test.map_or("failed".into(), |t| format!("{t:.4e}"))
                );
            }
            println!("rejected trajectories: train {}, test {}", rep.train_rejected, rep.test_rejected);
        }
    }
    let manifest = w.finish(&cfg)?;
    println!("{} files written to {}", manifest.files.len() + 1, cfg.output_dir.display());
    Ok(())
}

fn verify(args: VerifyArgs) -> CliResult<bool> {
    init_pool(args.jobs)?;
    let tol = Tolerances::default().with_overrides(&args.set)?;
    let ids = if args.only.is_empty() { criterion_ids() } else { args.only };
    let mut all = true;
    for id in ids {
        let report = run_criterion(id, &tol)?;
        println!("{}", report.line());
        all &= report.passed;
    }
    println!("{}", if all { "all criteria passed" } else { "some criteria failed" });
    Ok(all)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::CondSweep(a) => run(Command::CondSweep, a).map(|_| true),
        Cmd::Reconstruct(a) => run(Command::Reconstruct, a).map(|_| true),
        Cmd::TrainReconstruct(a) => run(Command::TrainReconstruct, a).map(|_| true),
        Cmd::Ode(a) => run(Command::Ode, a).map(|_| true),
        Cmd::Verify(a) => verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lrnn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
