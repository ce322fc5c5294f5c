use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dampwave::output::write_outcome;
use dampwave::{pipeline, LabError, Options, Outcome, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "dampwave", version, about = "Damped wave experiments: simulation, solver comparison, decay fits and LTV certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for concurrent runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for random signals; overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Simulate dampings that fail validation.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Run the solver(s) and all requested diagnostics.
    Simulate,
    /// Check the damping against the defining conditions.
    ValidateDamping,
    /// Distances between the two solvers and a convergence table.
    CompareSolvers,
    /// Lyapunov certificate and Monte Carlo envelope verification.
    LtvVerify,
    /// Decay fits over a list of initial-data radii.
    DecaySweep,
}

fn run(cli: &Cli) -> Result<(Outcome, PathBuf, RunConfig), LabError> {
    let path = cli.config.as_ref().ok_or_else(|| LabError::Config("--config PATH is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let opts = Options { force: cli.force, seed: cli.seed };
    let outcome = match cli.command {
        Command::Simulate => pipeline::simulate(&cfg, &opts),
        Command::ValidateDamping => pipeline::validate(&cfg, &opts),
        Command::CompareSolvers => pipeline::compare(&cfg, &opts),
        Command::LtvVerify => pipeline::ltv_verify(&cfg, &opts),
        Command::DecaySweep => pipeline::decay_sweep(&cfg, &opts),
    }?;
    let dir = cli.output.clone().unwrap_or_else(|| cfg.output.dir.clone());
    write_outcome(&outcome, &dir, &cfg.output.formats)?;
    Ok((outcome, dir, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("cannot configure {jobs} workers: {e}");
        }
    }
    match run(&cli) {
        Ok((outcome, dir, _)) => {
            let status = if outcome.result.passed { "pass" } else { "FAIL" };
            println!("{} {status}: {}", outcome.result.command, dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
