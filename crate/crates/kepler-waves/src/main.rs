//! Thin command-line front end: `solve`, `verify`, and `front`, each
//! driven by an INI config file. See the crate documentation and the
//! `examples/` directory for the library API.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kepler_waves::cli::{exit_code, run_front, run_solve, run_verify};
use kepler_waves::config::RunConfig;
use kepler_waves::error::Error;

#[derive(Parser)]
#[command(
    name = "kepler-waves",
    about = "Traveling-wave solutions of the two-body companion wave equations: \
             construct, verify, and export wave fronts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Parser)]
struct CommonArgs {
    /// Run configuration (INI-style key-value file).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the config's output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps, overriding the config's output.seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the configured solution and write solution.json.
    Solve(CommonArgs),
    /// Run the configured verification checks and write report files.
    Verify(CommonArgs),
    /// Export front surfaces, one JSON header + CSV vertex list per time.
    Front(CommonArgs),
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, Error> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("WAVE_NUM_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(command: &Command) -> Result<(), Error> {
    match command {
        Command::Solve(args) => {
            let config = load_config(args)?;
            let outcome = run_solve(&config)?;
            print!("{}", outcome.summary);
            Ok(())
        }
        Command::Verify(args) => {
            let config = load_config(args)?;
            let outcome = run_verify(&config)?;
            print!("{}", outcome.summary());
            let failures = outcome.failures();
            if failures.is_empty() {
                Ok(())
            } else {
                let names: Vec<String> = failures
                    .iter()
                    .map(|f| format!("{} ({})", f.check.name(), f.report_path.display()))
                    .collect();
                Err(Error::VerificationFailed(names.join(", ")))
            }
        }
        Command::Front(args) => {
            let config = load_config(args)?;
            let outcome = run_front(&config)?;
            print!("{}", outcome.summary);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
