use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{ExperimentConfig, Overrides};
use error::CliError;

#[derive(Parser)]
#[command(name = "psroth", version, about = "Experiments on Piatetski-Shapiro-type primes and 3-term progressions")]
struct Cli {
    /// TOML config file; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Use h(x) = x^{1/gamma}
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Enumerate primes floor(h(n)) <= N and their density
    Psgen,
    /// Sup over a frequency grid of the weighted-minus-plain prime exponential sum
    Errsweep,
    /// Vaughan decomposition of sum Lambda(k) e(xi k + m phi(k)) over (P, 2P]
    Vaughan,
    /// L^r ratios for random unimodular coefficients on the primes floor(h(n))
    Restrict,
    /// Transference to Z_N, 3AP counting and Varnavides counting
    Roth,
    /// Run the exact invariant suite; exit 0 only if every check passes
    Check,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let flags = Overrides {
        seed: cli.seed,
        threads: cli.threads,
        out_dir: cli.out_dir.clone(),
        gamma: cli.gamma,
        n: cli.n,
        grid: cli.grid,
    };
    let cfg = ExperimentConfig::resolve(cli.config.as_deref(), &flags)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set up {t} threads: {e}")))?;
    }
    match cli.command {
        Command::Psgen => commands::psgen(&cfg),
        Command::Errsweep => commands::errsweep(&cfg),
        Command::Vaughan => commands::vaughan(&cfg),
        Command::Restrict => commands::restrict(&cfg),
        Command::Roth => commands::roth(&cfg),
        Command::Check => commands::check(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are config errors under the exit-code contract
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psroth: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
