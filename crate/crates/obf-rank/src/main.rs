use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use obf_rank::cli::commands;
use obf_rank::cli::config::Config;
use obf_rank::cli::CliError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Achievable transmission-rank regions for opportunistic beamforming under
/// per-beam QoS outage constraints.
#[derive(Parser)]
#[command(name = "obf-rank", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweeps and Monte-Carlo (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum achievable transmission rank for the configured model.
    MaxRank {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's model.
        #[arg(long)]
        model: Option<String>,
        /// Write CSV here instead of stdout (manifest written alongside).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pareto boundary of the achievable (L1, L2) region.
    Region {
        #[arg(long)]
        config: PathBuf,
        /// L1 grid as START:STOP:STEP.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate analytic outage against the Monte-Carlo simulator.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Per-cell integer ranks, comma separated (e.g. 2,2).
        #[arg(long)]
        ranks: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Test hook: scale the simulator's noise power by this factor.
        #[arg(long, hide = true)]
        corrupt_noise: Option<f64>,
    },
    /// Sweep one parameter and report the maximum achievable rank per value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter to vary: K, snr, D, eta, p, g or alpha.
        #[arg(long)]
        vary: String,
        /// Comma-separated parameter values (snr in dB).
        #[arg(long)]
        values: String,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(config: &Path, model_override: &Option<String>) -> Result<obf_rank::cli::config::Resolved, CliError> {
    let (mut cfg, digest) = Config::from_path(config)?;
    if let Some(model) = model_override {
        cfg.model = model.clone();
    }
    cfg.resolve(digest)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        // a pool may already exist when called twice in-process; that's fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match &cli.command {
        Command::MaxRank { config, model, out } => {
            let r = load(config, model)?;
            commands::cmd_max_rank(&r, out.as_deref())
        }
        Command::Region { config, grid, model, out } => {
            let r = load(config, model)?;
            commands::cmd_region(&r, grid, out.as_deref())
        }
        Command::Validate {
            config,
            ranks,
            trials,
            seed,
            model,
            out,
            corrupt_noise,
        } => {
            let r = load(config, model)?;
            commands::cmd_validate(&r, ranks, *trials, *seed, *corrupt_noise, out.as_deref())
        }
        Command::Sweep {
            config,
            vary,
            values,
            model,
            out,
        } => {
            let r = load(config, model)?;
            commands::cmd_sweep(&r, vary, values, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
