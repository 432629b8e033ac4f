use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evidence_cli::commands::{self, CliError, EXIT_INVALID};
use evidence_cli::THREADS_ENV;

/// Exact solver for the two-period evidence-acquisition model.
///
/// Set EVIDENCE_THREADS to fix the number of worker threads.
#[derive(Parser)]
#[command(name = "evidence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force optimum at one point, compared with the closed form.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Directory for solve.json, outcomes.csv and region.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every applicable closed-form statement at one point, or at
    /// seeded random points when the config gives no point.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also check this mechanism (JSON record or index).
        #[arg(long)]
        mechanism: Option<PathBuf>,
        /// Directory for verify.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a grid of effective costs; writes regions.csv and regions.svg.
    Regions {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; without it the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a mechanism index.
    ShowMech {
        index: String,
        /// Also solve the agent's problem at this point.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve { config, out } => {
            commands::solve(&commands::load_config(Some(&config))?, out.as_deref())
        }
        Command::Verify { config, mechanism, out } => commands::verify(
            &commands::load_config(config.as_deref())?,
            mechanism.as_deref(),
            out.as_deref(),
        ),
        Command::Regions { config, out } => {
            commands::regions(&commands::load_config(Some(&config))?, out.as_deref())
        }
        Command::ShowMech { index, config } => {
            let cfg = config.as_deref().map(|p| commands::load_config(Some(p))).transpose()?;
            commands::show_mech(&index, cfg.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
