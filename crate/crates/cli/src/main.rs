//! `phaseless`: synthesize intensity data, recover the projected array
//! response, migrate, and run the reference experiments.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Experiment, Globals, SimulateArgs};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "phaseless", version, about = "Intensity-only Kirchhoff imaging")]
struct Cli {
    /// Scene document (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    scene: Option<PathBuf>,

    /// Output directory; created if missing.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for every random draw. Required by stochastic commands.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize intensity data and its illumination record.
    Simulate {
        /// Gaussian-process source: write power-spectrum data.
        #[arg(long)]
        stochastic: bool,
        /// Receiver noise power as a fraction of signal power.
        #[arg(long, value_name = "F")]
        noise_fraction: Option<f64>,
        /// Source correlation time in seconds (default: fitted to the band).
        #[arg(long, value_name = "SECONDS")]
        correlation_time: Option<f64>,
        /// Also write the true array response.
        #[arg(long)]
        with_response: bool,
    },
    /// Recover the projected array response from intensity data.
    Recover {
        /// Directory holding intensity.csv and illumination.csv.
        #[arg(long, value_name = "DIR")]
        data: PathBuf,
    },
    /// Migrate per-frequency fields into an image.
    Migrate {
        /// Field file (freq_index,omega_rad_s,receiver_index,re,im).
        #[arg(long, value_name = "PATH")]
        field: PathBuf,
        /// Second field file to compare against.
        #[arg(long, value_name = "PATH")]
        reference: Option<PathBuf>,
    },
    /// Run one of the built-in experiments end to end.
    Experiment {
        #[arg(value_enum)]
        case: Experiment,
    },
    /// Condition numbers of the measurement matrix over the scene band.
    Condition,
    /// Check whether the source avoids every receiver's cone toward the window.
    CheckGeometry,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("`--threads` must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let g = Globals {
        scene: cli.scene,
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
    };
    let manifest = match cli.command {
        Command::Simulate {
            stochastic,
            noise_fraction,
            correlation_time,
            with_response,
        } => Some(commands::simulate(
            &g,
            &SimulateArgs {
                stochastic,
                noise_fraction,
                correlation_time,
                with_response,
            },
        )?),
        Command::Recover { data } => Some(commands::recover(&g, &data)?),
        Command::Migrate { field, reference } => Some(commands::migrate(&g, &field, reference.as_deref())?),
        Command::Experiment { case } => Some(commands::experiment(&g, case)?),
        Command::Condition => Some(commands::condition(&g)?),
        Command::CheckGeometry => commands::check_geometry(&g)?,
    };
    if let Some(path) = manifest {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
