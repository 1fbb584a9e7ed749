mod config;
mod error;
mod experiments;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fluxlink::pulse::{compare_pulses, PulseEnvelope};

use error::{CliError, CoreContext};

#[derive(Parser)]
#[command(name = "fluxlink", version, about = "Fluxonium reset and photon-release simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweeps.
        #[arg(long, env = "FLUXLINK_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
        threads: Option<u16>,
    },
    /// RMS difference of two pulse files, relative to the peak of the first.
    ComparePulses {
        a: PathBuf,
        b: PathBuf,
        /// Resample onto a common grid when the grids differ.
        #[arg(long)]
        interp: bool,
    },
}

fn set_threads(n: Option<u16>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = n {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

fn run(config_path: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let config = config::load(config_path)?;
    let resolved = config::resolve(config, config_path, out)?;
    let artifacts = experiments::run(&resolved)?;
    let written = output::write_all(&resolved.output_dir, &resolved, &artifacts)?;
    for name in written {
        println!("{}", resolved.output_dir.join(name).display());
    }
    Ok(())
}

fn read_pulse(path: &Path) -> Result<PulseEnvelope, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    PulseEnvelope::parse_text(&text).map_err(|e| CliError::Config {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn compare(a: &Path, b: &Path, interp: bool) -> Result<(), CliError> {
    let (pa, pb) = (read_pulse(a)?, read_pulse(b)?);
    let rms = compare_pulses(&pa, &pb, interp).ctx("compare")?;
    println!("{rms}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, threads } => {
            set_threads(threads);
            run(&config, out)
        }
        Command::ComparePulses { a, b, interp } => compare(&a, &b, interp),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
