//! Command line, configuration and file output for the AFMTJ
//! co-simulator. The numerical models live in `afmtj-core`.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;

use std::path::PathBuf;

use afmtj_core::dynamics::DeviceKind;
use afmtj_core::experiments::WavePath;
use clap::{Parser, Subcommand, ValueEnum};

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "afmtj",
    version,
    about = "AFMTJ device, circuit and reliability co-simulator"
)]
pub struct Cli {
    /// TOML file layered over the bundled defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one key, e.g. `--set montecarlo.surrogate_trials=100000`.
    /// Repeatable; applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Output directory. Defaults to the config's `output_dir`, then
    /// $AFMTJ_OUT_DIR, then ./afmtj-out.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeviceArg {
    Afmtj,
    Mtj,
}

impl From<DeviceArg> for DeviceKind {
    fn from(d: DeviceArg) -> DeviceKind {
        match d {
            DeviceArg::Afmtj => DeviceKind::Afmtj,
            DeviceArg::Mtj => DeviceKind::Mtj,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Read,
    Write,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One nominal write transient and the read transients of both states.
    Simulate {
        #[arg(long, value_enum, default_value = "afmtj")]
        device: DeviceArg,
    },
    /// Write latency and energy against drive voltage for both devices.
    SweepWrite,
    /// Read latency and energy at the PVT corners, plus the precharge
    /// disturbance window.
    PvtTable,
    /// Variation margins on the four operating-point axes.
    Margins,
    /// Read and write error rates with confidence bounds.
    Montecarlo,
    /// Trial-averaged read or write transient.
    Waveforms {
        #[arg(long, value_enum)]
        path: PathArg,
    },
    /// Fit device constants to the published write latencies.
    Calibrate {
        /// Fit only this device; both when omitted.
        #[arg(long, value_enum)]
        device: Option<DeviceArg>,
    },
}

/// Result of a finished run.
#[derive(Debug)]
pub struct Report {
    pub digest: String,
    pub written: Vec<PathBuf>,
}

/// Load the configuration, run the command and write its artifacts.
pub fn run(cli: &Cli) -> Result<Report> {
    let loaded = config::load(cli.config.as_deref(), &cli.overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(loaded.config.threads)
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    let ctx = commands::Ctx {
        loaded: &loaded,
        pool: &pool,
    };
    let outcome = match &cli.command {
        Command::Simulate { device } => commands::simulate(&ctx, (*device).into())?,
        Command::SweepWrite => commands::sweep(&ctx)?,
        Command::PvtTable => commands::pvt(&ctx)?,
        Command::Margins => commands::margins(&ctx)?,
        Command::Montecarlo => commands::montecarlo(&ctx)?,
        Command::Waveforms { path } => commands::waveforms(
            &ctx,
            match path {
                PathArg::Read => WavePath::Read,
                PathArg::Write => WavePath::Write,
            },
        )?,
        Command::Calibrate { device } => {
            let which: Vec<DeviceKind> = match device {
                Some(d) => vec![(*d).into()],
                None => vec![DeviceKind::Afmtj, DeviceKind::Mtj],
            };
            commands::calibrate(&ctx, &which)?
        }
    };
    let dir = loaded.config.output_dir(cli.out.as_deref());
    let written = outcome.artifacts.write_to(&dir)?;
    Ok(Report {
        digest: format!("{} [{}]", outcome.digest, dir.display()),
        written,
    })
}
