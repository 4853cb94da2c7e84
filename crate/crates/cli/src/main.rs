//! Batch front-end for distributed tomographic radar imaging.
//!
//! Exit codes: 0 on success, 2 when an iterative algorithm stopped at its
//! iteration cap without meeting the tolerance (outputs are still
//! written), 1 on any error.

mod commands;
mod metrics;
mod pgm;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{Algo, RunManifest};

#[derive(Parser)]
#[command(
    name = "rtomo",
    version,
    about = "Simulate, image, and compare widely-distributed radar scenes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a JSON scene into a measurement dataset.
    Simulate {
        /// Scene description file.
        #[arg(long)]
        spec: PathBuf,
        /// Output dataset path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Image a dataset and write magnitude.rimg, magnitude.pgm, report.log.
    Image {
        /// Input dataset.
        #[arg(long)]
        data: PathBuf,
        /// Imaging algorithm.
        #[arg(long, value_enum)]
        algo: Algo,
        /// Data-fidelity weight.
        #[arg(long, default_value_t = 100.0)]
        mu: f64,
        /// Consensus penalty (cadmm only).
        #[arg(long, default_value_t = 50.0)]
        beta: f64,
        /// Residual tolerance (for jsc: inner objective tolerance).
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Iteration cap (for jsc: inner iteration cap).
        #[arg(long, default_value_t = 100)]
        tmax: usize,
        /// Reconstruction grid <nx>x<ny>:<xmin>,<xmax>,<ymin>,<ymax>;
        /// defaults to the grid embedded in the dataset.
        #[arg(long)]
        grid: Option<String>,
        /// Graymap display floor in dB (must be negative).
        #[arg(long = "floor-db", default_value_t = -35.0, allow_hyphen_values = true)]
        floor_db: f64,
        /// Output directory.
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Worker threads (default: one per logical CPU).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare two images against the true scene; prints JSON metrics.
    Compare {
        /// First image (the candidate under scrutiny).
        #[arg(long)]
        a: PathBuf,
        /// Second image (the baseline).
        #[arg(long)]
        b: PathBuf,
        /// Scene file with the true scatterer positions.
        #[arg(long)]
        truth: PathBuf,
        /// Signal disc radius around each true position, in metres
        /// (default: three pixel pitches).
        #[arg(long = "radius-m")]
        radius_m: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are not failures; everything else is exit
            // code 1 (2 is reserved for non-convergence).
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Simulate { spec, out } => {
            commands::cmd_simulate(&spec, &out)?;
            Ok(true)
        }
        Command::Image {
            data,
            algo,
            mu,
            beta,
            eps,
            tmax,
            grid,
            floor_db,
            out_dir,
            threads,
        } => {
            let grid = grid.as_deref().map(commands::parse_grid).transpose()?;
            let manifest = RunManifest {
                data,
                algo,
                mu,
                beta,
                eps,
                t_max: tmax,
                grid,
                floor_db,
                out_dir,
                threads,
            };
            commands::cmd_image(&manifest)
        }
        Command::Compare {
            a,
            b,
            truth,
            radius_m,
        } => {
            commands::cmd_compare(&a, &b, &truth, radius_m)?;
            Ok(true)
        }
    }
}
