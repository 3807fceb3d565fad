use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use ldpc_bounds::bounds::SeriesControl;
use ldpc_bounds::channels::Family;
use ldpc_bounds::quad::QuadratureConfig;
use ldpc_bounds::solver::{BoundKind, DEFAULT_TOL};

mod commands;
mod table;

use commands::Settings;
use table::Format;

/// Rate, bit-error and parity-check density bounds for LDPC ensembles.
#[derive(Debug, Parser)]
#[command(name = "ldpc-bounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    /// Half-width allowed for the certified series enclosure.
    #[arg(long, global = true)]
    tail_tol: Option<f64>,

    /// Absolute tolerance for LLR integrals.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,

    /// Tolerance on the channel parameter when solving for thresholds.
    #[arg(long, global = true)]
    solver_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every bound for one channel and ensemble.
    Bound {
        /// Channel, e.g. `biawgn:0.978`, `bsc:0.11`, `bec:0.4`.
        #[arg(long)]
        channel: String,
        #[arg(long)]
        ensemble: PathBuf,
        /// Code rate for the entropy and bit-error bounds [default: design rate].
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Solve for the channel parameter at which a bound meets the design rate.
    Threshold {
        #[arg(long, default_value = "biawgn")]
        family: Family,
        #[arg(long)]
        ensemble: PathBuf,
        /// unquantized, two_level or punctured [default: punctured when the
        /// ensemble has a pattern, else unquantized].
        #[arg(long)]
        kind: Option<BoundKind>,
        /// Iterative-decoding threshold (dB) for the fractional gap.
        #[arg(long, value_delimiter = ',')]
        it_db: Vec<f64>,
    },
    /// Threshold table over several ensembles (BIAWGN).
    Table {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        ensembles: Vec<PathBuf>,
        /// Iterative-decoding thresholds (dB), one per ensemble.
        #[arg(long, value_delimiter = ',')]
        it_db: Vec<f64>,
    },
    /// Lower bounds on the average check degree and parity-check density.
    Density {
        #[arg(long)]
        channel: String,
        /// Multiplicative gaps to capacity, each in (0, 1).
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        gaps: Vec<f64>,
    },
}

fn positive(flag: &str, v: Option<f64>, default: f64) -> Result<f64> {
    match v {
        None => Ok(default),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => bail!("{flag}: must be positive, got {x}"),
    }
}

fn settings(cli: &Cli) -> Result<Settings> {
    let series = SeriesControl::default();
    let quad = QuadratureConfig::default();
    Ok(Settings {
        series: SeriesControl {
            tail_tol: positive("--tail-tol", cli.tail_tol, series.tail_tol)?,
            ..series
        },
        quad: QuadratureConfig {
            abs_tol: positive("--quad-tol", cli.quad_tol, quad.abs_tol)?,
            ..quad
        },
        solver_tol: positive("--solver-tol", cli.solver_tol, DEFAULT_TOL)?,
    })
}

fn run(cli: &Cli) -> Result<()> {
    let s = settings(cli)?;
    let table = match &cli.command {
        Command::Bound {
            channel,
            ensemble,
            rate,
        } => commands::bound(&s, channel, ensemble, *rate)?,
        Command::Threshold {
            family,
            ensemble,
            kind,
            it_db,
        } => {
            if it_db.len() > 1 {
                bail!(
                    "--it-db: threshold takes a single value, got {}",
                    it_db.len()
                );
            }
            commands::threshold_cmd(&s, *family, ensemble, *kind, it_db.first().copied())?
        }
        Command::Table { ensembles, it_db } => commands::table(&s, ensembles, it_db)?,
        Command::Density { channel, gaps } => commands::density(&s, channel, gaps)?,
    };
    let mut out = io::stdout().lock();
    table.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
