//! `bosonlink` command-line front end.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bosonlink_core::calibrate::{calibrate_heating, Calibration};
use bosonlink_core::device::Scheme;
use bosonlink_core::sweep::{sweep_distance, sweep_power, sweep_pumping, ResultRow};
use bosonlink_core::{Error, ErrorKind, ScenarioConfig};
use clap::{Parser, Subcommand, ValueEnum};

use output::{Format, Metadata};

#[derive(Parser, Debug)]
#[command(
    name = "bosonlink",
    version,
    about = "Heralded entanglement sweeps for bosonic modules"
)]
struct Cli {
    /// JSON scenario file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured Monte Carlo sample count.
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    /// Output file; stdout when omitted. A `<out>.meta.json` sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Raw link figures of merit against pump power for both schemes.
    SweepPower,
    /// Raw link figures of merit against node distance for both register presets.
    SweepDistance,
    /// Entanglement pumping at the configured operating point.
    Pump,
    /// Fits the heating law to the configured calibration targets.
    CalibrateHeating,
    /// Parses and validates the configuration.
    ValidateConfig,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SweepPower => "sweep-power",
            Command::SweepDistance => "sweep-distance",
            Command::Pump => "pump",
            Command::CalibrateHeating => "calibrate-heating",
            Command::ValidateConfig => "validate-config",
        }
    }
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Config => 2,
            ErrorKind::Infeasible => 3,
            ErrorKind::Numerical => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_error(message: String) -> Failure {
    Failure { code: 2, message }
}

fn io_error(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_json(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.mc_samples {
        cfg.mc_samples = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let meta = Metadata::new(cli.command.name(), &cfg, format);
    match cli.command {
        Command::SweepPower => {
            let rows = sweep_power(
                &cfg,
                &cfg.sweep.powers_uw,
                &[Scheme::Conversion, Scheme::Spdc],
            )?;
            emit_rows(cli, &meta, &rows)
        }
        Command::SweepDistance => {
            let rows = sweep_distance(&cfg, &cfg.sweep.distances_km)?;
            emit_rows(cli, &meta, &rows)
        }
        Command::Pump => {
            let rows = sweep_pumping(&cfg, &[cfg.p_laser_uw], cfg.mc_samples, cfg.seed)?;
            emit_rows(cli, &meta, &rows)
        }
        Command::CalibrateHeating => {
            let cal = calibrate_heating(&cfg, &cfg.calibration.targets)?;
            log::info!(
                "calibrated heating: a = {:.4e}, b = {:.4}, worst residual {:.2e}",
                cal.heating.a,
                cal.heating.b,
                cal.residuals.iter().map(|r| r.abs()).fold(0.0, f64::max)
            );
            emit_calibration(cli, &meta, &cfg, &cal)
        }
        Command::ValidateConfig => {
            let body = output::validation_report(&cfg, format).map_err(io_error)?;
            output::write(cli.out.as_deref(), &body).map_err(io_error)?;
            output::write_sidecar(cli.out.as_deref(), &meta).map_err(io_error)
        }
    }
}

fn emit_rows(cli: &Cli, meta: &Metadata, rows: &[ResultRow]) -> Result<(), Failure> {
    if let Some(bad) = rows.iter().find(|r| !output::row_is_finite(r)) {
        return Err(Failure {
            code: 4,
            message: format!("non-finite value in {} row at x = {}", bad.sweep, bad.x),
        });
    }
    let body = output::render_rows(rows, meta).map_err(io_error)?;
    output::write(cli.out.as_deref(), &body).map_err(io_error)?;
    output::write_sidecar(cli.out.as_deref(), meta).map_err(io_error)
}

fn emit_calibration(
    cli: &Cli,
    meta: &Metadata,
    cfg: &ScenarioConfig,
    cal: &Calibration,
) -> Result<(), Failure> {
    let body = output::render_calibration(cfg, cal, meta).map_err(io_error)?;
    output::write(cli.out.as_deref(), &body).map_err(io_error)?;
    output::write_sidecar(cli.out.as_deref(), meta).map_err(io_error)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
