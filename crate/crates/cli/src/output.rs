//! Table rendering and the JSON metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use bosonlink_core::calibrate::Calibration;
use bosonlink_core::sweep::{ResultRow, COLUMNS, SCHEMA_VERSION};
use bosonlink_core::ScenarioConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CALIBRATION_COLUMNS: [&str; 4] = ["p_laser_uw", "target_fidelity", "n_th", "residual"];
pub const PROVENANCE_COLUMNS: [&str; 2] = ["key", "provenance"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub schema_version: u32,
    pub code_version: &'static str,
    pub command: &'static str,
    /// SHA-256 of the resolved configuration (defaults and overrides applied).
    pub config_sha256: String,
    pub seed: u64,
    pub mc_samples: usize,
    pub format: Format,
    pub columns: Vec<&'static str>,
}

impl Metadata {
    pub fn new(command: &'static str, cfg: &ScenarioConfig, format: Format) -> Self {
        let columns = match command {
            "calibrate-heating" => CALIBRATION_COLUMNS.to_vec(),
            "validate-config" => PROVENANCE_COLUMNS.to_vec(),
            _ => COLUMNS.to_vec(),
        };
        Self {
            schema_version: SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256: hex::encode(Sha256::digest(cfg.to_json().as_bytes())),
            seed: cfg.seed,
            mc_samples: cfg.mc_samples,
            format,
            columns,
        }
    }
}

pub fn row_is_finite(r: &ResultRow) -> bool {
    [
        r.x,
        r.p_e,
        r.fidelity,
        r.rate_hz,
        r.log_negativity,
        r.throughput,
        r.p_success,
        r.n_th,
        r.eta_conv,
        r.mc_stderr.unwrap_or(0.0),
    ]
    .iter()
    .all(|v| v.is_finite())
}

fn csv_table<T: Serialize>(columns: &[&str], rows: &[T]) -> std::io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

fn json_doc(value: serde_json::Value) -> std::io::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn render_rows(rows: &[ResultRow], meta: &Metadata) -> std::io::Result<Vec<u8>> {
    match meta.format {
        Format::Csv => csv_table(&COLUMNS, rows),
        Format::Json => json_doc(serde_json::json!({ "metadata": meta, "rows": rows })),
    }
}

#[derive(Serialize)]
struct CalibrationRow {
    p_laser_uw: f64,
    target_fidelity: f64,
    n_th: f64,
    residual: f64,
}

pub fn render_calibration(
    cfg: &ScenarioConfig,
    cal: &Calibration,
    meta: &Metadata,
) -> std::io::Result<Vec<u8>> {
    match meta.format {
        Format::Csv => {
            let rows: Vec<CalibrationRow> = cal
                .targets
                .iter()
                .zip(&cal.occupancies)
                .zip(&cal.residuals)
                .map(|((t, &n_th), &residual)| CalibrationRow {
                    p_laser_uw: t.p_laser_uw,
                    target_fidelity: t.fidelity,
                    n_th,
                    residual,
                })
                .collect();
            csv_table(&CALIBRATION_COLUMNS, &rows)
        }
        Format::Json => {
            let mut calibrated = cfg.clone();
            calibrated.transducer.heating = cal.heating.clone();
            json_doc(serde_json::json!({
                "metadata": meta,
                "calibration": cal,
                "config": calibrated,
            }))
        }
    }
}

pub fn validation_report(cfg: &ScenarioConfig, format: Format) -> std::io::Result<Vec<u8>> {
    let prov = cfg.provenance();
    match format {
        Format::Csv => {
            let rows: Vec<(&str, _)> = prov.into_iter().collect();
            csv_table(&PROVENANCE_COLUMNS, &rows)
        }
        Format::Json => json_doc(serde_json::json!({
            "valid": true,
            "provenance": prov,
            "config": cfg,
        })),
    }
}

pub fn write(out: Option<&Path>, body: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body)?;
            stdout.flush()
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the metadata next to `out`. Nothing is written for stdout output;
/// JSON output embeds the same metadata.
pub fn write_sidecar(out: Option<&Path>, meta: &Metadata) -> std::io::Result<()> {
    let Some(out) = out else {
        return Ok(());
    };
    std::fs::write(sidecar_path(out), json_doc(serde_json::to_value(meta)?)?)
}
