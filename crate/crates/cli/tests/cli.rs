use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bosonlink_core::sweep::{COLUMNS, SCHEMA_VERSION};
use serde_json::Value;
use tempfile::TempDir;

fn bosonlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosonlink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &TempDir, extra: &str) -> PathBuf {
    let path = dir.path().join("scenario.json");
    let text = format!(
        r#"{{
            "sweep": {{ "powers_uw": [5.0, 50.0], "distances_km": [0.5, 2.0] }},
            "pump": {{ "rounds": 1 }},
            "mc_samples": 200{extra}
        }}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn sidecar(out: &Path) -> Value {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    serde_json::from_str(&std::fs::read_to_string(PathBuf::from(name)).unwrap()).unwrap()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap()).collect();
    (header, rows)
}

#[test]
fn default_config_validates() {
    let out = bosonlink(&["validate-config"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,provenance\n"));
    assert!(text.contains("transducer.heating.a,calibrated"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let typo = dir.path().join("typo.json");
    std::fs::write(&typo, r#"{"link": {"distnace_km": 3.0}}"#).unwrap();
    let typo = typo.to_str().unwrap();
    assert_eq!(
        bosonlink(&["validate-config", "--config", typo])
            .status
            .code(),
        Some(2)
    );

    let missing = dir.path().join("absent.json");
    let missing = missing.to_str().unwrap();
    assert_eq!(
        bosonlink(&["sweep-power", "--config", missing])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        bosonlink(&["pump", "--mc-samples", "10"]).status.code(),
        Some(2)
    );

    let range = dir.path().join("range.json");
    std::fs::write(&range, r#"{"p_e": 1.5}"#).unwrap();
    let range = range.to_str().unwrap();
    let out = bosonlink(&["validate-config", "--config", range]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("p_e"));
}

#[test]
fn power_sweep_csv_matches_schema() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir, "");
    let out = dir.path().join("power.csv");
    let status = bosonlink(&[
        "sweep-power",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let (header, rows) = read_rows(&out);
    assert_eq!(header, COLUMNS);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert_eq!(&row[0], "power");
        assert!(["conversion", "spdc"].contains(&&row[2]));
        for col in [
            "x",
            "p_e",
            "fidelity",
            "rate_hz",
            "log_negativity",
            "throughput",
            "p_success",
        ] {
            let i = COLUMNS.iter().position(|c| *c == col).unwrap();
            let v: f64 = row[i].parse().unwrap();
            assert!(v.is_finite());
        }
        assert_eq!(&row[14], "");
    }
    let meta = sidecar(&out);
    assert_eq!(meta["schema_version"], SCHEMA_VERSION);
    assert_eq!(meta["command"], "sweep-power");
    assert_eq!(meta["code_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(meta["columns"].as_array().unwrap().len(), COLUMNS.len());
}

#[test]
fn pump_output_is_reproducible_from_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir, "");
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let status = bosonlink(&[
            "pump",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            status.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        out
    };
    let a = run("a.csv", "5");
    let b = run("b.csv", "5");
    let c = run("c.csv", "6");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    let (_, rows) = read_rows(&a);
    // Analytic then Monte Carlo, rounds 0 and 1 each.
    let methods: Vec<&str> = rows.iter().map(|r| r.get(4).unwrap()).collect();
    assert_eq!(
        methods,
        ["analytic", "analytic", "monte-carlo", "monte-carlo"]
    );
    let (meta_a, meta_c) = (sidecar(&a), sidecar(&c));
    assert_eq!(meta_a["seed"], 5);
    assert_eq!(meta_a["mc_samples"], 200);
    assert_ne!(meta_a["config_sha256"], meta_c["config_sha256"]);
}

#[test]
fn json_output_embeds_metadata() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir, "");
    let out = bosonlink(&[
        "sweep-distance",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["format"], "json");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["memory"], "cavity");
    assert_eq!(rows[1]["memory"], "transmon");
}

#[test]
fn rising_calibration_targets_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(
        &dir,
        r#", "calibration": { "targets": [
            { "p_laser_uw": 5.0, "fidelity": 0.9 },
            { "p_laser_uw": 200.0, "fidelity": 0.95 }
        ] }"#,
    );
    let out = bosonlink(&["calibrate-heating", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn untruncatable_noise_exits_with_four() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(
        &dir,
        r#", "transducer": { "heating": { "n0": 5.0, "a": 0.0, "b": 1.0,
            "target": "acoustic", "provenance": "assumption" } }"#,
    );
    let out = bosonlink(&["sweep-distance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let out = bosonlink(&["validate-config", "--config", path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 2);
}
