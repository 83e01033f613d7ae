//! Scenario configuration.
//!
//! A scenario is a single JSON object. Every section is optional and falls
//! back to the defaults below; unknown keys anywhere are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::device::{Scheme, TransducerParams};
use crate::herald::LinkParams;
use crate::purify::PumpSchedule;
use crate::register::{MemoryKind, MemoryParams};
use crate::{Error, Result};

/// Where a default value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Published device or link data.
    Published,
    Assumption,
    Calibrated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    pub conversion: usize,
    pub spdc: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            conversion: 3,
            spdc: 4,
        }
    }
}

impl Truncation {
    pub fn for_scheme(&self, scheme: Scheme) -> usize {
        match scheme {
            Scheme::Conversion => self.conversion,
            Scheme::Spdc => self.spdc,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Presets {
    pub cavity: MemoryParams,
    pub transmon: MemoryParams,
}

impl Default for Presets {
    fn default() -> Self {
        Self {
            cavity: MemoryKind::Cavity.preset(),
            transmon: MemoryKind::Transmon.preset(),
        }
    }
}

impl Presets {
    pub fn get(&self, kind: MemoryKind) -> &MemoryParams {
        match kind {
            MemoryKind::Cavity => &self.cavity,
            MemoryKind::Transmon => &self.transmon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub powers_uw: Vec<f64>,
    pub distances_km: Vec<f64>,
    /// Maximize F over P_e at each power (conversion scheme only).
    pub optimize_p_e: bool,
    pub p_e_bounds: [f64; 2],
    pub p_e_tol: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            powers_uw: vec![
                1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0,
            ],
            distances_km: vec![0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0],
            optimize_p_e: true,
            p_e_bounds: [0.01, 0.99],
            p_e_tol: 1e-3,
        }
    }
}

/// One (P_laser, raw fidelity) point the heating model must reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationTarget {
    pub p_laser_uw: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSettings {
    pub targets: Vec<CalibrationTarget>,
    /// Largest accepted |F_model − F_target| at any target.
    pub max_residual: f64,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            targets: vec![
                CalibrationTarget {
                    p_laser_uw: 5.0,
                    fidelity: 0.95,
                },
                CalibrationTarget {
                    p_laser_uw: 200.0,
                    fidelity: 0.9,
                },
            ],
            max_residual: 5e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub transducer: TransducerParams,
    pub link: LinkParams,
    pub memory_a: MemoryParams,
    pub memory_b: MemoryParams,
    pub presets: Presets,
    pub scheme: Scheme,
    /// Release probability (conversion scheme; SPDC derives it from power).
    pub p_e: f64,
    pub p_laser_uw: f64,
    pub pump: PumpSchedule,
    pub truncation: Truncation,
    pub seed: u64,
    pub mc_samples: usize,
    pub sweep: SweepSettings,
    pub calibration: CalibrationSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            transducer: TransducerParams::default(),
            link: LinkParams::default(),
            memory_a: MemoryKind::Cavity.preset(),
            memory_b: MemoryKind::Cavity.preset(),
            presets: Presets::default(),
            scheme: Scheme::Conversion,
            p_e: 0.25,
            p_laser_uw: 5.0,
            pump: PumpSchedule::default(),
            truncation: Truncation::default(),
            seed: 2024,
            mc_samples: 20_000,
            sweep: SweepSettings::default(),
            calibration: CalibrationSettings::default(),
        }
    }
}

fn ascending(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Config(format!(
            "{name} must hold finite non-negative values"
        )));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Parses and validates a JSON scenario.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.transducer.validate()?;
        self.link.validate()?;
        self.memory_a.validate()?;
        self.memory_b.validate()?;
        self.presets.cavity.validate()?;
        self.presets.transmon.validate()?;
        self.pump.validate()?;
        if !(0.0..=1.0).contains(&self.p_e) {
            return Err(Error::param("p_e", self.p_e, "[0, 1]"));
        }
        if !(self.p_laser_uw >= 0.0 && self.p_laser_uw.is_finite()) {
            return Err(Error::param("p_laser_uw", self.p_laser_uw, "[0, inf)"));
        }
        for (name, t) in [
            ("truncation.conversion", self.truncation.conversion),
            ("truncation.spdc", self.truncation.spdc),
        ] {
            if !(2..=8).contains(&t) {
                return Err(Error::Config(format!("{name} = {t} must lie in 2..=8")));
            }
        }
        ascending("sweep.powers_uw", &self.sweep.powers_uw)?;
        ascending("sweep.distances_km", &self.sweep.distances_km)?;
        let [lo, hi] = self.sweep.p_e_bounds;
        if !(0.0 < lo && lo < hi && hi <= 1.0) {
            return Err(Error::Config(format!(
                "sweep.p_e_bounds [{lo}, {hi}] must satisfy 0 < lo < hi ≤ 1"
            )));
        }
        if !(self.sweep.p_e_tol > 0.0 && self.sweep.p_e_tol < hi - lo) {
            return Err(Error::param(
                "sweep.p_e_tol",
                self.sweep.p_e_tol,
                "(0, hi − lo)",
            ));
        }
        if self.mc_samples < crate::purify::MIN_MC_SAMPLES {
            return Err(Error::Config(format!(
                "mc_samples = {} is below the minimum of {}",
                self.mc_samples,
                crate::purify::MIN_MC_SAMPLES
            )));
        }
        if !(self.calibration.max_residual > 0.0) {
            return Err(Error::param(
                "calibration.max_residual",
                self.calibration.max_residual,
                "(0, inf)",
            ));
        }
        Ok(())
    }

    pub fn truncation(&self) -> usize {
        self.truncation.for_scheme(self.scheme)
    }

    /// Origin of every default value, keyed by its JSON path.
    pub fn provenance(&self) -> BTreeMap<&'static str, Provenance> {
        use Provenance::*;
        let mut m = BTreeMap::from([
            ("transducer.c0", Published),
            ("transducer.q_optical_intrinsic", Published),
            ("transducer.q_acoustic_intrinsic", Published),
            ("transducer.zeta_optical", Published),
            ("transducer.zeta_acoustic", Published),
            ("transducer.eta_udt", Published),
            ("transducer.eta_opt", Published),
            ("transducer.eta_swap", Assumption),
            ("transducer.pump_wavelength_nm", Assumption),
            ("transducer.acoustic_frequency_ghz", Assumption),
            ("link.distance_km", Published),
            ("link.fiber_loss_db_per_km", Published),
            ("link.eta_qe", Published),
            ("link.geometry", Assumption),
            ("link.fiber_velocity_m_s", Assumption),
            ("link.t_pulse_us", Assumption),
            ("link.duty_cycle", Published),
            ("link.phase_offset", Assumption),
            ("memory_a", Assumption),
            ("memory_b", Assumption),
            ("presets.cavity", Assumption),
            ("presets.transmon", Assumption),
            ("p_e", Published),
            ("p_laser_uw", Published),
            ("pump.t_local_us", Assumption),
            ("truncation", Assumption),
        ]);
        let heat = self.transducer.heating.provenance;
        m.insert("transducer.heating.n0", Published);
        m.insert("transducer.heating.a", heat);
        m.insert("transducer.heating.b", heat);
        m.insert("transducer.heating.target", Assumption);
        m
    }
}
