//! Brillouin transducer and SNAIL emission model.
//!
//! A red-detuned pump gives beamsplitter-type phonon–photon conversion: the
//! memory cavity starts in |1⟩ and releases its excitation with probability
//! `P_e`, which is then converted to a flying optical photon. A blue-detuned
//! pump gives two-mode squeezing between an acoustic phonon (later swapped
//! into the memory) and an optical photon.

use serde::{Deserialize, Serialize};

use crate::config::Provenance;
use crate::qstate::channel::{loss_channel, thermal_min_dim, thermal_noise_channel};
use crate::qstate::{Complex64, DensityMatrix, ModeRole, ModeSpace};
use crate::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Untruncated two-mode squeezed vacuum weight allowed above the kept levels.
pub const SPDC_TAIL_TOL: f64 = 1e-3;

/// Largest truncation an emitter mode may be raised to for thermal noise.
pub const MAX_NOISE_DIM: usize = 12;

fn noise_dim(truncation: usize, n_th: f64) -> Result<usize> {
    let need = thermal_min_dim(n_th);
    if need > MAX_NOISE_DIM {
        return Err(Error::Truncation {
            dim: MAX_NOISE_DIM,
            reason: format!("thermal occupancy {n_th:.3} needs {need} levels"),
        });
    }
    Ok(truncation.max(need))
}

/// Emission scheme selected by the pump detuning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Conversion,
    Spdc,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Conversion => "conversion",
            Scheme::Spdc => "spdc",
        }
    }
}

/// Where pump heating deposits its thermal occupancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeatTarget {
    /// The acoustic mode of the transducer. In the conversion scheme the
    /// noise phonons ride along the flying path and are converted with the
    /// signal; in the SPDC scheme they enter the phonon arm that feeds the
    /// memory.
    Acoustic,
    /// Directly on the memory mode, after all arm losses.
    Microwave,
}

/// Pump-heating law n_th(P) = n0 + a·P^b, with P in μW.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatingModel {
    pub n0: f64,
    pub a: f64,
    pub b: f64,
    pub target: HeatTarget,
    pub provenance: Provenance,
}

impl Default for HeatingModel {
    /// Fit to the shipped calibration anchors (see `CalibrationSettings`).
    fn default() -> Self {
        Self {
            n0: 0.0,
            a: 2.097e-4,
            b: 0.4103,
            target: HeatTarget::Acoustic,
            provenance: Provenance::Calibrated,
        }
    }
}

impl HeatingModel {
    /// Constant occupancy, independent of pump power.
    pub fn constant(n: f64, target: HeatTarget) -> Self {
        Self {
            n0: n,
            a: 0.0,
            b: 0.0,
            target,
            provenance: Provenance::Assumption,
        }
    }

    pub fn off() -> Self {
        Self::constant(0.0, HeatTarget::Acoustic)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("heating.n0", self.n0),
            ("heating.a", self.a),
            ("heating.b", self.b),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, v, "[0, inf)"));
            }
        }
        Ok(())
    }

    pub fn thermal_occupancy(&self, p_laser_uw: f64) -> f64 {
        thermal_occupancy(p_laser_uw, self)
    }
}

/// n_th = n0 + a·P^b.
pub fn thermal_occupancy(p_laser_uw: f64, heating: &HeatingModel) -> f64 {
    heating.n0 + heating.a * p_laser_uw.max(0.0).powf(heating.b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransducerParams {
    /// Vacuum phonon–photon cooperativity.
    pub c0: f64,
    pub q_optical_intrinsic: f64,
    pub q_acoustic_intrinsic: f64,
    /// κ_ext/κ_total of the optical mode.
    pub zeta_optical: f64,
    /// κ_ext/κ_total of the acoustic mode.
    pub zeta_acoustic: f64,
    pub eta_udt: f64,
    pub eta_opt: f64,
    /// SNAIL phonon→memory swap efficiency on the SPDC phonon arm.
    pub eta_swap: f64,
    pub pump_wavelength_nm: f64,
    pub acoustic_frequency_ghz: f64,
    pub heating: HeatingModel,
}

impl Default for TransducerParams {
    fn default() -> Self {
        Self {
            c0: 8.8e-8,
            q_optical_intrinsic: 2e6,
            q_acoustic_intrinsic: 2e4,
            zeta_optical: 0.5,
            zeta_acoustic: 0.9,
            eta_udt: 0.6,
            eta_opt: 0.6,
            eta_swap: 0.95,
            pump_wavelength_nm: 1550.0,
            acoustic_frequency_ghz: 5.0,
            heating: HeatingModel::default(),
        }
    }
}

impl TransducerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("transducer.zeta_optical", self.zeta_optical),
            ("transducer.zeta_acoustic", self.zeta_acoustic),
            ("transducer.eta_udt", self.eta_udt),
            ("transducer.eta_opt", self.eta_opt),
            ("transducer.eta_swap", self.eta_swap),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, v, "[0, 1]"));
            }
        }
        if self.zeta_optical >= 1.0 || self.zeta_acoustic >= 1.0 {
            return Err(Error::Config(
                "extraction factors must be below 1 for a finite linewidth".into(),
            ));
        }
        for (name, v) in [
            ("transducer.c0", self.c0),
            ("transducer.q_optical_intrinsic", self.q_optical_intrinsic),
            ("transducer.q_acoustic_intrinsic", self.q_acoustic_intrinsic),
            ("transducer.pump_wavelength_nm", self.pump_wavelength_nm),
            (
                "transducer.acoustic_frequency_ghz",
                self.acoustic_frequency_ghz,
            ),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, v, "(0, inf)"));
            }
        }
        self.heating.validate()
    }

    /// ω_o = 2πc/λ (rad/s).
    pub fn optical_angular_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (self.pump_wavelength_nm * 1e-9)
    }

    /// Total optical linewidth κ_o = ω_o / (Q_int (1 − ζ_o)) (rad/s).
    pub fn optical_linewidth(&self) -> f64 {
        self.optical_angular_frequency() / (self.q_optical_intrinsic * (1.0 - self.zeta_optical))
    }

    /// Total acoustic linewidth κ_m = ω_m / (Q_int (1 − ζ_m)) (rad/s).
    pub fn acoustic_linewidth(&self) -> f64 {
        let omega_m = 2.0 * std::f64::consts::PI * self.acoustic_frequency_ghz * 1e9;
        omega_m / (self.q_acoustic_intrinsic * (1.0 - self.zeta_acoustic))
    }
}

/// Intracavity pump photons for a resonant pump: n = 4ζ_o P / (ħω_o κ_o).
pub fn pump_photon_number(p_laser_uw: f64, p: &TransducerParams) -> f64 {
    let power_w = p_laser_uw * 1e-6;
    4.0 * p.zeta_optical * power_w / (HBAR * p.optical_angular_frequency() * p.optical_linewidth())
}

/// Multiphoton cooperativity C = C0 · n_pump.
pub fn cooperativity(p_laser_uw: f64, p: &TransducerParams) -> f64 {
    p.c0 * pump_photon_number(p_laser_uw, p)
}

/// Triply-resonant conversion efficiency ζ_o ζ_m · 4C/(1+C)².
pub fn conversion_efficiency(p_laser_uw: f64, p: &TransducerParams) -> f64 {
    efficiency_at_cooperativity(cooperativity(p_laser_uw, p), p)
}

pub fn efficiency_at_cooperativity(c: f64, p: &TransducerParams) -> f64 {
    p.zeta_optical * p.zeta_acoustic * 4.0 * c / ((1.0 + c) * (1.0 + c))
}

/// Pump power at which C = 1 (peak conversion efficiency).
pub fn unit_cooperativity_power(p: &TransducerParams) -> f64 {
    1.0 / cooperativity(1.0, p)
}

/// Mode order of an [`EmissionState`].
pub const MEMORY: usize = 0;
pub const FLYING: usize = 1;

/// Joint state of one node's memory mode and its flying optical mode right
/// before the photon enters the fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct EmissionState {
    pub rho: DensityMatrix,
    pub scheme: Scheme,
    pub p_e: f64,
    pub p_laser_uw: f64,
    pub n_th: f64,
}

/// Loss and noise budget of a conversion-scheme emission.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConversionBudget {
    /// UDT efficiency between memory side and acoustic mode.
    pub eta_udt: f64,
    /// Transduction and chip-to-fiber coupling after the acoustic stage.
    pub eta_out: f64,
    pub n_th: f64,
    pub target: HeatTarget,
}

impl ConversionBudget {
    pub fn from_device(p_laser_uw: f64, p: &TransducerParams) -> Self {
        Self {
            eta_udt: p.eta_udt,
            eta_out: conversion_efficiency(p_laser_uw, p) * p.eta_opt,
            n_th: p.heating.thermal_occupancy(p_laser_uw),
            target: p.heating.target,
        }
    }

    /// η_path = η_UDT · η_conv · η_opt.
    pub fn eta_path(&self) -> f64 {
        self.eta_udt * self.eta_out
    }
}

/// Conversion-scheme emission for device parameters at pump power `p_laser_uw`.
pub fn emit_conversion(
    p_e: f64,
    p_laser_uw: f64,
    p: &TransducerParams,
    truncation: usize,
) -> Result<EmissionState> {
    if !(p_laser_uw >= 0.0) {
        return Err(Error::param("p_laser_uw", p_laser_uw, "[0, inf)"));
    }
    let budget = ConversionBudget::from_device(p_laser_uw, p);
    let mut state = emit_conversion_with(p_e, &budget, truncation)?;
    state.p_laser_uw = p_laser_uw;
    Ok(state)
}

/// Conversion-scheme emission for an explicit budget.
///
/// Starts from √(1−P_e)|1⟩_μ|0⟩_w + √P_e|0⟩_μ|1⟩_w. The mode that receives
/// thermal noise has its truncation raised until the noise channel is valid.
pub fn emit_conversion_with(
    p_e: f64,
    budget: &ConversionBudget,
    truncation: usize,
) -> Result<EmissionState> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::param("p_e", p_e, "[0, 1]"));
    }
    let noise_dim = noise_dim(truncation, budget.n_th)?;
    let (mem_dim, fly_dim) = match budget.target {
        HeatTarget::Acoustic => (truncation, noise_dim),
        HeatTarget::Microwave => (noise_dim, truncation),
    };
    let space = ModeSpace::new(
        vec![mem_dim, fly_dim],
        vec![ModeRole::Microwave, ModeRole::Optical],
    )?;
    let mut amps = vec![Complex64::new(0.0, 0.0); space.total_dim()];
    amps[space.index_of(&[1, 0])] = Complex64::new((1.0 - p_e).sqrt(), 0.0);
    amps[space.index_of(&[0, 1])] = Complex64::new(p_e.sqrt(), 0.0);
    let mut rho = DensityMatrix::from_ket(space, &amps)?;
    match budget.target {
        HeatTarget::Acoustic => {
            rho = rho.apply(&loss_channel(budget.eta_udt, fly_dim)?, &[FLYING])?;
            rho = rho.apply(&thermal_noise_channel(budget.n_th, fly_dim)?, &[FLYING])?;
            rho = rho.apply(&loss_channel(budget.eta_out, fly_dim)?, &[FLYING])?;
        }
        HeatTarget::Microwave => {
            rho = rho.apply(&loss_channel(budget.eta_path(), fly_dim)?, &[FLYING])?;
            rho = rho.apply(&thermal_noise_channel(budget.n_th, mem_dim)?, &[MEMORY])?;
        }
    }
    let (rho, _) = rho.normalized()?;
    Ok(EmissionState {
        rho,
        scheme: Scheme::Conversion,
        p_e,
        p_laser_uw: 0.0,
        n_th: budget.n_th,
    })
}

/// Loss and noise budget of an SPDC-scheme emission.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdcBudget {
    /// Pair probability tanh²r.
    pub p_e: f64,
    /// η_UDT · η_swap on the phonon → memory arm.
    pub eta_memory_arm: f64,
    pub eta_optical_arm: f64,
    pub n_th: f64,
    pub target: HeatTarget,
}

/// Largest pair probability representable with `truncation` levels per mode.
pub fn spdc_pair_bound(truncation: usize) -> f64 {
    SPDC_TAIL_TOL.powf(1.0 / truncation as f64)
}

/// Linearised scattering probability P_e = C κ_m t_pulse, capped at the
/// truncation-safety bound.
pub fn spdc_pair_probability(
    p_laser_uw: f64,
    p: &TransducerParams,
    t_pulse_s: f64,
    truncation: usize,
) -> f64 {
    let raw = cooperativity(p_laser_uw, p) * p.acoustic_linewidth() * t_pulse_s;
    let bound = spdc_pair_bound(truncation);
    if raw > bound {
        log::warn!(
            "SPDC pair probability {raw:.3} at {p_laser_uw} μW capped at the truncation bound {bound:.3}"
        );
        bound
    } else {
        raw
    }
}

impl SpdcBudget {
    pub fn from_device(
        p_laser_uw: f64,
        p: &TransducerParams,
        t_pulse_s: f64,
        truncation: usize,
    ) -> Self {
        Self {
            p_e: spdc_pair_probability(p_laser_uw, p, t_pulse_s, truncation),
            eta_memory_arm: p.eta_udt * p.eta_swap,
            eta_optical_arm: p.eta_opt,
            n_th: p.heating.thermal_occupancy(p_laser_uw),
            target: p.heating.target,
        }
    }
}

pub fn emit_spdc(
    p_laser_uw: f64,
    p: &TransducerParams,
    t_pulse_s: f64,
    truncation: usize,
) -> Result<EmissionState> {
    if !(p_laser_uw >= 0.0) {
        return Err(Error::param("p_laser_uw", p_laser_uw, "[0, inf)"));
    }
    let budget = SpdcBudget::from_device(p_laser_uw, p, t_pulse_s, truncation);
    let mut state = emit_spdc_with(&budget, truncation)?;
    state.p_laser_uw = p_laser_uw;
    Ok(state)
}

/// Two-mode squeezed vacuum Σ_n √(1−x) x^{n/2} |n,n⟩ (x = tanh²r = P_e),
/// truncated to `truncation` levels, followed by the arm losses and heating.
pub fn emit_spdc_with(budget: &SpdcBudget, truncation: usize) -> Result<EmissionState> {
    let x = budget.p_e;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::param("p_e", x, "[0, 1)"));
    }
    let tail = x.powi(truncation as i32);
    if tail > SPDC_TAIL_TOL * (1.0 + 1e-12) {
        return Err(Error::Truncation {
            dim: truncation,
            reason: format!("pair probability {x:.3} leaves {tail:.2e} beyond the kept levels"),
        });
    }
    if x >= 0.5 {
        log::warn!("pair probability {x:.3} is deep in the multi-pair regime");
    }
    let mem_dim = noise_dim(truncation, budget.n_th)?;
    let space = ModeSpace::new(
        vec![truncation, truncation],
        vec![ModeRole::Microwave, ModeRole::Optical],
    )?;
    let mut amps = vec![Complex64::new(0.0, 0.0); space.total_dim()];
    for n in 0..truncation {
        amps[space.index_of(&[n, n])] = Complex64::new(((1.0 - x) * x.powi(n as i32)).sqrt(), 0.0);
    }
    let (mut rho, _) = DensityMatrix::from_ket(space, &amps)?.normalized()?;
    if mem_dim > truncation {
        rho = rho.pad_mode(MEMORY, mem_dim)?;
    }
    let arm = loss_channel(budget.eta_memory_arm, mem_dim)?;
    let heat = thermal_noise_channel(budget.n_th, mem_dim)?;
    match budget.target {
        HeatTarget::Acoustic => {
            rho = rho.apply(&heat, &[MEMORY])?;
            rho = rho.apply(&arm, &[MEMORY])?;
        }
        HeatTarget::Microwave => {
            rho = rho.apply(&arm, &[MEMORY])?;
            rho = rho.apply(&heat, &[MEMORY])?;
        }
    }
    rho = rho.apply(
        &loss_channel(budget.eta_optical_arm, truncation)?,
        &[FLYING],
    )?;
    let (rho, _) = rho.normalized()?;
    Ok(EmissionState {
        rho,
        scheme: Scheme::Spdc,
        p_e: x,
        p_laser_uw: 0.0,
        n_th: budget.n_th,
    })
}
