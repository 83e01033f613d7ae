//! Fiber link and single-click heralding.

use serde::{Deserialize, Serialize};

use crate::device::{EmissionState, FLYING};
use crate::qstate::channel::{beamsplitter, loss_channel, parity, phase_shift, projector};
use crate::qstate::{log_negativity, DensityMatrix};
use crate::{Error, Result};

/// Where the interfering beamsplitter and detectors sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Station halfway between the nodes; each photon travels L/2.
    Midpoint,
    /// Station at node B; A's photon travels the full L.
    OneSided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkParams {
    pub distance_km: f64,
    pub fiber_loss_db_per_km: f64,
    pub eta_qe: f64,
    pub geometry: Geometry,
    pub fiber_velocity_m_s: f64,
    pub t_pulse_us: f64,
    /// Fraction of each attempt cycle the pump is on.
    pub duty_cycle: f64,
    /// Interferometric phase of B's photon relative to A's (rad).
    pub phase_offset: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            distance_km: 1.0,
            fiber_loss_db_per_km: 0.2,
            eta_qe: 0.9,
            geometry: Geometry::Midpoint,
            fiber_velocity_m_s: 2.0e8,
            t_pulse_us: 1.0,
            duty_cycle: 0.5,
            phase_offset: 0.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_km >= 0.0 && self.distance_km.is_finite()) {
            return Err(Error::param(
                "link.distance_km",
                self.distance_km,
                "[0, inf)",
            ));
        }
        if !(self.fiber_loss_db_per_km >= 0.0 && self.fiber_loss_db_per_km.is_finite()) {
            return Err(Error::param(
                "link.fiber_loss_db_per_km",
                self.fiber_loss_db_per_km,
                "[0, inf)",
            ));
        }
        if !(0.0..=1.0).contains(&self.eta_qe) {
            return Err(Error::param("link.eta_qe", self.eta_qe, "[0, 1]"));
        }
        if !(self.fiber_velocity_m_s > 0.0 && self.fiber_velocity_m_s.is_finite()) {
            return Err(Error::param(
                "link.fiber_velocity_m_s",
                self.fiber_velocity_m_s,
                "(0, inf)",
            ));
        }
        if !(self.t_pulse_us > 0.0 && self.t_pulse_us.is_finite()) {
            return Err(Error::param("link.t_pulse_us", self.t_pulse_us, "(0, inf)"));
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle <= 1.0) {
            return Err(Error::param("link.duty_cycle", self.duty_cycle, "(0, 1]"));
        }
        if !self.phase_offset.is_finite() {
            return Err(Error::param(
                "link.phase_offset",
                self.phase_offset,
                "finite",
            ));
        }
        Ok(())
    }

    pub fn with_distance(&self, distance_km: f64) -> Self {
        Self {
            distance_km,
            ..self.clone()
        }
    }

    pub fn t_pulse_s(&self) -> f64 {
        self.t_pulse_us * 1e-6
    }
}

/// Fiber transmission of the (A, B) arms.
pub fn fiber_transmission(link: &LinkParams) -> [f64; 2] {
    let arm = |km: f64| 10f64.powf(-link.fiber_loss_db_per_km * km / 10.0);
    match link.geometry {
        Geometry::Midpoint => {
            let t = arm(link.distance_km / 2.0);
            [t, t]
        }
        Geometry::OneSided => [arm(link.distance_km), 1.0],
    }
}

/// Photon flight to the station plus classical confirmation back (s).
pub fn herald_latency(link: &LinkParams) -> f64 {
    let path_m = match link.geometry {
        Geometry::Midpoint => link.distance_km * 1e3,
        Geometry::OneSided => 2.0 * link.distance_km * 1e3,
    };
    path_m / link.fiber_velocity_m_s
}

/// t_cycle = max(t_pulse / duty, t_herald) (s).
pub fn attempt_cycle_time(link: &LinkParams) -> f64 {
    (link.t_pulse_s() / link.duty_cycle).max(herald_latency(link))
}

/// Heralded pairs per second.
pub fn rate(p_success: f64, link: &LinkParams) -> f64 {
    p_success / attempt_cycle_time(link)
}

/// Θ = R · E_N.
pub fn throughput(rate_hz: f64, rho_ab: &DensityMatrix) -> Result<f64> {
    Ok(rate_hz * log_negativity(rho_ab, &[0])?)
}

/// Photodetector response model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Detector {
    /// Clicks on one or more photons.
    #[default]
    Threshold,
    /// Resolves photon number; only a single photon is accepted.
    NumberResolving,
}

/// Which single-click patterns contributed to the heralded state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    D1,
    D2,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeraldOutcome {
    /// Normalized state of (memory A, memory B); `None` if no herald can occur.
    pub rho_ab: Option<DensityMatrix>,
    pub p_success: f64,
    pub p_d1: f64,
    pub p_d2: f64,
    pub pattern: Pattern,
}

impl HeraldOutcome {
    pub fn fidelity(&self) -> Result<f64> {
        match &self.rho_ab {
            Some(rho) => crate::qstate::fidelity_psi_minus(rho),
            None => Ok(0.0),
        }
    }

    pub fn log_negativity(&self) -> Result<f64> {
        match &self.rho_ab {
            Some(rho) => log_negativity(rho, &[0]),
            None => Ok(0.0),
        }
    }

    pub fn state(&self) -> Result<&DensityMatrix> {
        self.rho_ab
            .as_ref()
            .ok_or_else(|| Error::Tolerance("no heralding event is possible".into()))
    }
}

/// Single-click heralding with threshold detectors.
pub fn herald(a: &EmissionState, b: &EmissionState, link: &LinkParams) -> Result<HeraldOutcome> {
    herald_with(a, b, link, Detector::Threshold)
}

/// Single-click heralding of the states emitted by nodes A and B.
///
/// Both photons are attenuated by their fiber arm and the detector
/// efficiency, interfered on a balanced beamsplitter and post-selected on
/// exactly one detector firing. A D2 click is mapped onto the same |ψ⁻⟩
/// target as D1 by a π frame correction on memory A.
pub fn herald_with(
    a: &EmissionState,
    b: &EmissionState,
    link: &LinkParams,
    detector: Detector,
) -> Result<HeraldOutcome> {
    link.validate()?;
    let (dims_a, dims_b) = (a.rho.space().dims(), b.rho.space().dims());
    if dims_a != dims_b {
        return Err(Error::DimensionMismatch {
            expected: a.rho.dim(),
            found: b.rho.dim(),
        });
    }
    let fly = dims_a[FLYING];
    // Total photon number on the flying pair stays below 2·fly − 1.
    let padded = 2 * fly - 1;
    let [ta, tb] = fiber_transmission(link);
    let arm = |state: &EmissionState, t: f64| -> Result<DensityMatrix> {
        state
            .rho
            .apply(&loss_channel(t * link.eta_qe, fly)?, &[FLYING])?
            .pad_mode(FLYING, padded)
    };
    let rho_a = arm(a, ta)?;
    let mut rho_b = arm(b, tb)?;
    if link.phase_offset != 0.0 {
        rho_b = rho_b.apply_unitary(&phase_shift(link.phase_offset, padded), &[FLYING])?;
    }
    // (μA, wA, μB, wB)
    let joint = rho_a
        .tensor(&rho_b)?
        .apply_unitary(&beamsplitter(padded), &[1, 3])?;

    let hit = |n: usize| match detector {
        Detector::Threshold => n >= 1,
        Detector::NumberResolving => n == 1,
    };
    let d1 = projector(vec![padded, padded], |l| hit(l[0]) && l[1] == 0)?;
    let d2 = projector(vec![padded, padded], |l| l[0] == 0 && hit(l[1]))?;
    let kept_d1 = joint.apply(&d1, &[1, 3])?.partial_trace(&[0, 2])?;
    let kept_d2 = joint
        .apply(&d2, &[1, 3])?
        .partial_trace(&[0, 2])?
        .apply_unitary(&parity(dims_a[0]), &[0])?;
    let (p_d1, p_d2) = (kept_d1.trace(), kept_d2.trace());
    let p_success = (p_d1 + p_d2).clamp(0.0, 1.0);
    let rho_ab = if p_success > 0.0 {
        let (rho, _) = kept_d1.add(&kept_d2)?.normalized()?;
        Some(rho.sanitized()?)
    } else {
        None
    };
    Ok(HeraldOutcome {
        rho_ab,
        p_success,
        p_d1,
        p_d2,
        pattern: Pattern::Both,
    })
}
