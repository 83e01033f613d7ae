//! Fitting the pump-heating law n_th(P) = n0 + a·P^b to (power, fidelity)
//! targets.
//!
//! Each target is first inverted to the constant occupancy that reproduces
//! its fidelity at that power. (a, b) then follow from a relative weighted
//! least-squares fit over a grid in b refined by golden-section search, and
//! the fitted law is checked against the full pipeline.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CalibrationTarget, Provenance, ScenarioConfig};
use crate::device::HeatingModel;
use crate::sweep::{fidelity_at_occupancy, golden_max, operating_point, Registers};
use crate::{Error, Result};

/// Largest occupancy considered when inverting a target.
pub const MAX_OCCUPANCY: f64 = 0.2;
const B_MAX: f64 = 4.0;
const B_STEP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub heating: HeatingModel,
    /// Sorted targets with their inverted occupancies.
    pub targets: Vec<CalibrationTarget>,
    pub occupancies: Vec<f64>,
    /// F_model − F_target under the fitted law.
    pub residuals: Vec<f64>,
}

/// Constant occupancy reproducing `target` at its power.
pub fn invert_target(cfg: &ScenarioConfig, target: &CalibrationTarget) -> Result<f64> {
    let f = |n: f64| fidelity_at_occupancy(cfg, target.p_laser_uw, n);
    let (mut lo, mut hi) = (0.0, MAX_OCCUPANCY);
    let f_lo = f(lo)?;
    if target.fidelity > f_lo {
        return Err(Error::Infeasible(format!(
            "F = {} at {} μW exceeds the noise-free value {f_lo:.4}",
            target.fidelity, target.p_laser_uw
        )));
    }
    let f_hi = f(hi)?;
    if target.fidelity < f_hi {
        return Err(Error::Infeasible(format!(
            "F = {} at {} μW needs more than {MAX_OCCUPANCY} thermal quanta",
            target.fidelity, target.p_laser_uw
        )));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > target.fidelity {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn fit_a(powers: &[f64], y: &[f64], b: f64) -> (f64, f64) {
    let w: Vec<f64> = y.iter().map(|v| 1.0 / (v + 1e-6).powi(2)).collect();
    let x: Vec<f64> = powers.iter().map(|p| p.powf(b)).collect();
    let sxy: f64 = (0..x.len()).map(|i| w[i] * x[i] * y[i]).sum();
    let sxx: f64 = (0..x.len()).map(|i| w[i] * x[i] * x[i]).sum();
    let a = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    let loss = (0..x.len()).map(|i| w[i] * (y[i] - a * x[i]).powi(2)).sum();
    (a, loss)
}

/// Weighted least-squares (a, b) for excess occupancies `y` at `powers`.
pub fn fit_power_law(powers: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if y.iter().all(|&v| v.abs() < 1e-12) {
        return Ok((0.0, 1.0));
    }
    let steps = (B_MAX / B_STEP).round() as usize;
    let (mut best_b, mut best_loss) = (0.0, f64::INFINITY);
    for k in 0..=steps {
        let b = k as f64 * B_STEP;
        let (_, loss) = fit_a(powers, y, b);
        if loss < best_loss {
            best_b = b;
            best_loss = loss;
        }
    }
    let lo = (best_b - B_STEP).max(0.0);
    let hi = (best_b + B_STEP).min(B_MAX);
    let (b, _) = golden_max(|b| Ok(-fit_a(powers, y, b).1), lo, hi, 1e-9)?;
    let b = if fit_a(powers, y, b).1 <= best_loss {
        b
    } else {
        best_b
    };
    Ok((fit_a(powers, y, b).0, b))
}

pub fn calibrate_heating(
    cfg: &ScenarioConfig,
    targets: &[CalibrationTarget],
) -> Result<Calibration> {
    cfg.validate()?;
    if targets.len() < 2 {
        return Err(Error::Config(format!(
            "calibration needs at least two targets, got {}",
            targets.len()
        )));
    }
    let mut sorted = targets.to_vec();
    sorted.sort_by(|a, b| a.p_laser_uw.total_cmp(&b.p_laser_uw));
    for t in &sorted {
        if !(t.p_laser_uw > 0.0 && t.p_laser_uw.is_finite()) {
            return Err(Error::param("target.p_laser_uw", t.p_laser_uw, "(0, inf)"));
        }
        if !(0.0..=1.0).contains(&t.fidelity) {
            return Err(Error::param("target.fidelity", t.fidelity, "[0, 1]"));
        }
    }
    if sorted
        .windows(2)
        .any(|w| w[0].p_laser_uw == w[1].p_laser_uw)
    {
        return Err(Error::Config(
            "calibration targets repeat a pump power".into(),
        ));
    }
    let occupancies = sorted
        .par_iter()
        .map(|t| invert_target(cfg, t))
        .collect::<Result<Vec<_>>>()?;
    if occupancies.windows(2).any(|w| w[1] < w[0] - 1e-9) {
        return Err(Error::Infeasible(
            "targets need an occupancy that falls with pump power".into(),
        ));
    }
    let n0 = cfg.transducer.heating.n0;
    let excess: Vec<f64> = occupancies.iter().map(|n| n - n0).collect();
    if excess.iter().any(|&y| y < -1e-9) {
        return Err(Error::Infeasible(format!(
            "a target needs less than the baseline occupancy n0 = {n0}"
        )));
    }
    let excess: Vec<f64> = excess.iter().map(|y| y.max(0.0)).collect();
    let powers: Vec<f64> = sorted.iter().map(|t| t.p_laser_uw).collect();
    let (a, b) = fit_power_law(&powers, &excess)?;
    let heating = HeatingModel {
        n0,
        a,
        b,
        target: cfg.transducer.heating.target,
        provenance: Provenance::Calibrated,
    };
    let mut fitted = cfg.clone();
    fitted.transducer.heating = heating.clone();
    let residuals = sorted
        .par_iter()
        .map(|t| {
            let point = operating_point(
                &fitted,
                fitted.scheme,
                t.p_laser_uw,
                &fitted.link,
                &Registers::Ideal,
            )?;
            Ok(point.fidelity - t.fidelity)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    if worst > cfg.calibration.max_residual {
        return Err(Error::Infeasible(format!(
            "fitted heating law misses a target by {worst:.2e} (limit {:.2e})",
            cfg.calibration.max_residual
        )));
    }
    Ok(Calibration {
        heating,
        targets: sorted,
        occupancies,
        residuals,
    })
}
