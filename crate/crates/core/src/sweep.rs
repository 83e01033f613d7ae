//! End-to-end pipeline and parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::device::{
    conversion_efficiency, emit_conversion, emit_spdc, EmissionState, HeatingModel, Scheme,
};
use crate::herald::{attempt_cycle_time, herald, rate, HeraldOutcome, LinkParams};
use crate::purify::{run_schedule, run_schedule_mc, PumpReport, RawSource};
use crate::qstate::{fidelity_psi_minus, log_negativity, DensityMatrix};
use crate::register::{settle_raw_pair, MemoryKind, MemoryParams};
use crate::{Error, Result};

/// Bumped whenever the CSV columns change.
pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 15] = [
    "sweep",
    "x",
    "scheme",
    "memory",
    "method",
    "round",
    "p_e",
    "fidelity",
    "rate_hz",
    "log_negativity",
    "throughput",
    "p_success",
    "n_th",
    "eta_conv",
    "mc_stderr",
];

/// One output table row. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep: &'static str,
    /// Swept value: pump power (μW) or distance (km).
    pub x: f64,
    pub scheme: &'static str,
    pub memory: &'static str,
    pub method: &'static str,
    pub round: usize,
    pub p_e: f64,
    pub fidelity: f64,
    pub rate_hz: f64,
    pub log_negativity: f64,
    pub throughput: f64,
    pub p_success: f64,
    pub n_th: f64,
    pub eta_conv: f64,
    pub mc_stderr: Option<f64>,
}

/// Register model used for a pipeline evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Registers {
    Ideal,
    Kind(MemoryKind, MemoryParams),
    Configured(MemoryParams, MemoryParams),
}

impl Registers {
    fn params(&self) -> (MemoryParams, MemoryParams) {
        match self {
            Registers::Ideal => (
                MemoryParams::ideal(MemoryKind::Cavity),
                MemoryParams::ideal(MemoryKind::Cavity),
            ),
            Registers::Kind(_, m) => (m.clone(), m.clone()),
            Registers::Configured(a, b) => (a.clone(), b.clone()),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Registers::Ideal => "ideal",
            Registers::Kind(k, _) => k.as_str(),
            Registers::Configured(..) => "configured",
        }
    }
}

/// A heralded raw pair after register-side processing.
#[derive(Clone, Debug)]
pub struct RawPoint {
    pub scheme: Scheme,
    pub p_e: f64,
    pub p_laser_uw: f64,
    pub emission: EmissionState,
    pub outcome: HeraldOutcome,
    /// Pair on (memory A, memory B) at its heralded truncation.
    pub rho: Option<DensityMatrix>,
    pub fidelity: f64,
    pub p_success: f64,
    pub rate_hz: f64,
    pub log_negativity: f64,
    pub n_th: f64,
    pub eta_conv: f64,
    pub t_cycle_s: f64,
    pub mem_a: MemoryParams,
    pub mem_b: MemoryParams,
}

impl RawPoint {
    pub fn throughput(&self) -> f64 {
        self.rate_hz * self.log_negativity
    }

    /// Raw pair for the pumping engine.
    pub fn source(&self) -> Result<RawSource> {
        let rho = self
            .rho
            .as_ref()
            .ok_or_else(|| Error::Tolerance("the raw link never heralds".into()))?;
        Ok(RawSource {
            rho: rho.binned_to_qubits()?,
            p_herald: self.p_success,
            t_cycle_s: self.t_cycle_s,
            mem_a: self.mem_a.clone(),
            mem_b: self.mem_b.clone(),
        })
    }
}

fn emit(cfg: &ScenarioConfig, scheme: Scheme, p_e: f64, p_laser_uw: f64) -> Result<EmissionState> {
    let trunc = cfg.truncation.for_scheme(scheme);
    match scheme {
        Scheme::Conversion => emit_conversion(p_e, p_laser_uw, &cfg.transducer, trunc),
        Scheme::Spdc => emit_spdc(p_laser_uw, &cfg.transducer, cfg.link.t_pulse_s(), trunc),
    }
}

/// Emission, heralding and register settling at one operating point. Both
/// nodes share the transducer parameters. `p_e` is ignored for SPDC.
pub fn raw_point(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    p_e: f64,
    p_laser_uw: f64,
    link: &LinkParams,
    registers: &Registers,
) -> Result<RawPoint> {
    let emission = emit(cfg, scheme, p_e, p_laser_uw)?;
    let outcome = herald(&emission, &emission, link)?;
    let t_cycle_s = attempt_cycle_time(link);
    let (mem_a, mem_b) = registers.params();
    let rho = match &outcome.rho_ab {
        Some(r) => Some(settle_raw_pair(r, t_cycle_s, &mem_a, &mem_b)?.sanitized()?),
        None => None,
    };
    let (fidelity, e_n) = match &rho {
        Some(r) => (fidelity_psi_minus(r)?, log_negativity(r, &[0])?),
        None => (0.0, 0.0),
    };
    Ok(RawPoint {
        scheme,
        p_e: emission.p_e,
        p_laser_uw,
        n_th: emission.n_th,
        eta_conv: conversion_efficiency(p_laser_uw, &cfg.transducer),
        p_success: outcome.p_success,
        rate_hz: rate(outcome.p_success, link),
        emission,
        outcome,
        rho,
        fidelity,
        log_negativity: e_n,
        t_cycle_s,
        mem_a,
        mem_b,
    })
}

/// Maximizes `f` on [lo, hi] by golden-section search; returns (x, f(x)).
pub fn golden_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Raw point at the power-sweep operating rule: conversion maximizes F over
/// P_e when enabled, SPDC uses its power-derived pair probability.
pub fn operating_point(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    p_laser_uw: f64,
    link: &LinkParams,
    registers: &Registers,
) -> Result<RawPoint> {
    if scheme == Scheme::Conversion && cfg.sweep.optimize_p_e {
        let [lo, hi] = cfg.sweep.p_e_bounds;
        let (p_e, _) = golden_max(
            |p| Ok(raw_point(cfg, scheme, p, p_laser_uw, link, registers)?.fidelity),
            lo,
            hi,
            cfg.sweep.p_e_tol,
        )?;
        raw_point(cfg, scheme, p_e, p_laser_uw, link, registers)
    } else {
        raw_point(cfg, scheme, cfg.p_e, p_laser_uw, link, registers)
    }
}

fn raw_row(sweep: &'static str, x: f64, point: &RawPoint, memory: &'static str) -> ResultRow {
    ResultRow {
        sweep,
        x,
        scheme: point.scheme.as_str(),
        memory,
        method: "exact",
        round: 0,
        p_e: point.p_e,
        fidelity: point.fidelity,
        rate_hz: point.rate_hz,
        log_negativity: point.log_negativity,
        throughput: point.throughput(),
        p_success: point.p_success,
        n_th: point.n_th,
        eta_conv: point.eta_conv,
        mc_stderr: None,
    }
}

/// Raw link performance against pump power with ideal registers.
pub fn sweep_power(
    cfg: &ScenarioConfig,
    powers: &[f64],
    schemes: &[Scheme],
) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if powers.is_empty() {
        return Err(Error::Config("power list is empty".into()));
    }
    let jobs: Vec<(Scheme, f64)> = schemes
        .iter()
        .flat_map(|&s| powers.iter().map(move |&p| (s, p)))
        .collect();
    jobs.par_iter()
        .map(|&(scheme, p)| {
            let point = operating_point(cfg, scheme, p, &cfg.link, &Registers::Ideal)?;
            Ok(raw_row("power", p, &point, "ideal"))
        })
        .collect()
}

/// Raw pair fidelity against node distance for both register presets, at
/// the configured scheme and pump power.
pub fn sweep_distance(cfg: &ScenarioConfig, distances: &[f64]) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if distances.is_empty() {
        return Err(Error::Config("distance list is empty".into()));
    }
    let jobs: Vec<(f64, Registers)> = distances
        .iter()
        .flat_map(|&l| {
            [MemoryKind::Cavity, MemoryKind::Transmon]
                .map(|k| (l, Registers::Kind(k, cfg.presets.get(k).clone())))
        })
        .collect();
    jobs.par_iter()
        .map(|(l, regs)| {
            let link = cfg.link.with_distance(*l);
            let point = operating_point(cfg, cfg.scheme, cfg.p_laser_uw, &link, regs)?;
            Ok(raw_row("distance", *l, &point, regs.label()))
        })
        .collect()
}

/// Raw pair feeding the pumping engine at the configured operating point.
pub fn pumping_source(cfg: &ScenarioConfig, p_laser_uw: f64) -> Result<(RawPoint, RawSource)> {
    let regs = Registers::Configured(cfg.memory_a.clone(), cfg.memory_b.clone());
    let point = raw_point(cfg, cfg.scheme, cfg.p_e, p_laser_uw, &cfg.link, &regs)?;
    let source = point.source()?;
    Ok((point, source))
}

fn pump_rows(x: f64, point: &RawPoint, report: &PumpReport) -> Vec<ResultRow> {
    report
        .rounds
        .iter()
        .map(|r| ResultRow {
            sweep: "pump",
            x,
            scheme: point.scheme.as_str(),
            memory: "configured",
            method: report.method.as_str(),
            round: r.round,
            p_e: point.p_e,
            fidelity: r.fidelity,
            rate_hz: r.rate_hz,
            log_negativity: r.log_negativity,
            throughput: r.rate_hz * r.log_negativity,
            p_success: r.p_round,
            n_th: point.n_th,
            eta_conv: point.eta_conv,
            mc_stderr: r.mc_stderr,
        })
        .collect()
}

/// Pumping schedule rows (analytic then Monte Carlo) for each pump power.
pub fn sweep_pumping(
    cfg: &ScenarioConfig,
    powers: &[f64],
    mc_samples: usize,
    seed: u64,
) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if powers.is_empty() {
        return Err(Error::Config("power list is empty".into()));
    }
    let per_power: Vec<Vec<ResultRow>> = powers
        .par_iter()
        .map(|&p| {
            let (point, source) = pumping_source(cfg, p)?;
            let analytic = run_schedule(&cfg.pump, &source)?;
            let mc = run_schedule_mc(&cfg.pump, &source, mc_samples, seed)?;
            let mut rows = pump_rows(p, &point, &analytic);
            rows.extend(pump_rows(p, &point, &mc));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_power.into_iter().flatten().collect())
}

/// Raw fidelity at the power-sweep operating rule with the heating model
/// replaced by a constant occupancy.
pub fn fidelity_at_occupancy(cfg: &ScenarioConfig, p_laser_uw: f64, n_th: f64) -> Result<f64> {
    let mut c = cfg.clone();
    c.transducer.heating = HeatingModel {
        n0: n_th,
        a: 0.0,
        ..cfg.transducer.heating.clone()
    };
    Ok(operating_point(&c, c.scheme, p_laser_uw, &c.link, &Registers::Ideal)?.fidelity)
}
