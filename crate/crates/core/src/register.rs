//! Memory registers: idling decoherence, noisy CNOT and Z-basis readout.
//!
//! Times in [`MemoryParams`] are in milliseconds; durations passed to the
//! operations are in seconds.

use serde::{Deserialize, Serialize};

use crate::qstate::channel::{
    bin_to_qubit, bit_flip, cnot, dephasing, depolarizing_1q, depolarizing_2q, loss_channel,
    projector,
};
use crate::qstate::{DensityMatrix, KrausChannel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryKind {
    Cavity,
    Transmon,
}

impl MemoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MemoryKind::Cavity => "cavity",
            MemoryKind::Transmon => "transmon",
        }
    }

    /// Editable example values; not taken from any measured device.
    pub fn preset(self) -> MemoryParams {
        match self {
            MemoryKind::Cavity => MemoryParams {
                kind: self,
                t1_ms: 1.0,
                t_phi_ms: f64::INFINITY,
                f_op: 0.99,
                readout_flip: 0.0,
            },
            MemoryKind::Transmon => MemoryParams {
                kind: self,
                t1_ms: 0.15,
                t_phi_ms: 0.45,
                f_op: 0.999,
                readout_flip: 0.0,
            },
        }
    }
}

/// Serializes infinite times as `null`.
mod time_ms {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryParams {
    pub kind: MemoryKind,
    /// Energy relaxation time; `null` for none.
    #[serde(with = "time_ms")]
    pub t1_ms: f64,
    /// Pure dephasing time; `null` for none.
    #[serde(with = "time_ms", default = "infinite")]
    pub t_phi_ms: f64,
    /// Average gate fidelity of local two-mode operations.
    pub f_op: f64,
    /// Probability that a Z readout reports the wrong bit.
    #[serde(default)]
    pub readout_flip: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl Default for MemoryParams {
    fn default() -> Self {
        MemoryKind::Cavity.preset()
    }
}

impl MemoryParams {
    /// Noise-free register.
    pub fn ideal(kind: MemoryKind) -> Self {
        Self {
            kind,
            t1_ms: f64::INFINITY,
            t_phi_ms: f64::INFINITY,
            f_op: 1.0,
            readout_flip: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1_ms > 0.0) {
            return Err(Error::param("memory.t1_ms", self.t1_ms, "(0, inf]"));
        }
        if !(self.t_phi_ms > 0.0) {
            return Err(Error::param("memory.t_phi_ms", self.t_phi_ms, "(0, inf]"));
        }
        if !(self.f_op > 0.25 && self.f_op <= 1.0) {
            return Err(Error::param("memory.f_op", self.f_op, "(0.25, 1]"));
        }
        if !(0.0..=0.5).contains(&self.readout_flip) {
            return Err(Error::param(
                "memory.readout_flip",
                self.readout_flip,
                "[0, 0.5]",
            ));
        }
        Ok(())
    }

    /// Amplitude-damping probability after `t_s` seconds.
    pub fn decay_probability(&self, t_s: f64) -> f64 {
        1.0 - (-t_s * 1e3 / self.t1_ms).exp()
    }

    /// Dephasing strength after `t_s` seconds.
    pub fn dephasing_strength(&self, t_s: f64) -> f64 {
        1.0 - (-t_s * 1e3 / self.t_phi_ms).exp()
    }
}

/// Idling for `t_s` seconds on one mode: amplitude damping then dephasing.
pub fn idle_channel(t_s: f64, mem: &MemoryParams, dim: usize) -> Result<KrausChannel> {
    if !(t_s >= 0.0) {
        return Err(Error::param("t", t_s, "[0, inf)"));
    }
    let damp = loss_channel(1.0 - mem.decay_probability(t_s), dim)?;
    let phase = dephasing(mem.dephasing_strength(t_s), dim)?;
    damp.then(&phase)
}

pub fn idle(
    rho: &DensityMatrix,
    t_s: f64,
    mem: &MemoryParams,
    targets: &[usize],
) -> Result<DensityMatrix> {
    rho.space().check_indices(targets)?;
    let mut out = rho.clone();
    for &m in targets {
        let ch = idle_channel(t_s, mem, rho.space().dims()[m])?;
        out = out.apply(&ch, &[m])?;
    }
    Ok(out)
}

/// Ideal CNOT on the qubit blocks followed by two-mode depolarization at
/// the register's operation fidelity.
pub fn noisy_cnot(
    rho: &DensityMatrix,
    control: usize,
    target: usize,
    mem: &MemoryParams,
) -> Result<DensityMatrix> {
    if control == target {
        return Err(Error::DuplicateMode(control));
    }
    rho.space().check_indices(&[control, target])?;
    let dims = [rho.space().dims()[control], rho.space().dims()[target]];
    let out = rho.apply_unitary(&cnot(dims), &[control, target])?;
    out.apply(&depolarizing_2q(mem.f_op, dims)?, &[control, target])
}

/// One outcome of [`measure_z_pair`].
#[derive(Clone, Debug, PartialEq)]
pub struct ZOutcome {
    pub bits: (u8, u8),
    pub probability: f64,
    /// Normalized post-measurement state; `None` for zero-probability outcomes.
    pub state: Option<DensityMatrix>,
}

/// Projective Z readout of two modes. Levels ≥ 2 read as 1; `readout_flip`
/// flips each reported bit independently.
///
/// Post-states keep the measured modes, binned onto their qubit block.
pub fn measure_z_pair(
    rho: &DensityMatrix,
    m1: usize,
    m2: usize,
    readout_flip: f64,
) -> Result<Vec<ZOutcome>> {
    if m1 == m2 {
        return Err(Error::DuplicateMode(m1));
    }
    rho.space().check_indices(&[m1, m2])?;
    let mut binned = rho.clone();
    for m in [m1, m2] {
        let d = rho.space().dims()[m];
        if d > 2 {
            binned = binned.apply(&bin_to_qubit(d)?, &[m])?;
        }
        if readout_flip > 0.0 {
            binned = binned.apply(&bit_flip(readout_flip, d)?, &[m])?;
        }
    }
    let dims = vec![rho.space().dims()[m1], rho.space().dims()[m2]];
    let mut outcomes = Vec::with_capacity(4);
    for b1 in 0..2u8 {
        for b2 in 0..2u8 {
            let proj = projector(dims.clone(), |l| l[0] == b1 as usize && l[1] == b2 as usize)?;
            let post = binned.apply(&proj, &[m1, m2])?;
            let probability = post.trace().max(0.0);
            let state = if probability > 0.0 {
                Some(post.normalized()?.0)
            } else {
                None
            };
            outcomes.push(ZOutcome {
                bits: (b1, b2),
                probability,
                state,
            });
        }
    }
    Ok(outcomes)
}

/// Register-side processing of a freshly heralded pair on modes (0, 1):
/// each memory idles for `t_s` while the herald is confirmed and its local
/// release operation is depolarized at the register fidelity.
pub fn settle_raw_pair(
    rho_ab: &DensityMatrix,
    t_s: f64,
    mem_a: &MemoryParams,
    mem_b: &MemoryParams,
) -> Result<DensityMatrix> {
    let mut out = rho_ab.clone();
    for (m, mem) in [(0usize, mem_a), (1, mem_b)] {
        let d = rho_ab.space().dims()[m];
        out = out.apply(&idle_channel(t_s, mem, d)?, &[m])?;
        out = out.apply(&depolarizing_1q(mem.f_op.max(0.5), d)?, &[m])?;
    }
    Ok(out)
}
