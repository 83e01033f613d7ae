//! Asymmetric entanglement pumping.
//!
//! A stored pair on (C3_A, C3_B) is pumped with fresh raw pairs on
//! (C2_A, C2_B): local CNOTs C3→C2 on each node, Z readout of both C2 modes,
//! keep on (1,1). No bilateral rotations are applied, so the map is tailored
//! to amplitude damping. A failure discards everything and restarts from a
//! fresh raw pair.

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qstate::channel::{parity, projector};
use crate::qstate::{
    fidelity_psi_minus, log_negativity, CMatrix, ChannelKind, Complex64, DensityMatrix,
    KrausChannel, ModeSpace,
};
use crate::register::{idle_channel, noisy_cnot, MemoryParams};
use crate::{Error, Result};

pub const MAX_ROUNDS: usize = 8;
pub const MIN_MC_SAMPLES: usize = 100;
/// Completed pairs simulated per RNG stream.
pub const MC_CHUNK: usize = 256;

/// Ancilla readout accepted as success.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeepOutcome {
    #[default]
    OneOne,
    /// Exploration variant; not the protocol default.
    ZeroZero,
}

impl KeepOutcome {
    fn bits(self) -> usize {
        match self {
            KeepOutcome::OneOne => 1,
            KeepOutcome::ZeroZero => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSchedule {
    pub rounds: usize,
    pub include_wait_decoherence: bool,
    /// Gate and readout time per round (μs).
    pub t_local_us: f64,
    pub keep: KeepOutcome,
}

impl Default for PumpSchedule {
    fn default() -> Self {
        Self {
            rounds: 2,
            include_wait_decoherence: true,
            t_local_us: 1.0,
            keep: KeepOutcome::OneOne,
        }
    }
}

impl PumpSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.rounds > MAX_ROUNDS {
            return Err(Error::Config(format!(
                "pump.rounds = {} exceeds the cap of {MAX_ROUNDS}",
                self.rounds
            )));
        }
        if !(self.t_local_us >= 0.0 && self.t_local_us.is_finite()) {
            return Err(Error::param("pump.t_local_us", self.t_local_us, "[0, inf)"));
        }
        Ok(())
    }
}

/// Everything the schedule needs to know about raw pair generation.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSource {
    /// Raw pair on (memory A, memory B) restricted to the qubit block.
    pub rho: DensityMatrix,
    pub p_herald: f64,
    pub t_cycle_s: f64,
    pub mem_a: MemoryParams,
    pub mem_b: MemoryParams,
}

impl RawSource {
    pub fn raw_rate(&self) -> f64 {
        self.p_herald / self.t_cycle_s
    }

    fn validate(&self) -> Result<()> {
        check_pair(&self.rho, "raw")?;
        if !(self.p_herald > 0.0 && self.p_herald <= 1.0) {
            return Err(Error::param("p_herald", self.p_herald, "(0, 1]"));
        }
        if !(self.t_cycle_s > 0.0 && self.t_cycle_s.is_finite()) {
            return Err(Error::param("t_cycle", self.t_cycle_s, "(0, inf)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub fidelity: f64,
    /// Per-attempt herald probability for round 0, pump success otherwise.
    pub p_round: f64,
    pub rate_hz: f64,
    pub log_negativity: f64,
    pub mc_stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PumpReport {
    pub method: Method,
    pub rounds: Vec<RoundReport>,
    pub mc_samples: Option<usize>,
}

fn check_pair(rho: &DensityMatrix, what: &str) -> Result<()> {
    if rho.space().dims() != [2, 2] {
        return Err(Error::Config(format!(
            "{what} pair must live on two qubit-block modes, found dims {:?}",
            rho.space().dims()
        )));
    }
    Ok(())
}

/// Unnormalized kept state; its trace is the success probability.
fn pump_unnormalized(
    stored: &DensityMatrix,
    raw: &DensityMatrix,
    mem_a: &MemoryParams,
    mem_b: &MemoryParams,
    keep: KeepOutcome,
) -> Result<DensityMatrix> {
    // (C3_A, C3_B, C2_A, C2_B)
    let joint = stored.tensor(raw)?;
    let joint = noisy_cnot(&joint, 0, 2, mem_a)?;
    let joint = noisy_cnot(&joint, 1, 3, mem_b)?;
    let b = keep.bits();
    let proj = projector(vec![2, 2], |l| l[0] == b && l[1] == b)?;
    // Either accepted readout leaves ψ⁺ from ψ⁻ ⊗ ψ⁻; Z on C3_A restores ψ⁻.
    joint
        .apply(&proj, &[2, 3])?
        .partial_trace(&[0, 1])?
        .apply_unitary(&parity(2), &[0])
}

/// One pumping round. Returns the normalized kept pair and P(success).
pub fn pump_round(
    stored: &DensityMatrix,
    raw: &DensityMatrix,
    mem_a: &MemoryParams,
    mem_b: &MemoryParams,
    keep: KeepOutcome,
) -> Result<(Option<DensityMatrix>, f64)> {
    check_pair(stored, "stored")?;
    check_pair(raw, "raw")?;
    let kept = pump_unnormalized(stored, raw, mem_a, mem_b, keep)?;
    let p = kept.trace().clamp(0.0, 1.0);
    if p <= 0.0 {
        return Ok((None, 0.0));
    }
    Ok((Some(kept.normalized()?.0.sanitized()?), p))
}

fn idle_pair_channel(t_s: f64, mem_a: &MemoryParams, mem_b: &MemoryParams) -> Result<KrausChannel> {
    idle_channel(t_s, mem_a, 2)?.tensor(&idle_channel(t_s, mem_b, 2)?)
}

/// Σ_{k≥1} p(1−p)^{k−1} S^k = p·S·(I − (1−p)S)⁻¹ in closed form.
fn geometric_mixture(s1: &CMatrix, p: f64) -> Result<CMatrix> {
    let n = s1.nrows();
    let lhs = CMatrix::identity(n, n) - s1 * Complex64::new(1.0 - p, 0.0);
    let inv = lhs
        .try_inverse()
        .ok_or_else(|| Error::Tolerance("geometric wait series does not converge".into()))?;
    Ok(s1 * inv * Complex64::new(p, 0.0))
}

fn mixture_channel(idle: &KrausChannel, p_herald: f64) -> Result<KrausChannel> {
    if !(p_herald > 0.0 && p_herald <= 1.0) {
        return Err(Error::param("p_herald", p_herald, "(0, 1]"));
    }
    if p_herald == 1.0 {
        return Ok(idle.clone());
    }
    let s = geometric_mixture(&idle.superoperator(), p_herald)?;
    KrausChannel::from_superoperator(&s, idle.dims().to_vec(), ChannelKind::TracePreserving)
}

/// Decay of one memory mode while waiting a geometric number of attempts
/// (success probability `p_herald`, period `t_cycle_s`) for the next raw pair.
pub fn wait_decay_channel(
    mem: &MemoryParams,
    p_herald: f64,
    t_cycle_s: f64,
    dim: usize,
) -> Result<KrausChannel> {
    mixture_channel(&idle_channel(t_cycle_s, mem, dim)?, p_herald)
}

/// Joint decay of a stored pair. Both memories wait the same number of
/// attempts, so this is not the product of the single-mode channels.
pub fn pair_wait_decay_channel(
    mem_a: &MemoryParams,
    mem_b: &MemoryParams,
    p_herald: f64,
    t_cycle_s: f64,
) -> Result<KrausChannel> {
    mixture_channel(&idle_pair_channel(t_cycle_s, mem_a, mem_b)?, p_herald)
}

fn round_record(
    round: usize,
    rho: &DensityMatrix,
    p_round: f64,
    expected_time: f64,
) -> Result<RoundReport> {
    Ok(RoundReport {
        round,
        fidelity: fidelity_psi_minus(rho)?,
        p_round,
        rate_hz: 1.0 / expected_time,
        log_negativity: log_negativity(rho, &[0])?,
        mc_stderr: None,
    })
}

/// Deterministic evaluation: fidelities by channel algebra with the
/// geometric wait folded in, rates from the renewal estimate
/// E[T_k] = (E[T_{k−1}] + 1/R_raw + t_local)/p_k.
pub fn run_schedule(sched: &PumpSchedule, raw: &RawSource) -> Result<PumpReport> {
    sched.validate()?;
    raw.validate()?;
    let wait = if sched.include_wait_decoherence {
        Some(pair_wait_decay_channel(
            &raw.mem_a,
            &raw.mem_b,
            raw.p_herald,
            raw.t_cycle_s,
        )?)
    } else {
        None
    };
    let t_raw = 1.0 / raw.raw_rate();
    let t_local = sched.t_local_us * 1e-6;
    let mut expected = t_raw;
    let mut stored = raw.rho.clone();
    let mut rounds = vec![round_record(0, &stored, raw.p_herald, expected)?];
    for k in 1..=sched.rounds {
        let waited = match &wait {
            Some(ch) => stored.apply(ch, &[0, 1])?,
            None => stored.clone(),
        };
        let (kept, p) = pump_round(&waited, &raw.rho, &raw.mem_a, &raw.mem_b, sched.keep)?;
        let kept =
            kept.ok_or_else(|| Error::Tolerance(format!("pumping round {k} can never succeed")))?;
        expected = (expected + t_raw + t_local) / p;
        rounds.push(round_record(k, &kept, p, expected)?);
        stored = kept;
    }
    Ok(PumpReport {
        method: Method::Analytic,
        rounds,
        mc_samples: None,
    })
}

/// Row-major vectorized two-qubit density matrix and maps acting on it.
type V16 = SVector<Complex64, 16>;
type M16 = SMatrix<Complex64, 16, 16>;

fn vec_of(rho: &DensityMatrix) -> V16 {
    let m = rho.matrix();
    V16::from_fn(|k, _| m[(k / 4, k % 4)])
}

fn unvec(v: &V16) -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| v[i * 4 + j])
}

fn vtrace(v: &V16) -> f64 {
    v[0].re + v[5].re + v[10].re + v[15].re
}

/// ⟨ψ⁻|σ|ψ⁻⟩ on a row-major vectorized two-qubit matrix.
fn vfidelity(v: &V16) -> f64 {
    0.5 * (v[5].re + v[10].re - 2.0 * v[6].re)
}

/// The pump round with a fixed raw pair as a linear map on vec(stored).
fn pump_superoperator(raw: &RawSource, keep: KeepOutcome) -> Result<M16> {
    let space = ModeSpace::qubits(2);
    let mut s = M16::zeros();
    let apply = |m: CMatrix| -> Result<V16> {
        let sigma = DensityMatrix::from_matrix(space.clone(), m)?;
        Ok(vec_of(&pump_unnormalized(
            &sigma, &raw.rho, &raw.mem_a, &raw.mem_b, keep,
        )?))
    };
    let unit = |i: usize, j: usize| {
        let mut m = CMatrix::zeros(4, 4);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    };
    for i in 0..4 {
        for j in 0..4 {
            // E_ij = X + iY with X, Y Hermitian
            let x = (unit(i, j) + unit(j, i)) * Complex64::new(0.5, 0.0);
            let y = (unit(i, j) - unit(j, i)) * Complex64::new(0.0, -0.5);
            let col = apply(x)? + apply(y)? * Complex64::new(0.0, 1.0);
            s.set_column(i * 4 + j, &col);
        }
    }
    Ok(s)
}

/// Attempts until the first herald, counting the successful one.
fn geometric_attempts(rng: &mut ChaCha8Rng, p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    1 + (u.ln() / (1.0 - p).ln()).floor() as u64
}

#[derive(Clone, Debug)]
struct Tally {
    completed: usize,
    f_sum: f64,
    f2_sum: f64,
    time: f64,
    attempts: u64,
    successes: u64,
    state_sum: V16,
}

impl Tally {
    fn new() -> Self {
        Self {
            completed: 0,
            f_sum: 0.0,
            f2_sum: 0.0,
            time: 0.0,
            attempts: 0,
            successes: 0,
            state_sum: V16::zeros(),
        }
    }

    fn merge(mut self, other: &Tally) -> Self {
        self.completed += other.completed;
        self.f_sum += other.f_sum;
        self.f2_sum += other.f2_sum;
        self.time += other.time;
        self.attempts += other.attempts;
        self.successes += other.successes;
        self.state_sum += &other.state_sum;
        self
    }
}

/// Idling of one qubit-block memory in closed form: populations decay by
/// e^{−t/T1}, coherences by e^{−t/2T1}·e^{−t/Tφ}.
#[derive(Clone, Copy, Debug)]
struct QubitIdle {
    decay: f64,
    coherence: f64,
}

impl QubitIdle {
    fn new(t_s: f64, mem: &MemoryParams) -> Self {
        let decay = 1.0 - mem.decay_probability(t_s);
        Self {
            decay,
            coherence: decay.sqrt() * (1.0 - mem.dephasing_strength(t_s)),
        }
    }

    /// Acts on `mode` (0 = high bit) of a row-major vectorized 4×4 matrix.
    fn apply(&self, v: &V16, mode: usize) -> V16 {
        let bit = if mode == 0 { 2 } else { 1 };
        let mut out = V16::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let z = v[i * 4 + j];
                match (i & bit != 0, j & bit != 0) {
                    (false, false) => out[i * 4 + j] += z,
                    (true, true) => {
                        out[i * 4 + j] += z * self.decay;
                        out[(i ^ bit) * 4 + (j ^ bit)] += z * (1.0 - self.decay);
                    }
                    _ => out[i * 4 + j] += z * self.coherence,
                }
            }
        }
        out
    }
}

struct McModel<'a> {
    raw: &'a RawSource,
    sched: &'a PumpSchedule,
    pump: M16,
    raw_vec: V16,
}

impl McModel<'_> {
    fn wait(&self, v: &V16, k: u64) -> V16 {
        if !self.sched.include_wait_decoherence {
            return *v;
        }
        let t = k as f64 * self.raw.t_cycle_s;
        let a = QubitIdle::new(t, &self.raw.mem_a).apply(v, 0);
        QubitIdle::new(t, &self.raw.mem_b).apply(&a, 1)
    }

    /// Simulates restarts until `count` pairs of the given depth are produced.
    fn chunk(&self, depth: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<Tally> {
        let t_local = self.sched.t_local_us * 1e-6;
        let mut tally = Tally::new();
        while tally.completed < count {
            let k = geometric_attempts(rng, self.raw.p_herald);
            tally.time += k as f64 * self.raw.t_cycle_s;
            let mut stored = self.raw_vec;
            let mut level = 0;
            while level < depth {
                let k = geometric_attempts(rng, self.raw.p_herald);
                tally.time += k as f64 * self.raw.t_cycle_s + t_local;
                let waited = self.wait(&stored, k);
                let kept = self.pump * waited;
                let p = vtrace(&kept).clamp(0.0, 1.0);
                if level + 1 == depth {
                    tally.attempts += 1;
                }
                if rng.random::<f64>() >= p {
                    break;
                }
                stored = kept / Complex64::new(p, 0.0);
                level += 1;
            }
            if level == depth {
                if depth > 0 {
                    tally.successes += 1;
                }
                let f = vfidelity(&stored);
                tally.completed += 1;
                tally.f_sum += f;
                tally.f2_sum += f * f;
                tally.state_sum += &stored;
            }
        }
        Ok(tally)
    }
}

/// Monte Carlo renewal simulation. For each depth k ≤ N it produces
/// `samples` round-k pairs from scratch with sampled waits and sampled
/// outcomes; F_k is the mean fidelity and R_k the empirical throughput.
///
/// Results depend only on (`seed`, `samples`): chunk c of depth k draws from
/// ChaCha8 stream (k << 32) | c of the master seed.
pub fn run_schedule_mc(
    sched: &PumpSchedule,
    raw: &RawSource,
    samples: usize,
    seed: u64,
) -> Result<PumpReport> {
    sched.validate()?;
    raw.validate()?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::Config(format!(
            "mc_samples = {samples} is below the minimum of {MIN_MC_SAMPLES}"
        )));
    }
    let model = McModel {
        raw,
        sched,
        pump: pump_superoperator(raw, sched.keep)?,
        raw_vec: vec_of(&raw.rho),
    };
    let chunks = samples.div_ceil(MC_CHUNK);
    let mut rounds = Vec::with_capacity(sched.rounds + 1);
    for depth in 0..=sched.rounds {
        let parts: Vec<Result<Tally>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((depth as u64) << 32) | c as u64);
                let count = MC_CHUNK.min(samples - c * MC_CHUNK);
                model.chunk(depth, count, &mut rng)
            })
            .collect();
        let mut total = Tally::new();
        for part in parts {
            total = total.merge(&part?);
        }
        let n = total.completed as f64;
        let mean_f = total.f_sum / n;
        let var = (total.f2_sum / n - mean_f * mean_f).max(0.0) * n / (n - 1.0);
        let mean_state = DensityMatrix::from_matrix(
            ModeSpace::qubits(2),
            unvec(&(total.state_sum / Complex64::new(n, 0.0))),
        )?
        .sanitized()?;
        let p_round = if depth == 0 {
            raw.p_herald
        } else {
            total.successes as f64 / total.attempts as f64
        };
        rounds.push(RoundReport {
            round: depth,
            fidelity: mean_f,
            p_round,
            rate_hz: n / total.time,
            log_negativity: log_negativity(&mean_state, &[0])?,
            mc_stderr: Some((var / n).sqrt()),
        });
    }
    Ok(PumpReport {
        method: Method::MonteCarlo,
        rounds,
        mc_samples: Some(samples),
    })
}
