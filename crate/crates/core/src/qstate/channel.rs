use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::density::CMatrix;
use crate::{Error, Result};

/// Completeness tolerance for Kraus sets.
pub const KRAUS_TOL: f64 = 1e-10;
/// Largest acceptable thermal population above the top kept level when the
/// noise channel acts on vacuum.
pub const THERMAL_TAIL_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    TracePreserving,
    /// Post-selection or heralding; Σ K†K ≼ I.
    TraceDecreasing,
}

type SparseRows = Vec<Vec<(usize, Complex64)>>;

/// A Kraus decomposition acting on an ordered set of modes with the given
/// truncation dimensions.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
    dims: Vec<usize>,
    kind: ChannelKind,
    rows: Vec<SparseRows>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>, dims: Vec<usize>, kind: ChannelKind) -> Result<Self> {
        let n: usize = dims.iter().product();
        if operators.is_empty() {
            return Err(Error::Config(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        for op in &operators {
            if op.nrows() != n || op.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: op.nrows().max(op.ncols()),
                });
            }
        }
        let ch = Self::build(operators, dims, kind);
        match kind {
            ChannelKind::TracePreserving => {
                let defect = ch.completeness_defect();
                if defect > KRAUS_TOL {
                    return Err(Error::Tolerance(format!(
                        "Kraus set is not trace preserving (|ΣK†K − I| = {defect:.3e})"
                    )));
                }
            }
            ChannelKind::TraceDecreasing => {
                let top = SymmetricEigen::new(ch.completeness())
                    .eigenvalues
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                if top > 1.0 + KRAUS_TOL {
                    return Err(Error::Tolerance(format!(
                        "Kraus set increases trace (λ_max(ΣK†K) = {top:.12})"
                    )));
                }
            }
        }
        Ok(ch)
    }

    fn build(operators: Vec<CMatrix>, dims: Vec<usize>, kind: ChannelKind) -> Self {
        let rows = operators
            .iter()
            .map(|op| {
                (0..op.nrows())
                    .map(|r| {
                        (0..op.ncols())
                            .filter(|&col| op[(r, col)] != zero())
                            .map(|col| (col, op[(r, col)]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            operators,
            dims,
            kind,
            rows,
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self::build(
            vec![CMatrix::identity(n, n)],
            dims,
            ChannelKind::TracePreserving,
        )
    }

    pub fn unitary(u: CMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::new(vec![u], dims, ChannelKind::TracePreserving)
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub(crate) fn sparse_rows(&self) -> &[SparseRows] {
        &self.rows
    }

    /// Σ K†K.
    pub fn completeness(&self) -> CMatrix {
        let n: usize = self.dims.iter().product();
        self.operators
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k)
    }

    /// max |Σ K†K − I| elementwise.
    pub fn completeness_defect(&self) -> f64 {
        let s = self.completeness();
        let n = s.nrows();
        (s - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if self.dims != next.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.iter().product(),
                found: next.dims.iter().product(),
            });
        }
        let mut ops = Vec::with_capacity(self.operators.len() * next.operators.len());
        for b in &next.operators {
            for a in &self.operators {
                ops.push(b * a);
            }
        }
        let kind = if self.kind == ChannelKind::TracePreserving
            && next.kind == ChannelKind::TracePreserving
        {
            ChannelKind::TracePreserving
        } else {
            ChannelKind::TraceDecreasing
        };
        Ok(Self::build(ops, self.dims.clone(), kind))
    }

    /// Independent action on the concatenated modes: {K_i ⊗ L_j}.
    pub fn tensor(&self, other: &KrausChannel) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.operators.len() * other.operators.len());
        for a in &self.operators {
            for b in &other.operators {
                ops.push(a.kronecker(b));
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let kind = if self.kind == ChannelKind::TracePreserving
            && other.kind == ChannelKind::TracePreserving
        {
            ChannelKind::TracePreserving
        } else {
            ChannelKind::TraceDecreasing
        };
        Ok(Self::build(ops, dims, kind))
    }

    /// Liouville matrix S = Σ K ⊗ K̄ acting on row-major vec(ρ).
    pub fn superoperator(&self) -> CMatrix {
        let n: usize = self.dims.iter().product();
        self.operators
            .iter()
            .fold(CMatrix::zeros(n * n, n * n), |acc, k| {
                acc + k.kronecker(&k.map(|z| z.conj()))
            })
    }

    /// Rebuilds a minimal Kraus set from a Liouville matrix through the
    /// eigendecomposition of its Choi matrix.
    pub fn from_superoperator(s: &CMatrix, dims: Vec<usize>, kind: ChannelKind) -> Result<Self> {
        let n: usize = dims.iter().product();
        if s.nrows() != n * n || s.ncols() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: s.nrows(),
            });
        }
        // S[(i,j),(k,l)] = Σ K_ik conj(K_jl)  ->  J[(i,k),(j,l)]
        let choi = CMatrix::from_fn(n * n, n * n, |r, col| {
            let (i, k) = (r / n, r % n);
            let (j, l) = (col / n, col % n);
            s[(i * n + j, k * n + l)]
        });
        let choi = (&choi + choi.adjoint()) * c(0.5);
        let eig = SymmetricEigen::new(choi);
        let scale = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let mut ops = Vec::new();
        for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam < -1e-9 * scale.max(1.0) {
                return Err(Error::Tolerance(format!(
                    "superoperator is not completely positive (Choi eigenvalue {lam:.3e})"
                )));
            }
            if lam <= 1e-14 * scale.max(1.0) {
                continue;
            }
            let v = eig.eigenvectors.column(idx);
            let amp = lam.sqrt();
            ops.push(CMatrix::from_fn(n, n, |i, k| v[i * n + k] * amp));
        }
        if ops.is_empty() {
            ops.push(CMatrix::zeros(n, n));
        }
        Self::new(ops, dims, kind)
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(name, value, "[0, 1]"))
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Pure loss: a beamsplitter of transmissivity `eta` to a vacuum port, traced
/// out. K_k = Σ_n √C(n,k) η^{(n−k)/2} (1−η)^{k/2} |n−k⟩⟨n|.
pub fn loss_channel(eta: f64, dim: usize) -> Result<KrausChannel> {
    check_unit("eta", eta)?;
    if eta == 1.0 {
        return Ok(KrausChannel::identity(vec![dim]));
    }
    let ops = (0..dim)
        .map(|k| {
            let mut op = CMatrix::zeros(dim, dim);
            for n in k..dim {
                let amp = binomial(n, k).sqrt()
                    * eta.powf((n - k) as f64 / 2.0)
                    * (1.0 - eta).powf(k as f64 / 2.0);
                op[(n - k, n)] = c(amp);
            }
            op
        })
        .collect();
    KrausChannel::new(ops, vec![dim], ChannelKind::TracePreserving)
}

/// Energy relaxation with decay probability `gamma`; the bosonic
/// generalisation of the qubit amplitude-damping map.
pub fn amplitude_damping(gamma: f64, dim: usize) -> Result<KrausChannel> {
    check_unit("gamma", gamma)?;
    loss_channel(1.0 - gamma, dim)
}

/// Phase-insensitive quantum-limited amplifier of gain `gain`, truncated.
/// Population pushed above the top level is collected in the top level by
/// the completion operators √leak_m |d−1⟩⟨m|, so the set stays trace
/// preserving and the lower levels are exact.
fn amplifier(gain: f64, dim: usize) -> Result<(KrausChannel, f64)> {
    let keep = 1.0 / gain;
    let push = (gain - 1.0) / gain;
    let mut ops = Vec::with_capacity(dim + 1);
    let mut retained = vec![0.0; dim];
    for k in 0..dim {
        let mut op = CMatrix::zeros(dim, dim);
        for m in 0..dim - k {
            let amp = (binomial(m + k, k) * keep.powi(m as i32 + 1) * push.powi(k as i32)).sqrt();
            op[(m + k, m)] = c(amp);
            retained[m] += amp * amp;
        }
        ops.push(op);
    }
    let leaked: Vec<f64> = retained.iter().map(|r| (1.0 - r).max(0.0)).collect();
    let worst = leaked.iter().copied().fold(0.0, f64::max);
    for (m, &leak) in leaked.iter().enumerate() {
        if leak > 0.0 {
            let mut op = CMatrix::zeros(dim, dim);
            op[(dim - 1, m)] = c(leak.sqrt());
            ops.push(op);
        }
    }
    Ok((
        KrausChannel::new(ops, vec![dim], ChannelKind::TracePreserving)?,
        worst,
    ))
}

/// Smallest truncation for which [`thermal_noise_channel`] accepts `n_add`.
pub fn thermal_min_dim(n_add: f64) -> usize {
    if n_add <= 0.0 {
        return 2;
    }
    let ratio = n_add / (1.0 + n_add);
    let mut d = 2;
    while ratio.powi(d as i32) >= THERMAL_TAIL_TOL {
        d += 1;
    }
    d
}

/// Additive thermal noise of mean occupancy `n_add`: a thermal-environment
/// beamsplitter in the weak-coupling limit, realised as loss 1/(1+n)
/// followed by a quantum-limited amplifier of gain 1+n. Vacuum goes to a
/// thermal state of mean `n_add`, and noise adds: N(n₂)∘N(n₁) = N(n₁+n₂).
pub fn thermal_noise_channel(n_add: f64, dim: usize) -> Result<KrausChannel> {
    if !(n_add >= 0.0 && n_add.is_finite()) {
        return Err(Error::param("n_add", n_add, "[0, inf)"));
    }
    if n_add == 0.0 {
        return Ok(KrausChannel::identity(vec![dim]));
    }
    let tail = (n_add / (1.0 + n_add)).powi(dim as i32);
    if tail >= THERMAL_TAIL_TOL {
        return Err(Error::Truncation {
            dim,
            reason: format!(
                "thermal population {tail:.2e} above level {} for n_add = {n_add}",
                dim - 1
            ),
        });
    }
    let gain = 1.0 + n_add;
    let (amp, leaked) = amplifier(gain, dim)?;
    if leaked > 1e-6 {
        log::debug!("thermal noise n_add={n_add} dim={dim}: truncation leakage {leaked:.2e} collected in the top level");
    }
    let composite = loss_channel(1.0 / gain, dim)?.then(&amp)?;
    KrausChannel::from_superoperator(
        &composite.superoperator(),
        vec![dim],
        ChannelKind::TracePreserving,
    )
}

/// Gaussian phase diffusion on the Fock basis: ρ_mn → (1−λ)^{(m−n)²} ρ_mn.
/// On a qubit this is the phase-flip map with coherence shrinking by 1−λ.
pub fn dephasing(lambda: f64, dim: usize) -> Result<KrausChannel> {
    check_unit("lambda", lambda)?;
    if lambda == 0.0 {
        return Ok(KrausChannel::identity(vec![dim]));
    }
    let keep = 1.0 - lambda;
    let m = DMatrix::<f64>::from_fn(dim, dim, |i, j| {
        let k = i.abs_diff(j);
        keep.powi((k * k) as i32)
    });
    let eig = SymmetricEigen::new(m);
    let ops: Vec<CMatrix> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > 1e-15)
        .map(|(idx, &mu)| {
            let v = eig.eigenvectors.column(idx);
            CMatrix::from_fn(
                dim,
                dim,
                |i, j| {
                    if i == j {
                        c(mu.sqrt() * v[i])
                    } else {
                        zero()
                    }
                },
            )
        })
        .collect();
    KrausChannel::new(ops, vec![dim], ChannelKind::TracePreserving)
}

/// Pauli I, X, Y, Z on the {|0⟩,|1⟩} block of a `dim`-level mode, identity
/// on the levels above.
fn embedded_paulis(dim: usize) -> [CMatrix; 4] {
    let i_unit = Complex64::new(0.0, 1.0);
    let base = CMatrix::identity(dim, dim);
    let mut x = base.clone();
    x[(0, 0)] = zero();
    x[(1, 1)] = zero();
    x[(0, 1)] = c(1.0);
    x[(1, 0)] = c(1.0);
    let mut y = x.clone();
    y[(0, 1)] = -i_unit;
    y[(1, 0)] = i_unit;
    let mut z = base.clone();
    z[(1, 1)] = c(-1.0);
    [base, x, y, z]
}

/// Single-mode depolarization of the qubit block with average gate fidelity
/// `f_op`: ρ → (1−p)ρ + p·I/2 with p = 2(1 − F).
pub fn depolarizing_1q(f_op: f64, dim: usize) -> Result<KrausChannel> {
    if !(0.5..=1.0).contains(&f_op) {
        return Err(Error::param("f_op", f_op, "[0.5, 1]"));
    }
    if f_op == 1.0 {
        return Ok(KrausChannel::identity(vec![dim]));
    }
    let p = 2.0 * (1.0 - f_op);
    let paulis = embedded_paulis(dim);
    let ops = paulis
        .iter()
        .enumerate()
        .map(|(k, pm)| {
            let w = if k == 0 { 1.0 - 0.75 * p } else { p / 4.0 };
            pm * c(w.sqrt())
        })
        .collect();
    KrausChannel::new(ops, vec![dim], ChannelKind::TracePreserving)
}

/// Two-qubit depolarization with average gate fidelity `f_op`.
///
/// ρ → (1−p)ρ + p·I/4 has entanglement fidelity 1 − 15p/16, and with
/// F_avg = (d·F_e + 1)/(d + 1) for d = 4 this gives F_avg = 1 − 3p/4, i.e.
/// p = 4(1 − F_op)/3. F_op = 1/4 is the fully depolarizing map.
pub fn depolarizing_2q(f_op: f64, dims: [usize; 2]) -> Result<KrausChannel> {
    if !(0.25..=1.0).contains(&f_op) {
        return Err(Error::param("f_op", f_op, "[0.25, 1]"));
    }
    if f_op == 1.0 {
        return Ok(KrausChannel::identity(dims.to_vec()));
    }
    let p = 4.0 * (1.0 - f_op) / 3.0;
    let pa = embedded_paulis(dims[0]);
    let pb = embedded_paulis(dims[1]);
    let mut ops = Vec::with_capacity(16);
    for (a, ma) in pa.iter().enumerate() {
        for (b, mb) in pb.iter().enumerate() {
            let w = if a == 0 && b == 0 {
                1.0 - 15.0 * p / 16.0
            } else {
                p / 16.0
            };
            ops.push(ma.kronecker(mb) * c(w.sqrt()));
        }
    }
    KrausChannel::new(ops, dims.to_vec(), ChannelKind::TracePreserving)
}

/// Classical bit flip of the qubit block with probability `q`.
pub fn bit_flip(q: f64, dim: usize) -> Result<KrausChannel> {
    check_unit("q", q)?;
    if q == 0.0 {
        return Ok(KrausChannel::identity(vec![dim]));
    }
    let [id, x, _, _] = embedded_paulis(dim);
    KrausChannel::new(
        vec![id * c((1.0 - q).sqrt()), x * c(q.sqrt())],
        vec![dim],
        ChannelKind::TracePreserving,
    )
}

/// Diagonal projector keeping the basis states for which `accept` holds.
pub fn projector(dims: Vec<usize>, accept: impl Fn(&[usize]) -> bool) -> Result<KrausChannel> {
    let n: usize = dims.iter().product();
    let mut op = CMatrix::zeros(n, n);
    let mut levels = vec![0; dims.len()];
    for i in 0..n {
        let mut rem = i;
        for m in (0..dims.len()).rev() {
            levels[m] = rem % dims[m];
            rem /= dims[m];
        }
        if accept(&levels) {
            op[(i, i)] = c(1.0);
        }
    }
    KrausChannel::new(vec![op], dims, ChannelKind::TraceDecreasing)
}

/// {P₀₁, |1⟩⟨n| for n ≥ 2}: moves every level above one into |1⟩.
pub fn bin_to_qubit(dim: usize) -> Result<KrausChannel> {
    let mut ops = Vec::with_capacity(dim - 1);
    let mut low = CMatrix::zeros(dim, dim);
    low[(0, 0)] = c(1.0);
    low[(1, 1)] = c(1.0);
    ops.push(low);
    for n in 2..dim {
        let mut op = CMatrix::zeros(dim, dim);
        op[(1, n)] = c(1.0);
        ops.push(op);
    }
    KrausChannel::new(ops, vec![dim], ChannelKind::TracePreserving)
}

impl KrausChannel {
    pub(crate) fn bin_to_qubit(dim: usize) -> Result<Self> {
        bin_to_qubit(dim)
    }
}

/// exp(iφ a†a).
pub fn phase_shift(phi: f64, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, phi * i as f64)
        } else {
            zero()
        }
    })
}

/// (−1)^{a†a}: the local π phase, equal to Pauli Z on the qubit block.
pub fn parity(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            zero()
        } else if i % 2 == 0 {
            c(1.0)
        } else {
            c(-1.0)
        }
    })
}

/// CNOT on the qubit blocks of (control, target); identity elsewhere.
pub fn cnot(dims: [usize; 2]) -> CMatrix {
    let [dc, dt] = dims;
    let n = dc * dt;
    let mut u = CMatrix::zeros(n, n);
    for ctrl in 0..dc {
        for tgt in 0..dt {
            let out_t = if ctrl == 1 && tgt < 2 { 1 - tgt } else { tgt };
            u[(ctrl * dt + out_t, ctrl * dt + tgt)] = c(1.0);
        }
    }
    u
}

/// Balanced beamsplitter on two modes of `dim` levels each:
/// a† → (c† + d†)/√2, b† → (−c† + d†)/√2.
///
/// It is exact on every input with total photon number ≤ dim − 1 and acts as
/// the identity on the remaining (unrepresentable) number sectors.
pub fn beamsplitter(dim: usize) -> CMatrix {
    let n = dim * dim;
    let mut u = CMatrix::zeros(n, n);
    for j in 0..dim {
        for k in 0..dim {
            let col = j * dim + k;
            let total = j + k;
            if total > dim - 1 {
                u[(col, col)] = c(1.0);
                continue;
            }
            let norm = (factorial(j) * factorial(k)).sqrt() * 2f64.powf(total as f64 / 2.0);
            for p in 0..=j {
                for q in 0..=k {
                    let up = p + q;
                    let vp = total - up;
                    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                    let amp = binomial(j, p)
                        * binomial(k, q)
                        * sign
                        * (factorial(up) * factorial(vp)).sqrt()
                        / norm;
                    u[(up * dim + vp, col)] += c(amp);
                }
            }
        }
    }
    u
}
