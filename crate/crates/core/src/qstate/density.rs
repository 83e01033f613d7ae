use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::channel::KrausChannel;
use super::space::{ModeRole, ModeSpace};
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Maximum elementwise |ρ − ρ†| accepted when wrapping a raw matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues down to this value are clipped instead of rejected.
pub const PSD_TOL: f64 = 1e-9;
/// Eigenvalues closer to zero than this are treated as round-off and left alone.
const PSD_NOISE: f64 = 1e-13;

static PSD_CLIPS: AtomicUsize = AtomicUsize::new(0);

/// Number of times [`DensityMatrix::sanitized`] had to clip a small negative
/// eigenvalue since process start.
pub fn psd_clip_count() -> usize {
    PSD_CLIPS.load(Ordering::Relaxed)
}

/// Density operator over an ordered list of truncated modes.
///
/// Values are immutable: every operation returns a new matrix. States produced
/// by trace-decreasing channels are left unnormalized until
/// [`DensityMatrix::normalized`] is called, so the trace doubles as the
/// post-selection probability.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: ModeSpace,
    data: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking its shape and Hermiticity.
    pub fn from_matrix(space: ModeSpace, data: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.nrows().max(data.ncols()),
            });
        }
        let rho = Self { space, data };
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::Tolerance(format!(
                "matrix is not Hermitian (max |ρ − ρ†| = {herm:.3e})"
            )));
        }
        Ok(rho)
    }

    /// |ψ⟩⟨ψ| for the given amplitudes (not renormalized).
    pub fn from_ket(space: ModeSpace, amplitudes: &[Complex64]) -> Result<Self> {
        let n = space.total_dim();
        if amplitudes.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: amplitudes.len(),
            });
        }
        let data = CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj());
        Ok(Self { space, data })
    }

    /// Product Fock state with one occupation number per mode.
    pub fn fock_product(space: ModeSpace, levels: &[usize]) -> Result<Self> {
        if levels.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: levels.len(),
            });
        }
        for (&n, &d) in levels.iter().zip(space.dims()) {
            if n >= d {
                return Err(Error::Truncation {
                    dim: d,
                    reason: format!("Fock level {n} is not representable"),
                });
            }
        }
        let i = space.index_of(levels);
        let n = space.total_dim();
        let mut data = CMatrix::zeros(n, n);
        data[(i, i)] = Complex64::new(1.0, 0.0);
        Ok(Self { space, data })
    }

    /// Single-mode Fock state |n⟩⟨n|.
    pub fn fock(dim: usize, n: usize, role: ModeRole) -> Result<Self> {
        Self::fock_product(ModeSpace::single(dim, role)?, &[n])
    }

    /// Single-mode thermal state with mean occupancy `nbar`, truncated and
    /// renormalized.
    pub fn thermal(dim: usize, nbar: f64, role: ModeRole) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", nbar, "[0, inf)"));
        }
        let space = ModeSpace::single(dim, role)?;
        let ratio = nbar / (1.0 + nbar);
        let weights: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
        let norm: f64 = weights.iter().sum();
        let data = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(weights[i] / norm, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self { space, data })
    }

    pub fn maximally_mixed(space: ModeSpace) -> Self {
        let n = space.total_dim();
        let data = CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0);
        Self { space, data }
    }

    /// (|01⟩ − |10⟩)/√2 on two qubits.
    pub fn psi_minus() -> Self {
        let mut data = CMatrix::zeros(4, 4);
        data[(1, 1)] = Complex64::new(0.5, 0.0);
        data[(2, 2)] = Complex64::new(0.5, 0.0);
        data[(1, 2)] = Complex64::new(-0.5, 0.0);
        data[(2, 1)] = Complex64::new(-0.5, 0.0);
        Self {
            space: ModeSpace::qubits(2),
            data,
        }
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Diagonal entry ⟨levels|ρ|levels⟩.
    pub fn probability(&self, levels: &[usize]) -> f64 {
        let i = self.space.index_of(levels);
        self.data[(i, i)].re
    }

    /// Marginal probability of finding `mode` in Fock level `level`.
    pub fn population(&self, mode: usize, level: usize) -> f64 {
        (0..self.dim())
            .filter(|&i| self.space.digit(i, mode) == level)
            .map(|i| self.data[(i, i)].re)
            .sum()
    }

    /// ⟨a†a⟩ of one mode.
    pub fn mean_occupation(&self, mode: usize) -> f64 {
        (0..self.dim())
            .map(|i| self.space.digit(i, mode) as f64 * self.data[(i, i)].re)
            .sum()
    }

    /// Largest elementwise modulus of the difference of two states on the
    /// same space; `inf` when the spaces differ.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.space.dims() != other.space.dims() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            data: &self.data * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &DensityMatrix) -> Result<Self> {
        if self.space.dims() != other.space.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            space: self.space.clone(),
            data: &self.data + &other.data,
        })
    }

    /// Returns the state divided by its trace together with that trace.
    pub fn normalized(&self) -> Result<(Self, f64)> {
        let tr = self.trace();
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::Tolerance(format!(
                "cannot normalize a state with trace {tr:.3e}"
            )));
        }
        Ok((self.scaled(1.0 / tr), tr))
    }

    /// Kronecker product; the mode list of `other` is appended.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let space = self.space.concat(&other.space)?;
        Ok(Self {
            space,
            data: self.data.kronecker(&other.data),
        })
    }

    /// ρ' = Σ K ρ K† with the channel embedded on `targets` (in order).
    pub fn apply(&self, channel: &KrausChannel, targets: &[usize]) -> Result<Self> {
        let emb = Embedding::new(&self.space, targets, channel.dims())?;
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for rows in channel.sparse_rows() {
            let left = emb.left_multiply(rows, &self.data);
            let both = emb.left_multiply(rows, &left.adjoint());
            out += both.adjoint();
        }
        Ok(Self {
            space: self.space.clone(),
            data: out,
        })
    }

    /// U ρ U† with `u` acting on `targets`.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<Self> {
        let dims: Vec<usize> = targets
            .iter()
            .map(|&t| self.space.dims().get(t).copied().unwrap_or(0))
            .collect();
        self.space.check_indices(targets)?;
        let channel = KrausChannel::unitary(u.clone(), dims)?;
        self.apply(&channel, targets)
    }

    /// Reduced state over `keep`, with modes in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Config(
                "partial trace must keep at least one mode".into(),
            ));
        }
        self.space.check_indices(keep)?;
        let identity: Vec<usize> = (0..self.space.len()).collect();
        if keep == identity.as_slice() {
            return Ok(self.clone());
        }
        let strides = self.space.strides();
        let traced: Vec<usize> = identity
            .iter()
            .copied()
            .filter(|m| !keep.contains(m))
            .collect();
        let kept_space = self.space.select(keep)?;
        let traced_space = self.space.select(&traced);
        let keep_off = offsets(&kept_space, keep, &strides);
        let trace_off = match traced_space {
            Ok(ts) => offsets(&ts, &traced, &strides),
            Err(_) => vec![0],
        };
        let m = kept_space.total_dim();
        let data = CMatrix::from_fn(m, m, |a, b| {
            trace_off
                .iter()
                .map(|&r| self.data[(keep_off[a] + r, keep_off[b] + r)])
                .sum()
        });
        Ok(Self {
            space: kept_space,
            data,
        })
    }

    /// Reorders the modes: new mode `j` is old mode `order[j]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.space.len() {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                found: order.len(),
            });
        }
        self.space.check_indices(order)?;
        let new_space = self.space.select(order)?;
        let map = offsets(&new_space, order, &self.space.strides());
        let n = self.dim();
        let data = CMatrix::from_fn(n, n, |i, j| self.data[(map[i], map[j])]);
        Ok(Self {
            space: new_space,
            data,
        })
    }

    /// Zero-pads `mode` up to `dim` levels (exact embedding).
    pub fn pad_mode(&self, mode: usize, dim: usize) -> Result<Self> {
        self.space.check_indices(&[mode])?;
        let old = self.space.dims()[mode];
        if dim < old {
            return Err(Error::Truncation {
                dim,
                reason: format!("cannot pad a {old}-level mode down"),
            });
        }
        let new_space = self.space.with_dim(mode, dim)?;
        let n_old = self.dim();
        let map: Vec<usize> = (0..n_old)
            .map(|i| {
                let levels: Vec<usize> = (0..self.space.len())
                    .map(|m| self.space.digit(i, m))
                    .collect();
                new_space.index_of(&levels)
            })
            .collect();
        let n_new = new_space.total_dim();
        let mut data = CMatrix::zeros(n_new, n_new);
        for j in 0..n_old {
            for i in 0..n_old {
                data[(map[i], map[j])] = self.data[(i, j)];
            }
        }
        Ok(Self {
            space: new_space,
            data,
        })
    }

    /// Maps every mode onto a qubit: levels ≥ 2 are binned into |1⟩ by the
    /// trace-preserving channel {P₀₁, |1⟩⟨n| (n ≥ 2)}, then the {0,1} block
    /// is kept. Roles are preserved.
    pub fn binned_to_qubits(&self) -> Result<Self> {
        let mut rho = self.clone();
        for mode in 0..self.space.len() {
            let d = self.space.dims()[mode];
            if d > 2 {
                rho = rho.apply(&KrausChannel::bin_to_qubit(d)?, &[mode])?;
            }
        }
        let qubit_space = ModeSpace::new(vec![2; self.space.len()], self.space.roles().to_vec())?;
        let idx: Vec<usize> = (0..qubit_space.total_dim())
            .map(|q| {
                let levels: Vec<usize> = (0..qubit_space.len())
                    .map(|m| qubit_space.digit(q, m))
                    .collect();
                self.space.index_of(&levels)
            })
            .collect();
        let m = idx.len();
        let data = CMatrix::from_fn(m, m, |a, b| rho.data[(idx[a], idx[b])]);
        Ok(Self {
            space: qubit_space,
            data,
        })
    }

    /// Enforces Hermiticity and positivity.
    ///
    /// Negative eigenvalues within [`PSD_TOL`] are zeroed and the state is
    /// renormalized to its previous trace (counted by [`psd_clip_count`]);
    /// anything more negative is an error.
    pub fn sanitized(&self) -> Result<Self> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::Tolerance(format!(
                "state is not Hermitian (max |ρ − ρ†| = {herm:.3e})"
            )));
        }
        let sym = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym.clone());
        let min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min >= -PSD_NOISE {
            return Ok(Self {
                space: self.space.clone(),
                data: sym,
            });
        }
        if min < -PSD_TOL {
            return Err(Error::Tolerance(format!(
                "state has eigenvalue {min:.3e} below the positivity tolerance"
            )));
        }
        PSD_CLIPS.fetch_add(1, Ordering::Relaxed);
        log::warn!("clipping negative eigenvalue {min:.3e}");
        let tr = self.trace();
        let clipped = eig.eigenvalues.map(|v| v.max(0.0));
        let total: f64 = clipped.iter().sum();
        let vecs = &eig.eigenvectors;
        let diag = CMatrix::from_diagonal(&clipped.map(|v| Complex64::new(v * tr / total, 0.0)));
        let data = vecs * diag * vecs.adjoint();
        Ok(Self {
            space: self.space.clone(),
            data,
        })
    }
}

/// Offsets into a parent space for each basis index of `sub`, where sub mode
/// `k` is parent mode `modes[k]`.
fn offsets(sub: &ModeSpace, modes: &[usize], parent_strides: &[usize]) -> Vec<usize> {
    (0..sub.total_dim())
        .map(|i| {
            modes
                .iter()
                .enumerate()
                .map(|(k, &m)| sub.digit(i, k) * parent_strides[m])
                .sum()
        })
        .collect()
}

/// Index bookkeeping for applying an operator to a subset of modes without
/// materialising the full Kronecker product.
struct Embedding {
    /// Target-space row index of every full basis index.
    target_index: Vec<usize>,
    /// Full index with the target digits zeroed.
    base: Vec<usize>,
    /// Full-space offset of every target-space basis index.
    offset: Vec<usize>,
}

impl Embedding {
    fn new(space: &ModeSpace, targets: &[usize], op_dims: &[usize]) -> Result<Self> {
        space.check_indices(targets)?;
        if targets.is_empty() {
            return Err(Error::Config("channel applied to no modes".into()));
        }
        let target_dims: Vec<usize> = targets.iter().map(|&t| space.dims()[t]).collect();
        if target_dims != op_dims {
            return Err(Error::DimensionMismatch {
                expected: target_dims.iter().product(),
                found: op_dims.iter().product(),
            });
        }
        let strides = space.strides();
        let sub = ModeSpace::new(
            target_dims,
            targets.iter().map(|&t| space.roles()[t]).collect(),
        )?;
        let offset = offsets(&sub, targets, &strides);
        let n = space.total_dim();
        let mut target_index = Vec::with_capacity(n);
        let mut base = Vec::with_capacity(n);
        for i in 0..n {
            let mut t = 0;
            let mut b = i;
            for &m in targets {
                let digit = (i / strides[m]) % space.dims()[m];
                t = t * space.dims()[m] + digit;
                b -= digit * strides[m];
            }
            target_index.push(t);
            base.push(b);
        }
        Ok(Self {
            target_index,
            base,
            offset,
        })
    }

    /// (K ⊗ I) · m, with `rows[r]` listing the non-zero entries of row `r` of K.
    fn left_multiply(&self, rows: &[Vec<(usize, Complex64)>], m: &CMatrix) -> CMatrix {
        let n = m.nrows();
        let mut out = CMatrix::zeros(n, n);
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for col in 0..n {
            let s = &src[col * n..(col + 1) * n];
            let d = &mut dst[col * n..(col + 1) * n];
            for i in 0..n {
                let base = self.base[i];
                let mut acc = Complex64::new(0.0, 0.0);
                for &(t, v) in &rows[self.target_index[i]] {
                    acc += v * s[base + self.offset[t]];
                }
                d[i] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::channel;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_of_fock_states_is_kronecker() {
        let a = DensityMatrix::fock(2, 0, ModeRole::Qubit).unwrap();
        let b = DensityMatrix::fock(2, 1, ModeRole::Qubit).unwrap();
        let ab = a.tensor(&b).unwrap();
        let diag: Vec<f64> = ab.matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ab.space().dims(), &[2, 2]);
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        let rho = DensityMatrix::psi_minus()
            .tensor(&DensityMatrix::maximally_mixed(ModeSpace::qubits(1)))
            .unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_of_thermal_states_adds_occupations() {
        let a = DensityMatrix::thermal(12, 0.1, ModeRole::Optical).unwrap();
        let ab = a.tensor(&a).unwrap();
        let total = ab.mean_occupation(0) + ab.mean_occupation(1);
        // truncated geometric with ratio 1/11: the tail beyond 11 is ~1e-12
        assert!((total - 0.2).abs() < 1e-10, "{total}");
    }

    #[test]
    fn tensor_respects_dimension_cap() {
        let big = DensityMatrix::maximally_mixed(
            ModeSpace::new(vec![64, 64], vec![ModeRole::Optical; 2]).unwrap(),
        );
        let q = DensityMatrix::maximally_mixed(ModeSpace::qubits(1));
        assert!(matches!(big.tensor(&q), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn identity_channel_is_bit_exact() {
        let rho = DensityMatrix::psi_minus()
            .apply(&channel::amplitude_damping(0.3, 2).unwrap(), &[0])
            .unwrap();
        let id = KrausChannel::identity(vec![2]);
        assert_eq!(rho.apply(&id, &[1]).unwrap(), rho);
    }

    #[test]
    fn apply_checks_targets() {
        let rho = DensityMatrix::psi_minus();
        let ch = channel::loss_channel(0.5, 2).unwrap();
        assert!(matches!(rho.apply(&ch, &[2]), Err(Error::ModeIndex { .. })));
        let ch3 = channel::loss_channel(0.5, 3).unwrap();
        assert!(matches!(
            rho.apply(&ch3, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_psi_minus_is_maximally_mixed() {
        let red = DensityMatrix::psi_minus().partial_trace(&[1]).unwrap();
        let expected = DensityMatrix::maximally_mixed(ModeSpace::qubits(1));
        assert!(red.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_keeping_everything_is_identity() {
        let rho = DensityMatrix::thermal(3, 0.2, ModeRole::Microwave)
            .unwrap()
            .tensor(&DensityMatrix::psi_minus())
            .unwrap();
        assert_eq!(rho.partial_trace(&[0, 1, 2]).unwrap(), rho);
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn partial_trace_of_conversion_emission_state() {
        // sqrt(1-p)|1,0> + sqrt(p)|0,1> over (microwave, optical), dim 3 each
        let p: f64 = 0.25;
        let space =
            ModeSpace::new(vec![3, 3], vec![ModeRole::Microwave, ModeRole::Optical]).unwrap();
        let mut amps = vec![c(0.0); 9];
        amps[space.index_of(&[1, 0])] = c((1.0 - p).sqrt());
        amps[space.index_of(&[0, 1])] = c(p.sqrt());
        let rho = DensityMatrix::from_ket(space, &amps).unwrap();
        let mw = rho.partial_trace(&[0]).unwrap();
        assert!((mw.matrix()[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!((mw.matrix()[(1, 1)].re - 0.75).abs() < 1e-15);
        assert!(mw.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn permute_swaps_modes() {
        let a = DensityMatrix::fock(3, 2, ModeRole::Microwave).unwrap();
        let b = DensityMatrix::fock(2, 1, ModeRole::Qubit).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ba = ab.permute(&[1, 0]).unwrap();
        assert_eq!(ba, b.tensor(&a).unwrap());
    }

    #[test]
    fn padding_is_an_exact_embedding() {
        let rho = DensityMatrix::thermal(3, 0.3, ModeRole::Optical).unwrap();
        let padded = rho.pad_mode(0, 5).unwrap();
        assert_eq!(padded.dim(), 5);
        assert_eq!(padded.matrix()[(2, 2)], rho.matrix()[(2, 2)]);
        assert_eq!(padded.matrix()[(4, 4)], c(0.0));
    }

    #[test]
    fn binning_moves_upper_levels_into_one() {
        let rho = DensityMatrix::thermal(4, 0.5, ModeRole::Microwave).unwrap();
        let q = rho.binned_to_qubits().unwrap();
        assert_eq!(q.space().dims(), &[2]);
        let p0 = rho.matrix()[(0, 0)].re;
        assert!((q.matrix()[(0, 0)].re - p0).abs() < 1e-15);
        assert!((q.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sanitize_clips_tiny_negative_eigenvalues() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0 + 5e-10);
        m[(1, 1)] = c(-5e-10);
        let rho = DensityMatrix::from_matrix(ModeSpace::qubits(1), m.clone()).unwrap();
        let before = psd_clip_count();
        let clean = rho.sanitized().unwrap();
        assert!(psd_clip_count() > before);
        assert!(clean.min_eigenvalue() >= 0.0);
        assert!((clean.trace() - 1.0).abs() < 1e-15);

        m[(0, 0)] = c(1.0 + 1e-6);
        m[(1, 1)] = c(-1e-6);
        let bad = DensityMatrix::from_matrix(ModeSpace::qubits(1), m).unwrap();
        assert!(matches!(bad.sanitized(), Err(Error::Tolerance(_))));
    }

    #[test]
    fn from_matrix_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.5);
        assert!(DensityMatrix::from_matrix(ModeSpace::qubits(1), m).is_err());
    }
}
