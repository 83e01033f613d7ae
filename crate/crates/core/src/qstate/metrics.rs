use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::density::{CMatrix, DensityMatrix};
use crate::{Error, Result};

/// ⟨ψ⁻|ρ|ψ⁻⟩ with |ψ⁻⟩ = (|0,1⟩ − |1,0⟩)/√2 on the first two modes.
///
/// Modes beyond the first two are traced out. Population outside the
/// {0,1}⊗{0,1} block stays in ρ but contributes nothing.
pub fn fidelity_psi_minus(rho: &DensityMatrix) -> Result<f64> {
    let space = rho.space();
    if space.len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: space.len(),
        });
    }
    let pair = if space.len() == 2 {
        rho.clone()
    } else {
        rho.partial_trace(&[0, 1])?
    };
    let s = pair.space();
    let i01 = s.index_of(&[0, 1]);
    let i10 = s.index_of(&[1, 0]);
    let m = pair.matrix();
    let f = 0.5 * (m[(i01, i01)].re + m[(i10, i10)].re - m[(i01, i10)].re - m[(i10, i01)].re);
    Ok(f)
}

/// Partial transpose over the modes listed in `cut`.
pub fn partial_transpose(rho: &DensityMatrix, cut: &[usize]) -> Result<CMatrix> {
    let space = rho.space();
    space.check_indices(cut)?;
    let strides = space.strides();
    let n = rho.dim();
    let m = rho.matrix();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let (mut si, mut sj) = (i, j);
        for &mode in cut {
            let di = space.digit(i, mode);
            let dj = space.digit(j, mode);
            si = si - di * strides[mode] + dj * strides[mode];
            sj = sj - dj * strides[mode] + di * strides[mode];
        }
        m[(si, sj)]
    }))
}

/// Logarithmic negativity log₂‖ρ^{T_A}‖₁ for the bipartition (cut | rest),
/// evaluated on ρ/tr ρ and clamped at zero.
pub fn log_negativity(rho: &DensityMatrix, cut: &[usize]) -> Result<f64> {
    let modes = rho.space().len();
    if cut.is_empty() || cut.len() >= modes {
        return Err(Error::Config(format!(
            "bipartition {cut:?} of {modes} modes leaves one side empty"
        )));
    }
    let pt = partial_transpose(rho, cut)?;
    let herm = (&pt + pt.adjoint()) * Complex64::new(0.5, 0.0);
    let norm: f64 = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .sum();
    let tr = rho.trace();
    if !(tr > 0.0) {
        return Err(Error::Tolerance(format!(
            "log-negativity of a state with trace {tr:.3e}"
        )));
    }
    Ok((norm / tr).log2().max(0.0))
}
