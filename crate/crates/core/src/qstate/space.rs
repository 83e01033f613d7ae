use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default cap on the total Hilbert-space dimension of a [`ModeSpace`].
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Physical role of a truncated mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeRole {
    Microwave,
    Optical,
    Acoustic,
    Qubit,
}

/// Ordered list of truncated modes. Mode 0 is the most significant digit of
/// the flattened basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeSpace {
    dims: Vec<usize>,
    roles: Vec<ModeRole>,
}

impl ModeSpace {
    pub fn new(dims: Vec<usize>, roles: Vec<ModeRole>) -> Result<Self> {
        Self::with_cap(dims, roles, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, roles: Vec<ModeRole>, cap: usize) -> Result<Self> {
        if dims.len() != roles.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: roles.len(),
            });
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Truncation {
                dim: d,
                reason: "every mode needs at least two levels".into(),
            });
        }
        let total = checked_product(&dims).unwrap_or(usize::MAX);
        if total > cap {
            return Err(Error::DimensionCap {
                requested: total,
                cap,
            });
        }
        Ok(Self { dims, roles })
    }

    /// A single mode of the given truncation.
    pub fn single(dim: usize, role: ModeRole) -> Result<Self> {
        Self::new(vec![dim], vec![role])
    }

    /// `count` qubit modes.
    pub fn qubits(count: usize) -> Self {
        Self {
            dims: vec![2; count],
            roles: vec![ModeRole::Qubit; count],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn roles(&self) -> &[ModeRole] {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides, one per mode.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for m in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * self.dims[m + 1];
        }
        strides
    }

    pub fn concat(&self, other: &ModeSpace) -> Result<ModeSpace> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut roles = self.roles.clone();
        roles.extend_from_slice(&other.roles);
        ModeSpace::new(dims, roles)
    }

    /// Sub-space made of the listed modes, in the listed order.
    pub fn select(&self, modes: &[usize]) -> Result<ModeSpace> {
        self.check_indices(modes)?;
        Ok(ModeSpace {
            dims: modes.iter().map(|&m| self.dims[m]).collect(),
            roles: modes.iter().map(|&m| self.roles[m]).collect(),
        })
    }

    /// Same roles with the dimension of `mode` replaced.
    pub(crate) fn with_dim(&self, mode: usize, dim: usize) -> Result<ModeSpace> {
        self.check_indices(&[mode])?;
        let mut dims = self.dims.clone();
        dims[mode] = dim;
        ModeSpace::new(dims, self.roles.clone())
    }

    /// Checks that indices are in range and pairwise distinct.
    pub fn check_indices(&self, modes: &[usize]) -> Result<()> {
        for (k, &m) in modes.iter().enumerate() {
            if m >= self.dims.len() {
                return Err(Error::ModeIndex {
                    index: m,
                    modes: self.dims.len(),
                });
            }
            if modes[..k].contains(&m) {
                return Err(Error::DuplicateMode(m));
            }
        }
        Ok(())
    }

    /// Occupation number of `mode` in the flattened basis index `index`.
    pub fn digit(&self, index: usize, mode: usize) -> usize {
        let stride: usize = self.dims[mode + 1..].iter().product();
        (index / stride) % self.dims[mode]
    }

    /// Flattened index of a multi-index (one level per mode).
    pub fn index_of(&self, levels: &[usize]) -> usize {
        debug_assert_eq!(levels.len(), self.dims.len());
        levels
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&n, &d)| acc * d + n)
    }
}

fn checked_product(dims: &[usize]) -> Option<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}
