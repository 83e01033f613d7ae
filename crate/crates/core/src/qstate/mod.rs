//! Truncated-Fock density-matrix algebra.

pub mod channel;
mod density;
mod metrics;
mod space;

pub use channel::{ChannelKind, KrausChannel};
pub use density::{psd_clip_count, CMatrix, DensityMatrix, HERMITIAN_TOL, PSD_TOL};
pub use metrics::{fidelity_psi_minus, log_negativity, partial_transpose};
pub use space::{ModeRole, ModeSpace, DEFAULT_DIMENSION_CAP};

pub use num_complex::Complex64;
