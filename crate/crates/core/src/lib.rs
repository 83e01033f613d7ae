//! Density-matrix simulation of heralded remote entanglement between two
//! superconducting bosonic modules linked through microwave-to-optical
//! transducers and an optical fiber.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`]: truncated-Fock density matrices, Kraus channels and
//!   entanglement metrics.
//! * [`device`]: Brillouin transducer model and the two emission schemes
//!   (coherent conversion and spontaneous parametric down-conversion).
//! * [`herald`]: fiber link, balanced beamsplitter interference and
//!   single-click heralding.
//! * [`register`]: memory idling, noisy CNOT and computational-basis readout.
//! * [`purify`]: asymmetric entanglement pumping with analytic and Monte
//!   Carlo evaluation.
//! * [`config`], [`sweep`], [`calibrate`]: scenario configuration, parameter
//!   sweeps and heating-model calibration used by the command-line tool.

pub mod calibrate;
pub mod config;
pub mod device;
mod error;
pub mod herald;
pub mod purify;
pub mod qstate;
pub mod register;
pub mod sweep;

pub use error::{Error, ErrorKind, Result};

pub use config::{Provenance, ScenarioConfig};
pub use device::{EmissionState, HeatTarget, HeatingModel, Scheme, TransducerParams};
pub use herald::{Geometry, HeraldOutcome, LinkParams};
pub use purify::{PumpReport, PumpSchedule, RoundReport};
pub use qstate::{DensityMatrix, KrausChannel, ModeRole, ModeSpace};
pub use register::{MemoryKind, MemoryParams};
pub use sweep::ResultRow;
