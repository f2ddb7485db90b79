//! Simulation of a two-level system driven by a linearly chirped field.
//!
//! The state is a Bloch vector evolving under `dr/dt = h(t) × r`. Four
//! backends are available: direct integration of the full rotating-frame
//! Hamiltonian, the rotating-wave approximation, and stroboscopic
//! propagation with first- and second-order effective Hamiltonians built on
//! the instantaneous drive periods.

// `!(x > 0.0)` is used throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod hamiltonians;
pub mod integrator;
pub mod propagators;
pub mod protocol;
pub mod su2;

pub use error::{Error, Result};
pub use hamiltonians::{EffectiveHamiltonian, MagnusOrder};
pub use integrator::IntegratorConfig;
pub use propagators::{Method, StroboscopicTrace, TraceRecord};
pub use protocol::{ChirpDrive, PeriodGrid, TlsParams};
pub use su2::{AxisAngle, BlochVector, PauliVector, RotationMatrix};
