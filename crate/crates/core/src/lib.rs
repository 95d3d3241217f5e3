//! Simulator for the three-qubit quantum switch with independent numerical
//! cross-checks of every closed-form result it reproduces.

mod error;

pub mod qmatrix;
pub mod qstate;
pub mod qswitch;
pub mod channels;
mod dd;
pub mod entanglement;
pub mod sweep;

pub use error::{Error, Result};
pub use qmatrix::{ComplexMatrix, C64};
pub use qstate::{DensityMatrix, PureState};
