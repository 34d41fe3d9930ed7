//! Fermi-Hubbard VQE toolkit.
//!
//! Builds EHV ansatz circuits for 1xLy and 2xLy Hubbard lattices, simulates
//! them on a statevector (optionally with trajectory-sampled noise),
//! optimises them with BayesMGD/MGD/SPSA and runs the error-mitigation stack
//! against exact-diagonalisation references.

pub mod circuits;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod mitigation;
pub mod model;
pub mod observables;
pub mod optim;
pub mod reference;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{LatticeSpec, Layout, SectorSpec};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
