//! Simulation and analysis of the superradiant phase transition in a
//! parametrically engineered quantum Rabi model: Hamiltonians, open-system
//! quench dynamics, Wigner-matrix tomography and nonclassicality metrics.

pub mod error;
pub mod hilbert;
pub mod metrics;
pub mod model;
pub mod pool;
pub mod presets;
pub mod quench;
pub mod tomography;

pub use error::{Error, Result};
