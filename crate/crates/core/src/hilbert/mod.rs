//! Dense complex linear algebra on the truncated qubit ⊗ Fock space.
//!
//! Basis ordering is qubit ⊗ resonator everywhere: the joint index of
//! `|k⟩|n⟩` is `k * n_fock + n`, with qubit levels `g = 0`, `e = 1`, `f = 2`.
//! Energies are angular frequencies in rad/μs and times are in μs.

mod bessel;
mod expm;
pub mod ops;
pub mod sparse;
mod state;

pub use bessel::{bessel_j, bessel_j_orders};
pub use expm::matrix_exp;
pub use ops::*;
pub use state::{
    assemble_blocks, hermitian_eigenvalues, min_eigenvalue, partial_transpose_qubit_matrix,
    QuantumState,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexOperator = DMatrix<Complex64>;
pub type Ket = DVector<Complex64>;

/// Converts a frequency quoted as ν/2π in MHz to rad/μs.
pub fn mhz(nu_over_2pi: f64) -> f64 {
    2.0 * std::f64::consts::PI * nu_over_2pi
}

/// Converts a frequency quoted as ν/2π in GHz to rad/μs.
pub fn ghz(nu_over_2pi: f64) -> f64 {
    mhz(1000.0 * nu_over_2pi)
}

/// Converts rad/μs back to ν/2π in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI)
}

/// Qubit basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    G,
    E,
    F,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::G => 0,
            Level::E => 1,
            Level::F => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpec {
    n_fock: usize,
    n_qubit_levels: usize,
}

impl HilbertSpec {
    pub fn new(n_fock: usize, n_qubit_levels: usize) -> Result<Self> {
        if n_fock < 2 {
            return Err(Error::InvalidSpec(format!("n_fock must be >= 2, got {n_fock}")));
        }
        if !(2..=3).contains(&n_qubit_levels) {
            return Err(Error::InvalidSpec(format!(
                "qubit must have 2 or 3 levels, got {n_qubit_levels}"
            )));
        }
        Ok(Self {
            n_fock,
            n_qubit_levels,
        })
    }

    /// Two-level qubit with `n_fock` resonator levels.
    pub fn qubit(n_fock: usize) -> Result<Self> {
        Self::new(n_fock, 2)
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    pub fn n_qubit_levels(&self) -> usize {
        self.n_qubit_levels
    }

    pub fn dim(&self) -> usize {
        self.n_fock * self.n_qubit_levels
    }

    pub fn index(&self, level: usize, n: usize) -> usize {
        level * self.n_fock + n
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level >= self.n_qubit_levels {
            Err(Error::Index {
                index: level,
                levels: self.n_qubit_levels,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for HilbertSpec {
    fn default() -> Self {
        Self {
            n_fock: 40,
            n_qubit_levels: 2,
        }
    }
}
