//! Wigner-matrix tomography: the exact forward map, the rotated-basis
//! protocol for the qubit coherence, a simulated ancilla-based measurement
//! chain and density-matrix reconstruction.

mod chain;
mod protocol;
mod reconstruct;
mod signal;
mod wigner;

pub use chain::{displaced_distribution, simulate_tomography, TomographyOptions, DISPLACED_TAIL_LIMIT};
pub use protocol::{
    combine_rotated, diagonal_forward, rotated_basis_settings, BasisSetting, DiagonalMap, Outcome,
    RotatedCombination,
};
pub use reconstruct::{
    project_to_density, project_to_simplex, reconstruct_density, ReconstructionOptions,
    ReconstructionResult,
};
pub use signal::{
    default_taus, fit_photon_distribution, nyquist_photon_limit, readout_map, simulate_rabi_signal,
    PhotonFit, PhotonFitter, RabiSignal, SignalNoise, SignalSetting, DECAY_EXPONENT, MAX_CONDITION,
};
pub use wigner::{
    block_wigner, default_grid, parity_kernel, square_grid, wigner_matrix_forward, PointFailure,
    Provenance, SettingPopulations, WignerRecord, CSV_HEADER,
};
