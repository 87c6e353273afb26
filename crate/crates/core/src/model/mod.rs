//! Device parameters and every Hamiltonian of the modulated-qubit Rabi
//! simulator, from the rotating-frame sideband model down to the effective
//! Rabi Hamiltonian and its Schrieffer–Wolff low-energy limits.

mod analytics;
mod ancilla;
mod device;
mod effective;
mod hamiltonian;
mod stark;

pub use analytics::{np_sp_analytics, Branch, Phase, SwAnalytics};
pub use ancilla::{ancilla_frequency, ancilla_stark_schedule, stark_shift_at_frequency};
pub use device::{DeviceConfig, DeviceParams};
pub use effective::{effective_from_device, EffectiveParams};
pub use hamiltonian::{
    rabi_hamiltonian, rotating_frame_hamiltonian, HamiltonianLevel, RotatingFrameModel,
    DEFAULT_SIDEBAND_CUTOFF,
};
pub use stark::{stark_corrections, StarkShifts};
