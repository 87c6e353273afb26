//! Open-system quench dynamics: the ξ(t) ramp, decoherence channels, a
//! Lindblad integrator and the driver that ties them to a Hamiltonian level.

mod compare;
mod integrator;
mod lindblad;
mod run;
mod schedule;

pub use compare::{
    compare_models, photon_distribution, total_variation, ComparisonCase, ComparisonOptions,
    ModelComparison, COMPARISON_T_PHI,
};
pub use integrator::{
    evolve_lindblad, IntegratorDiagnostics, IntegratorOptions, OutputPlan, Snapshot,
    StaticHamiltonian, Stepping, TimeDependentHamiltonian, TrajectoryRecord,
};
pub use lindblad::{secular_channels, LindbladSpec};
pub use run::{run_quench, QuenchManifest, QuenchOptions, QuenchRun, TOMOGRAPHY_TIME};
pub use schedule::{schedules, QuenchSchedule, ScheduleValues};
