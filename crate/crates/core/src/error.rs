use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpec(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation: predicted leakage {leakage:.3e} exceeds {limit:.1e} ({context})")]
    Truncation {
        leakage: f64,
        limit: f64,
        context: String,
    },

    #[error("matrix exponential did not converge: {0}")]
    Convergence(String),

    #[error("qubit level index {index} out of range for {levels}-level qubit")]
    Index { index: usize, levels: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("critical point: xi = {xi} (NP/SP analytics diverge at xi = 1)")]
    CriticalPoint { xi: f64 },

    #[error("dispersive condition violated: |f - omega_p| = {detuning:.4} rad/us < {limit:.4} rad/us")]
    DispersiveViolation { detuning: f64, limit: f64 },

    #[error("step size underflow at t = {t} us (dt = {dt:.3e})")]
    StepSizeUnderflow { t: f64, dt: f64 },

    #[error("photon distribution not normalized (sum = {sum})")]
    Distribution { sum: f64 },

    #[error("photon-number fit diverged: {0}")]
    FitDivergence(String),

    #[error("photon-number fit ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("Wigner grids do not match: {0}")]
    GridMismatch(String),

    #[error("resonator block is empty (trace {trace:.3e})")]
    EmptyBlock { trace: f64 },

    #[error("phase-space components not separable: annulus mass {annulus:.3} > {limit}")]
    NotSeparable { annulus: f64, limit: f64 },

    #[error("reconstruction did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
