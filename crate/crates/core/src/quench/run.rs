use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{
    evolve_lindblad, IntegratorDiagnostics, IntegratorOptions, OutputPlan, Stepping,
    TimeDependentHamiltonian, TrajectoryRecord,
};
use super::lindblad::{secular_channels, LindbladSpec};
use super::schedule::QuenchSchedule;
use crate::error::Result;
use crate::hilbert::{
    annihilation_joint, cplx, identity, kron, number_joint, sigma_x, sigma_z, ComplexOperator,
    HilbertSpec, QuantumState,
};
use crate::model::{
    stark_corrections, DeviceParams, HamiltonianLevel, RotatingFrameModel,
    DEFAULT_SIDEBAND_CUTOFF,
};

/// Time of the tomography snapshot, μs.
pub const TOMOGRAPHY_TIME: f64 = 1.946;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchOptions {
    pub level: HamiltonianLevel,
    pub n_fock: usize,
    /// Integration step; `None` picks 1 ns for `Rabi`, 0.1 ns otherwise.
    pub dt: Option<f64>,
    pub stepping: Stepping,
    pub error_check_every: usize,
    /// Observable sampling interval, μs.
    pub output_interval: f64,
    /// Extra snapshot times (μs) with optional labels; the tomography time
    /// is always added when it lies inside the ramp.
    pub snapshots: Vec<(f64, Option<String>)>,
    pub sideband_cutoff: i32,
    /// For the `Rabi` level, carry the bare-qubit channels into the
    /// `B₀`-precessing frame (secular parts) instead of applying them to the
    /// dressed qubit unchanged.
    pub dressed_noise: bool,
    /// For the `ThreeLevel` level, lower δ by `S₂/2` so the dispersive pull
    /// of `|f⟩` on the resonator does not swamp the programmed detuning.
    #[serde(default = "default_true")]
    pub stark_compensation: bool,
    /// End time; defaults to the schedule's `t_f`.
    pub t_end: Option<f64>,
}

impl QuenchOptions {
    pub fn new(level: HamiltonianLevel) -> Self {
        Self {
            level,
            n_fock: 40,
            dt: None,
            stepping: Stepping::Fixed,
            error_check_every: 100,
            output_interval: 0.01,
            snapshots: Vec::new(),
            sideband_cutoff: DEFAULT_SIDEBAND_CUTOFF,
            dressed_noise: true,
            stark_compensation: true,
            t_end: None,
        }
    }

    pub fn effective_dt(&self) -> f64 {
        self.dt.unwrap_or(match self.level {
            HamiltonianLevel::Rabi => 1e-3,
            _ => 1e-4,
        })
    }
}

fn default_true() -> bool {
    true
}

impl Default for QuenchOptions {
    fn default() -> Self {
        Self::new(HamiltonianLevel::Rabi)
    }
}

/// Everything needed to reproduce a quench run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuenchManifest {
    pub level: HamiltonianLevel,
    pub device: DeviceParams,
    pub schedule: QuenchSchedule,
    pub lindblad: LindbladSpec,
    pub options: QuenchOptions,
    pub dt: f64,
    pub diagnostics: IntegratorDiagnostics,
}

#[derive(Debug, Clone)]
pub struct QuenchRun {
    pub record: TrajectoryRecord,
    pub manifest: QuenchManifest,
}

struct RabiDrive {
    terms: [ComplexOperator; 3],
    schedule: QuenchSchedule,
}

impl TimeDependentHamiltonian for RabiDrive {
    fn terms(&self) -> &[ComplexOperator] {
        &self.terms
    }

    fn coefficients(&self, t: f64, out: &mut Vec<Complex64>) {
        let v = self.schedule.values(t);
        out.clear();
        out.extend([cplx(v.omega, 0.0), cplx(v.delta, 0.0), cplx(self.schedule.eta, 0.0)]);
    }
}

struct RotatingDrive {
    model: RotatingFrameModel,
    schedule: QuenchSchedule,
}

impl TimeDependentHamiltonian for RotatingDrive {
    fn terms(&self) -> &[ComplexOperator] {
        self.model.terms()
    }

    fn coefficients(&self, t: f64, out: &mut Vec<Complex64>) {
        let v = self.schedule.values(t);
        // Ω = ε₂/2 fixes the slow-modulation amplitude.
        self.model.coefficients(t, 2.0 * v.omega, v.delta, out);
    }
}

/// Spin-½ rotation `exp(iφσ_x/2)` on the qubit factor.
fn x_rotation(spec: &HilbertSpec, phi: f64) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    let mut u = identity(l);
    let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
    u[(0, 0)] = cplx(c, 0.0);
    u[(1, 1)] = cplx(c, 0.0);
    u[(0, 1)] = cplx(0.0, s);
    u[(1, 0)] = cplx(0.0, s);
    kron(&u, &identity(spec.n_fock()))
}

/// Runs the ramp from `initial` (default `|g⟩|0⟩`) and reports observables
/// in the frame of the effective Rabi Hamiltonian.
///
/// For the `Rabi` level the decoherence channels are first carried into
/// the frame precessing at `B₀` and reduced to their secular parts, so a
/// bare-qubit dephasing also appears as slow bit flips of the dressed qubit.
/// The full levels integrate in the bare rotating frame, where the channels
/// act directly, and the snapshots are rotated by `exp(iB₀σ_x t/2)`.
pub fn run_quench(
    dev: &DeviceParams,
    schedule: &QuenchSchedule,
    lindblad: &LindbladSpec,
    options: &QuenchOptions,
    initial: Option<&QuantumState>,
) -> Result<QuenchRun> {
    dev.validate()?;
    schedule.validate()?;
    lindblad.validate()?;
    let spec = HilbertSpec::new(options.n_fock, options.level.qubit_levels())?;
    let rho0 = match initial {
        Some(s) => s.clone(),
        None => QuantumState::basis(spec, 0, 0)?,
    };
    let t_end = options.t_end.unwrap_or(schedule.t_f);
    let mut plan = OutputPlan::uniform(t_end, options.output_interval);
    if TOMOGRAPHY_TIME <= t_end {
        plan = plan.with_snapshot(TOMOGRAPHY_TIME, Some("tomography-time"));
    }
    for (t, label) in &options.snapshots {
        plan = plan.with_snapshot(*t, label.as_deref());
    }
    plan = plan.with_snapshot(t_end, Some("final"));
    let dt = options.effective_dt();
    let iopts = IntegratorOptions {
        dt,
        stepping: options.stepping,
        error_check_every: options.error_check_every,
        ..IntegratorOptions::fixed(dt)
    };
    let lab_channels = lindblad.channels(&spec);

    let record = match options.level {
        HamiltonianLevel::Rabi => {
            let a = annihilation_joint(&spec);
            let drive = RabiDrive {
                terms: [
                    sigma_z(&spec) * cplx(0.5, 0.0),
                    number_joint(&spec),
                    sigma_x(&spec) * (&a + a.adjoint()),
                ],
                schedule: *schedule,
            };
            let channels = if options.dressed_noise {
                secular_channels(&lab_channels, |phi| x_rotation(&spec, phi))
            } else {
                lab_channels
            };
            evolve_lindblad(&drive, &channels, &rho0, &plan, &iopts, None)?
        }
        HamiltonianLevel::Rotating | HamiltonianLevel::ThreeLevel => {
            let model = RotatingFrameModel::new(spec, dev, options.sideband_cutoff)?;
            let b0 = model.b0();
            let mut schedule = *schedule;
            if options.level == HamiltonianLevel::ThreeLevel && options.stark_compensation {
                schedule.delta_offset -= 0.5 * stark_corrections(dev).s2;
            }
            let drive = RotatingDrive { model, schedule };
            let frame = move |t: f64| x_rotation(&spec, b0 * t);
            evolve_lindblad(&drive, &lab_channels, &rho0, &plan, &iopts, Some(&frame))?
        }
    };
    let manifest = QuenchManifest {
        level: options.level,
        device: *dev,
        schedule: *schedule,
        lindblad: *lindblad,
        options: options.clone(),
        dt,
        diagnostics: record.diagnostics.clone(),
    };
    Ok(QuenchRun { record, manifest })
}
