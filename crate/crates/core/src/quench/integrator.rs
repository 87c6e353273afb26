//! Fixed-step (optionally adaptive) RK4 for `dρ/dt = −i[H(t), ρ] + Σ D[L]ρ`.
//!
//! The right-hand side is evaluated as `Mρ + (Mρ)† + Σ L (Lρ)†` with
//! `M = −iH − ½ΣL†L`, which needs only sparse-times-dense products and is
//! exact for Hermitian `ρ`. The state is re-symmetrized after every step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::sparse::{SlotMap, SparseOperator};
use crate::hilbert::{
    frobenius, hermitian_eigenvalues, hermitize, number_joint, parity, sigma_z, ComplexOperator,
    QuantumState,
};

/// `H(t) = Σ cᵢ(t) Oᵢ`; implementors guarantee the sum is Hermitian.
pub trait TimeDependentHamiltonian: Sync {
    fn terms(&self) -> &[ComplexOperator];
    fn coefficients(&self, t: f64, out: &mut Vec<Complex64>);
}

/// Time-independent Hamiltonian.
pub struct StaticHamiltonian {
    terms: [ComplexOperator; 1],
}

impl StaticHamiltonian {
    pub fn new(h: ComplexOperator) -> Self {
        Self { terms: [h] }
    }
}

impl TimeDependentHamiltonian for StaticHamiltonian {
    fn terms(&self) -> &[ComplexOperator] {
        &self.terms
    }

    fn coefficients(&self, _t: f64, out: &mut Vec<Complex64>) {
        out.clear();
        out.push(Complex64::new(1.0, 0.0));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepping {
    Fixed,
    /// Step doubling with local error (Frobenius norm) at most `tol`.
    Adaptive { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Step (μs); the initial step in adaptive mode.
    pub dt: f64,
    pub stepping: Stepping,
    /// In fixed mode, every `error_check_every`-th step is repeated as two
    /// half steps to estimate the local error (0 disables).
    pub error_check_every: usize,
    pub min_dt: f64,
}

impl IntegratorOptions {
    pub fn fixed(dt: f64) -> Self {
        Self {
            dt,
            stepping: Stepping::Fixed,
            error_check_every: 50,
            min_dt: 1e-9,
        }
    }

    pub fn adaptive(dt: f64, tol: f64) -> Self {
        Self {
            stepping: Stepping::Adaptive { tol },
            ..Self::fixed(dt)
        }
    }
}

/// Output times (observables) and the subset at which full states are kept.
#[derive(Debug, Clone, Default)]
pub struct OutputPlan {
    pub times: Vec<f64>,
    pub snapshots: Vec<(f64, Option<String>)>,
}

impl OutputPlan {
    /// Uniform grid `0, Δ, 2Δ, … , t_end` (the end point always included).
    pub fn uniform(t_end: f64, interval: f64) -> Self {
        let n = (t_end / interval - 1e-9).ceil().max(1.0) as usize;
        let mut times: Vec<f64> = (0..n).map(|k| k as f64 * interval).collect();
        times.push(t_end);
        Self {
            times,
            snapshots: Vec::new(),
        }
    }

    pub fn with_snapshot(mut self, t: f64, label: Option<&str>) -> Self {
        self.snapshots.push((t, label.map(str::to_owned)));
        self
    }

    fn merged_times(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.times.iter().copied().chain(self.snapshots.iter().map(|s| s.0)).collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        all
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub label: Option<String>,
    pub state: QuantumState,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IntegratorDiagnostics {
    pub steps: usize,
    pub rejected_steps: usize,
    /// Largest local error estimate seen (Frobenius norm per step).
    pub max_local_error: f64,
    /// Most negative eigenvalue among output states.
    pub worst_min_eigenvalue: f64,
    /// `(t, min eigenvalue)` where positivity slipped below −1e−5.
    pub positivity_warnings: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub nbar: Vec<f64>,
    pub sz: Vec<f64>,
    pub parity: Vec<f64>,
    pub purity: Vec<f64>,
    pub trace_err: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: IntegratorDiagnostics,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> Option<&QuantumState> {
        self.snapshots.last().map(|s| &s.state)
    }

    /// Snapshot nearest to `t` (within 1e−9 μs).
    pub fn snapshot_at(&self, t: f64) -> Option<&QuantumState> {
        self.snapshots.iter().find(|s| (s.t - t).abs() < 1e-9).map(|s| &s.state)
    }

    pub fn snapshot_labeled(&self, label: &str) -> Option<&QuantumState> {
        self.snapshots
            .iter()
            .find(|s| s.label.as_deref() == Some(label))
            .map(|s| &s.state)
    }

    /// CSV with header `t_us,nbar,sz,parity,purity,trace_err`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_us,nbar,sz,parity,purity,trace_err\n");
        for i in 0..self.times.len() {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.times[i], self.nbar[i], self.sz[i], self.parity[i], self.purity[i], self.trace_err[i]
            ));
        }
        s
    }
}

const POSITIVITY_WARN: f64 = -1e-5;

struct Rhs<'a> {
    h: &'a dyn TimeDependentHamiltonian,
    m: SparseOperator,
    maps: Vec<SlotMap>,
    jumps: Vec<SparseOperator>,
    coeffs: Vec<Complex64>,
    scratch: ComplexOperator,
}

impl<'a> Rhs<'a> {
    fn new(h: &'a dyn TimeDependentHamiltonian, channels: &[ComplexOperator], dim: usize) -> Self {
        let mut damping = ComplexOperator::zeros(dim, dim);
        for l in channels {
            damping += l.adjoint() * l;
        }
        let mut ops: Vec<&ComplexOperator> = h.terms().iter().collect();
        ops.push(&damping);
        let (m, maps) = SparseOperator::union(&ops);
        Self {
            h,
            m,
            maps,
            jumps: channels.iter().map(SparseOperator::from_dense).collect(),
            coeffs: Vec::new(),
            scratch: ComplexOperator::zeros(dim, dim),
        }
    }

    fn eval(&mut self, t: f64, rho: &ComplexOperator, out: &mut ComplexOperator) {
        self.h.coefficients(t, &mut self.coeffs);
        let minus_i = Complex64::new(0.0, -1.0);
        for c in self.coeffs.iter_mut() {
            *c *= minus_i;
        }
        self.coeffs.push(Complex64::new(-0.5, 0.0));
        self.m.set_linear_combination(&self.maps, &self.coeffs);
        self.m.mul_into(rho, &mut self.scratch);
        out.copy_from(&self.scratch);
        *out += self.scratch.adjoint();
        let one = Complex64::new(1.0, 0.0);
        for l in &self.jumps {
            l.mul_into(rho, &mut self.scratch);
            l.mul_adjoint_add(one, &self.scratch, out);
        }
    }
}

struct Rk4<'a> {
    rhs: Rhs<'a>,
    k: [ComplexOperator; 4],
    tmp: ComplexOperator,
}

impl<'a> Rk4<'a> {
    fn step(&mut self, t: f64, h: f64, rho: &ComplexOperator) -> ComplexOperator {
        let hc = |x: f64| Complex64::new(x, 0.0);
        let [k1, k2, k3, k4] = &mut self.k;
        self.rhs.eval(t, rho, k1);
        self.tmp.copy_from(rho);
        self.tmp += &*k1 * hc(0.5 * h);
        self.rhs.eval(t + 0.5 * h, &self.tmp, k2);
        self.tmp.copy_from(rho);
        self.tmp += &*k2 * hc(0.5 * h);
        self.rhs.eval(t + 0.5 * h, &self.tmp, k3);
        self.tmp.copy_from(rho);
        self.tmp += &*k3 * hc(h);
        self.rhs.eval(t + h, &self.tmp, k4);
        let mut next = rho.clone();
        next += (&*k1 + &*k2 * hc(2.0) + &*k3 * hc(2.0) + &*k4) * hc(h / 6.0);
        hermitize(&next)
    }

    /// Full step and two half steps from the same state; returns the half-step
    /// result and the Richardson error estimate.
    fn doubled(&mut self, t: f64, h: f64, rho: &ComplexOperator) -> (ComplexOperator, f64) {
        let full = self.step(t, h, rho);
        let half = self.step(t, 0.5 * h, rho);
        let two = self.step(t + 0.5 * h, 0.5 * h, &half);
        let err = frobenius(&(&two - &full)) / 15.0;
        (two, err)
    }
}

/// Integrates the master equation from `rho0` at `t = 0`.
///
/// `frame`, when given, maps the integration-frame state at time `t` to the
/// frame in which observables and snapshots are reported (`ρ ↦ UρU†`).
pub fn evolve_lindblad(
    h: &dyn TimeDependentHamiltonian,
    channels: &[ComplexOperator],
    rho0: &QuantumState,
    plan: &OutputPlan,
    opts: &IntegratorOptions,
    frame: Option<&dyn Fn(f64) -> ComplexOperator>,
) -> Result<TrajectoryRecord> {
    let spec = *rho0.spec();
    let dim = spec.dim();
    if h.terms().iter().any(|o| o.nrows() != dim) || channels.iter().any(|l| l.nrows() != dim) {
        return Err(Error::InvalidParameter("operator dimension mismatch".into()));
    }
    if !(opts.dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {}", opts.dt)));
    }
    if let Stepping::Adaptive { tol } = opts.stepping {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
    }
    let times = plan.merged_times();
    if times.is_empty() || times[0] < 0.0 {
        return Err(Error::InvalidParameter("output times must be non-empty and >= 0".into()));
    }
    let diag = |op: &ComplexOperator| -> Vec<f64> { op.diagonal().iter().map(|z| z.re).collect() };
    let (n_diag, z_diag, p_diag) = (diag(&number_joint(&spec)), diag(&sigma_z(&spec)), diag(&parity(&spec)));

    let mut rk = Rk4 {
        rhs: Rhs::new(h, channels, dim),
        k: std::array::from_fn(|_| ComplexOperator::zeros(dim, dim)),
        tmp: ComplexOperator::zeros(dim, dim),
    };
    let mut rec = TrajectoryRecord::default();
    let mut rho = rho0.rho().clone();
    let mut t = 0.0;
    let mut h_adapt = opts.dt;
    let mut checks = 0usize;

    for &target in &times {
        while target - t > 1e-12 {
            match opts.stepping {
                Stepping::Fixed => {
                    let n = ((target - t) / opts.dt - 1e-9).ceil().max(1.0) as usize;
                    let hstep = (target - t) / n as f64;
                    for _ in 0..n {
                        checks += 1;
                        if opts.error_check_every > 0 && checks.is_multiple_of(opts.error_check_every) {
                            let (next, err) = rk.doubled(t, hstep, &rho);
                            rec.diagnostics.max_local_error = rec.diagnostics.max_local_error.max(err);
                            rho = next;
                        } else {
                            rho = rk.step(t, hstep, &rho);
                        }
                        t += hstep;
                        rec.diagnostics.steps += 1;
                    }
                    t = target;
                }
                Stepping::Adaptive { tol } => {
                    let hstep = h_adapt.min(target - t);
                    if hstep < opts.min_dt {
                        return Err(Error::StepSizeUnderflow { t, dt: hstep });
                    }
                    let (next, err) = rk.doubled(t, hstep, &rho);
                    let factor = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
                    if err <= tol {
                        rho = next;
                        t = if (target - t - hstep).abs() < 1e-12 { target } else { t + hstep };
                        rec.diagnostics.steps += 1;
                        rec.diagnostics.max_local_error = rec.diagnostics.max_local_error.max(err);
                        if hstep == h_adapt {
                            h_adapt *= factor.clamp(0.2, 2.0);
                        }
                    } else {
                        rec.diagnostics.rejected_steps += 1;
                        h_adapt = hstep * factor.clamp(0.2, 0.9);
                    }
                }
            }
            if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::StepSizeUnderflow { t, dt: opts.dt });
            }
        }
        let reported = match frame {
            Some(f) => {
                let u = f(t);
                hermitize(&(&u * &rho * u.adjoint()))
            }
            None => rho.clone(),
        };
        let d: Vec<f64> = reported.diagonal().iter().map(|z| z.re).collect();
        let dot = |w: &[f64]| d.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        let tr: f64 = d.iter().sum();
        rec.times.push(t);
        rec.nbar.push(dot(&n_diag));
        rec.sz.push(dot(&z_diag));
        rec.parity.push(dot(&p_diag));
        rec.purity.push(reported.iter().map(|z| z.norm_sqr()).sum());
        rec.trace_err.push(tr - 1.0);
        let is_snapshot = plan.snapshots.iter().find(|s| (s.0 - t).abs() < 1e-12);
        let is_last = (t - times[times.len() - 1]).abs() < 1e-12;
        if is_snapshot.is_some() || is_last {
            let lam = hermitian_eigenvalues(&reported)[0];
            rec.diagnostics.worst_min_eigenvalue = rec.diagnostics.worst_min_eigenvalue.min(lam);
            if lam < POSITIVITY_WARN {
                rec.diagnostics.positivity_warnings.push((t, lam));
            }
            rec.snapshots.push(Snapshot {
                t,
                label: is_snapshot.and_then(|s| s.1.clone()),
                state: QuantumState::from_numerical(spec, &reported),
            });
        }
    }
    Ok(rec)
}
