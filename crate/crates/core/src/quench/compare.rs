//! Side-by-side photon statistics of the effective model, the full model
//! and the full model with decoherence at the end of the ramp.

use serde::{Deserialize, Serialize};

use super::lindblad::LindbladSpec;
use super::run::{run_quench, QuenchOptions, QuenchRun};
use super::schedule::QuenchSchedule;
use crate::error::{Error, Result};
use crate::hilbert::QuantumState;
use crate::model::{DeviceParams, HamiltonianLevel};
use crate::pool::par_map;

/// Dephasing time used for the decoherent member of the comparison, μs.
/// The parametric modulation adds frequency noise beyond the idle `T₂*`.
pub const COMPARISON_T_PHI: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonOptions {
    pub n_fock: usize,
    /// Hamiltonian level standing in for the full model.
    pub full_level: HamiltonianLevel,
    pub t_phi: f64,
    /// Apply the experiment-matched Ω and δ corrections to the decoherent run.
    pub corrected_decoherent: bool,
    pub t_end: Option<f64>,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        Self {
            n_fock: 40,
            full_level: HamiltonianLevel::ThreeLevel,
            t_phi: COMPARISON_T_PHI,
            corrected_decoherent: false,
            t_end: None,
        }
    }
}

/// One member of the comparison.
#[derive(Debug, Clone)]
pub struct ComparisonCase {
    pub label: &'static str,
    pub run: QuenchRun,
    pub photon_distribution: Vec<f64>,
}

impl ComparisonCase {
    pub fn final_state(&self) -> &QuantumState {
        self.run
            .record
            .final_state()
            .expect("run_quench always records a final snapshot")
    }
}

#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub t_end: f64,
    pub cases: Vec<ComparisonCase>,
}

impl ModelComparison {
    /// `½ Σ |p_n − q_n|` between two cases, padding the shorter distribution.
    pub fn total_variation(&self, i: usize, j: usize) -> f64 {
        total_variation(
            &self.cases[i].photon_distribution,
            &self.cases[j].photon_distribution,
        )
    }

    /// CSV with one row per photon number: `n,effective,full,full_decoherent`.
    pub fn distributions_csv(&self) -> String {
        let len = self
            .cases
            .iter()
            .map(|c| c.photon_distribution.len())
            .max()
            .unwrap_or(0);
        let mut out = String::from("n");
        for c in &self.cases {
            out.push(',');
            out.push_str(c.label);
        }
        out.push('\n');
        for n in 0..len {
            out.push_str(&n.to_string());
            for c in &self.cases {
                let p = c.photon_distribution.get(n).copied().unwrap_or(0.0);
                out.push_str(&format!(",{p:.10e}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn photon_distribution(state: &QuantumState) -> Vec<f64> {
    let r = state.partial_trace_qubit();
    (0..r.nrows()).map(|n| r[(n, n)].re.max(0.0)).collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    0.5 * (0..len)
        .map(|n| (p.get(n).unwrap_or(&0.0) - q.get(n).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Runs the effective Rabi model and the full model closed, then the full
/// model under `LindbladSpec::from_device` with the dephasing time
/// `options.t_phi`. The three runs are independent and share the work pool.
pub fn compare_models(
    dev: &DeviceParams,
    schedule: &QuenchSchedule,
    options: &ComparisonOptions,
) -> Result<ModelComparison> {
    if options.full_level == HamiltonianLevel::Rabi {
        return Err(Error::InvalidParameter(
            "the full model must be the rotating or three-level Hamiltonian".into(),
        ));
    }
    let noisy = LindbladSpec::from_device(dev, Some(options.t_phi))?;
    let corrected = if options.corrected_decoherent {
        schedule.with_experimental_corrections()
    } else {
        *schedule
    };
    let setup = |level| QuenchOptions {
        n_fock: options.n_fock,
        t_end: options.t_end,
        output_interval: 0.02,
        ..QuenchOptions::new(level)
    };
    let jobs = vec![
        ("effective", *schedule, LindbladSpec::closed(), setup(HamiltonianLevel::Rabi)),
        ("full", *schedule, LindbladSpec::closed(), setup(options.full_level)),
        ("full_decoherent", corrected, noisy, setup(options.full_level)),
    ];
    let runs = par_map(jobs, |(label, sched, lindblad, opts)| {
        run_quench(dev, &sched, &lindblad, &opts, None).map(|run| (label, run))
    });
    let mut cases = Vec::with_capacity(3);
    for r in runs {
        let (label, run) = r?;
        let photon_distribution = photon_distribution(
            run.record
                .final_state()
                .expect("run_quench always records a final snapshot"),
        );
        cases.push(ComparisonCase {
            label,
            run,
            photon_distribution,
        });
    }
    Ok(ModelComparison {
        t_end: options.t_end.unwrap_or(schedule.t_f),
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_variation_pads_and_bounds() {
        assert_eq!(total_variation(&[1.0], &[0.0, 1.0]), 1.0);
        assert!(total_variation(&[0.5, 0.5], &[0.5, 0.5]).abs() < 1e-15);
    }

    #[test]
    fn rejects_effective_as_full() {
        let dev = DeviceParams::table_s2();
        let o = ComparisonOptions {
            full_level: HamiltonianLevel::Rabi,
            ..Default::default()
        };
        assert!(compare_models(&dev, &QuenchSchedule::for_device(&dev), &o).is_err());
    }

    #[test]
    fn short_comparison_is_normalized() {
        let dev = DeviceParams::table_s2();
        let o = ComparisonOptions {
            n_fock: 8,
            full_level: HamiltonianLevel::Rotating,
            t_end: Some(0.05),
            ..Default::default()
        };
        let c = compare_models(&dev, &QuenchSchedule::for_device(&dev), &o).unwrap();
        for case in &c.cases {
            let s: f64 = case.photon_distribution.iter().sum();
            assert!((s - 1.0).abs() < 1e-6, "{} sums to {s}", case.label);
        }
        assert!(c.distributions_csv().starts_with("n,effective,full,full_decoherent\n"));
    }
}
