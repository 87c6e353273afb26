//! Simulated measurement chain: qubit rotation and readout, displacement
//! of the resonator, ancilla Rabi signal and photon-number fit per β.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::protocol::{BasisSetting, Outcome};
use super::signal::{
    default_taus, nyquist_photon_limit, readout_map, simulate_rabi_signal, PhotonFitter,
    SignalNoise,
};
use super::wigner::{check_grid, PointFailure, Provenance, SettingPopulations, WignerRecord};
use crate::error::{Error, Result};
use crate::hilbert::{displacement_elements, ComplexOperator, QuantumState};
use crate::model::DeviceParams;
use crate::pool::par_map;

/// Displaced states must keep at least this much weight below the working
/// Fock cutoff.
pub const DISPLACED_TAIL_LIMIT: f64 = 1e-6;

/// Largest working Fock space tried for a displaced state.
const MAX_WORK_FOCK: usize = 600;

/// Highest photon number the fit resolves unless configured otherwise.
const DEFAULT_FIT_CAP: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyOptions {
    /// Ancilla interaction times, μs.
    pub taus: Vec<f64>,
    /// Photon cutoff of the fit; `None` takes the largest number the
    /// sampling resolves, capped at 40.
    pub n_max: Option<usize>,
    pub noise: SignalNoise,
    /// Apply the test qubit's assignment errors to the conditioning
    /// populations.
    pub qubit_readout_errors: bool,
    /// Points where the displaced field holds more photons than this are
    /// masked.
    pub photon_mask: f64,
    pub seed: u64,
}

impl Default for TomographyOptions {
    fn default() -> Self {
        Self {
            taus: default_taus(),
            n_max: None,
            noise: SignalNoise::noiseless(),
            qubit_readout_errors: false,
            photon_mask: 10.0,
            seed: 0,
        }
    }
}

impl TomographyOptions {
    /// Shot noise and both readout-error maps, as in the experiment.
    pub fn measured(shots: u32, seed: u64) -> Self {
        Self {
            noise: SignalNoise {
                ancilla_ground: 1.0,
                shots: Some(shots),
                readout_errors: true,
            },
            qubit_readout_errors: true,
            seed,
            ..Self::default()
        }
    }

    pub fn fit_cutoff(&self, dev: &DeviceParams) -> usize {
        self.n_max.unwrap_or_else(|| {
            nyquist_photon_limit(&self.taus, dev.lambda_prime).min(DEFAULT_FIT_CAP)
        })
    }
}

/// Photon distribution of `D(−β) σ D(β)` for a normalized block `σ`, with
/// the working cutoff grown until the dropped tail is negligible.
pub fn displaced_distribution(sigma: &ComplexOperator, beta: Complex64) -> Result<Vec<f64>> {
    let n = sigma.nrows();
    let b = beta.norm();
    let mut work = n + (b * b + 8.0 * b).ceil() as usize + 10;
    loop {
        let d = displacement_elements(work, n, -beta);
        let ds = &d * sigma;
        let p: Vec<f64> = (0..work)
            .map(|m| {
                (0..n)
                    .map(|j| (ds[(m, j)] * d[(m, j)].conj()).re)
                    .sum::<f64>()
                    .max(0.0)
            })
            .collect();
        let norm: f64 = sigma.diagonal().iter().map(|z| z.re).sum();
        let tail = norm - p.iter().sum::<f64>();
        if tail <= DISPLACED_TAIL_LIMIT * norm.max(1e-300) {
            return Ok(p);
        }
        if work >= MAX_WORK_FOCK {
            return Err(Error::Truncation {
                leakage: tail,
                limit: DISPLACED_TAIL_LIMIT,
                context: format!("displaced state at beta = {beta}"),
            });
        }
        work = (2 * work).min(MAX_WORK_FOCK);
    }
}

/// Mean photon number of the displaced field `D(−β) ρ_R D(β)`.
fn displaced_mean_photons(nbar: f64, mean_a: Complex64, beta: Complex64) -> f64 {
    nbar - 2.0 * (beta.conj() * mean_a).re + beta.norm_sqr()
}

const OUTCOMES: [(BasisSetting, Outcome); 6] = [
    (BasisSetting::Identity, Outcome::Plus),
    (BasisSetting::Identity, Outcome::Minus),
    (BasisSetting::RotateY, Outcome::Plus),
    (BasisSetting::RotateY, Outcome::Minus),
    (BasisSetting::RotateX, Outcome::Plus),
    (BasisSetting::RotateX, Outcome::Minus),
];

/// Runs the full chain on every grid point and assembles the Wigner
/// matrix from the fitted photon distributions.
///
/// Each outcome contributes `P_{±J} (2/π) Σ (−1)ⁿ P̂ₙ`, where `P̂ₙ` is fitted
/// from the simulated ancilla signal and `P_{±J}` is the (optionally
/// misassigned) outcome probability. Points whose fit fails are recorded
/// in `failures`, masked and set to NaN.
pub fn simulate_tomography(
    state: &QuantumState,
    dev: &DeviceParams,
    beta: &[Complex64],
    options: &TomographyOptions,
) -> Result<WignerRecord> {
    check_grid(beta)?;
    dev.validate()?;
    let fitter = PhotonFitter::new(&options.taus, options.fit_cutoff(dev), dev)?;
    let mut blocks = Vec::with_capacity(6);
    for (s, o) in OUTCOMES {
        let b = s.conditional_block(state, o)?;
        let p: f64 = b.diagonal().iter().map(|z| z.re).sum();
        blocks.push((b, p.max(0.0)));
    }
    let mut populations = Vec::with_capacity(3);
    let mut weights = [0.0; 6];
    for (i, s) in BasisSetting::ALL.iter().enumerate() {
        let (mut plus, mut minus) = (blocks[2 * i].1, blocks[2 * i + 1].1);
        if options.qubit_readout_errors {
            let total = plus + minus;
            let p = readout_map(plus / total, dev.fg, dev.fe);
            plus = p * total;
            minus = (1.0 - p) * total;
        }
        weights[2 * i] = plus;
        weights[2 * i + 1] = minus;
        populations.push(SettingPopulations { setting: *s, plus, minus });
    }

    let field = state.partial_trace_qubit();
    let nf = field.nrows();
    let nbar: f64 = (0..nf).map(|n| n as f64 * field[(n, n)].re).sum();
    // ⟨a⟩ = Tr[ρ_R a] = Σ √n ρ_{n,n−1}
    let mean_a: Complex64 = (1..nf).map(|n| field[(n, n - 1)] * (n as f64).sqrt()).sum();

    let normalized: Vec<Option<ComplexOperator>> = blocks
        .iter()
        .map(|(b, p)| (*p > 1e-12).then(|| b / Complex64::new(*p, 0.0)))
        .collect();

    let jobs: Vec<(usize, Complex64)> = beta.iter().copied().enumerate().collect();
    let results = par_map(jobs, |(index, b)| {
        let mut w = [0.0; 6];
        for (j, sigma) in normalized.iter().enumerate() {
            let Some(sigma) = sigma else { continue };
            let seed = options
                .seed
                .wrapping_add(((index * 6 + j) as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let value = displaced_distribution(sigma, b)
                .and_then(|mut p| {
                    let s: f64 = p.iter().sum();
                    p.iter_mut().for_each(|v| *v /= s);
                    simulate_rabi_signal(&p, dev, &options.taus, &options.noise, seed)
                })
                .and_then(|sig| fitter.fit(&sig))
                .map(|fit| {
                    FRAC_2_PI
                        * fit
                            .p_n
                            .iter()
                            .enumerate()
                            .map(|(n, p)| if n % 2 == 0 { *p } else { -*p })
                            .sum::<f64>()
                });
            match value {
                Ok(v) => w[j] = weights[j] * v,
                Err(e) => {
                    let (s, o) = OUTCOMES[j];
                    return Err(PointFailure {
                        index,
                        message: format!("{} {o:?}: {e}", s.name()),
                    });
                }
            }
        }
        Ok(w)
    });

    let mut rec = WignerRecord::empty(Provenance::FitFromSignal);
    rec.beta = beta.to_vec();
    rec.populations = populations;
    for (i, r) in results.into_iter().enumerate() {
        let crowded = displaced_mean_photons(nbar, mean_a, beta[i]) > options.photon_mask;
        match r {
            Ok(w) => {
                rec.w_ee.push(w[0]);
                rec.w_gg.push(w[1]);
                rec.re_w_eg.push(0.5 * (w[2] - w[3]));
                rec.im_w_eg.push(0.5 * (w[5] - w[4]));
                rec.masked.push(crowded);
            }
            Err(f) => {
                for col in [&mut rec.w_ee, &mut rec.w_gg, &mut rec.re_w_eg, &mut rec.im_w_eg] {
                    col.push(f64::NAN);
                }
                rec.masked.push(true);
                rec.failures.push(f);
            }
        }
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::*;
    use crate::tomography::wigner::{square_grid, wigner_matrix_forward};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn displaced_vacuum_is_poisson() {
        let sigma = ket_to_density(&fock_ket(4, 0));
        let b = c(1.5, -0.5);
        let p = displaced_distribution(&sigma, b).unwrap();
        let m = b.norm_sqr();
        let mut want = (-m).exp();
        for (n, v) in p.iter().enumerate().take(15) {
            if n > 0 {
                want *= m / n as f64;
            }
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_chain_on_vacuum_matches_exact() {
        let spec = HilbertSpec::qubit(6).unwrap();
        let s = QuantumState::basis(spec, 0, 0).unwrap();
        let dev = DeviceParams::table_s2();
        let grid = square_grid(3.0, 7);
        let exact = wigner_matrix_forward(&s, &grid).unwrap();
        let chain = simulate_tomography(&s, &dev, &grid, &TomographyOptions::default()).unwrap();
        assert!(chain.failures.is_empty());
        for i in 0..grid.len() {
            assert!((chain.w_gg[i] - exact.w_gg[i]).abs() < 0.01, "beta {}", grid[i]);
            assert!(chain.w_ee[i].abs() < 0.01);
        }
        // |β|² > 10 at the corners.
        assert!(chain.masked[0] && !chain.masked[grid.len() / 2]);
    }

    #[test]
    fn rotated_populations_sum_to_one() {
        let spec = HilbertSpec::qubit(4).unwrap();
        let psi = product_ket(&qubit_ket(2, &[c(0.6, 0.0), c(0.0, 0.8)]), &fock_ket(4, 1));
        let s = QuantumState::pure(spec, &psi).unwrap();
        let dev = DeviceParams::table_s2();
        let rec = simulate_tomography(&s, &dev, &[c(0.0, 0.0)], &TomographyOptions::default()).unwrap();
        for p in &rec.populations {
            assert!((p.plus + p.minus - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn off_diagonal_through_chain() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let spec = HilbertSpec::qubit(5).unwrap();
        let psi = product_ket(&qubit_ket(2, &[c(0.0, h), c(h, 0.0)]), &coherent_ket(5, c(0.3, 0.1)));
        let s = QuantumState::pure(spec, &psi).unwrap();
        let dev = DeviceParams::table_s2();
        let grid = square_grid(1.0, 3);
        let exact = wigner_matrix_forward(&s, &grid).unwrap();
        let chain = simulate_tomography(&s, &dev, &grid, &TomographyOptions::default()).unwrap();
        for i in 0..grid.len() {
            assert!((chain.re_w_eg[i] - exact.re_w_eg[i]).abs() < 0.01);
            assert!((chain.im_w_eg[i] - exact.im_w_eg[i]).abs() < 0.01);
        }
    }

    #[test]
    fn measured_chain_is_seed_deterministic() {
        let spec = HilbertSpec::qubit(4).unwrap();
        let s = QuantumState::basis(spec, 1, 0).unwrap();
        let dev = DeviceParams::table_s2();
        let grid = square_grid(0.5, 2);
        let o = TomographyOptions::measured(500, 3);
        let a = simulate_tomography(&s, &dev, &grid, &o).unwrap();
        let b = simulate_tomography(&s, &dev, &grid, &o).unwrap();
        assert_eq!(a.w_ee, b.w_ee);
        let p = &a.populations[0];
        assert!((p.plus - dev.fe).abs() < 1e-12);
    }
}
