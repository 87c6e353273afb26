//! Photon-number readout through a resonant ancilla: synthesis of the
//! vacuum-Rabi signal and its inversion to a photon distribution.
//!
//! The ancilla starts in `|g⟩` with probability `P_g^a(0)` and oscillates
//! as `P_e^a(τ) = ½[1 − P_g^a(0) Σₙ Pₙ e^{−κₙτ} cos(2√n λ′τ)]` with
//! `κₙ = n^0.7 / T₁,p`. Frequencies and decays are fixed by calibration,
//! so with `qₙ = P_g^a(0) Pₙ` the signal is linear in `q` and the fit is a
//! nonnegative least-squares problem with `Σ qₙ ≤ 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::protocol::{BasisSetting, Outcome};
use crate::error::{Error, Result};
use crate::model::DeviceParams;

/// Exponent `l` of the photon-number-dependent decay `κₙ = nˡ / T₁,p`.
pub const DECAY_EXPONENT: f64 = 0.7;

/// Condition number of the design matrix above which a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Which measurement a signal belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSetting {
    pub beta: Complex64,
    pub basis: BasisSetting,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiSignal {
    /// Interaction times, μs.
    pub taus: Vec<f64>,
    /// Measured excited-state probability of the ancilla.
    pub p_e: Vec<f64>,
    pub shots: Option<u32>,
    /// Whether the ancilla readout-error map was applied.
    pub readout_errors: bool,
    pub setting: Option<SignalSetting>,
}

impl RabiSignal {
    /// CSV with columns `tau_us,p_e,setting`.
    pub fn to_csv(&self) -> String {
        let id = self
            .setting
            .map(|s| {
                format!(
                    "{}:{:?}@{}{:+}i",
                    s.basis.name(),
                    s.outcome,
                    s.beta.re,
                    s.beta.im
                )
            })
            .unwrap_or_else(|| "none".into());
        let mut out = String::from("tau_us,p_e,setting\n");
        for (t, p) in self.taus.iter().zip(&self.p_e) {
            out.push_str(&format!("{t},{p:.12e},{id}\n"));
        }
        out
    }
}

/// Noise applied when synthesizing a signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalNoise {
    /// `P_g^a(0)`, the ancilla's initial ground population.
    pub ancilla_ground: f64,
    /// Binomial sampling with this many repetitions per τ.
    pub shots: Option<u32>,
    /// Apply `p ↦ p F_e + (1 − p)(1 − F_g)` with the ancilla fidelities.
    pub readout_errors: bool,
}

impl SignalNoise {
    pub fn noiseless() -> Self {
        Self {
            ancilla_ground: 1.0,
            shots: None,
            readout_errors: false,
        }
    }
}

impl Default for SignalNoise {
    fn default() -> Self {
        Self::noiseless()
    }
}

/// `0, 2 ns, …, 1 μs`.
pub fn default_taus() -> Vec<f64> {
    (0..=500).map(|i| i as f64 * 0.002).collect()
}

/// Largest photon number whose oscillation frequency stays below the
/// Nyquist limit of the smallest spacing in `taus`.
pub fn nyquist_photon_limit(taus: &[f64], lambda_prime: f64) -> usize {
    let dt = taus
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !dt.is_finite() || lambda_prime <= 0.0 {
        return usize::MAX;
    }
    let n = (std::f64::consts::PI / (2.0 * lambda_prime * dt)).powi(2);
    (n.floor() as usize).saturating_sub(1)
}

/// Affine readout map of a qubit with assignment fidelities `fg`, `fe`.
pub fn readout_map(p: f64, fg: f64, fe: f64) -> f64 {
    p * fe + (1.0 - p) * (1.0 - fg)
}

fn invert_readout(p: f64, fg: f64, fe: f64) -> f64 {
    (p - (1.0 - fg)) / (fe + fg - 1.0)
}

fn decay_rate(n: usize, t1_p: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (n as f64).powf(DECAY_EXPONENT) / t1_p
    }
}

/// `e^{−κₙτ} cos(2√n λ′τ)`.
fn photon_tone(n: usize, tau: f64, dev: &DeviceParams) -> f64 {
    let w = 2.0 * (n as f64).sqrt() * dev.lambda_prime;
    (-decay_rate(n, dev.t1_p) * tau).exp() * (w * tau).cos()
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty() || taus.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter(
            "interaction times must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

/// Ancilla signal for a resonator with photon distribution `p_n`.
pub fn simulate_rabi_signal(
    p_n: &[f64],
    dev: &DeviceParams,
    taus: &[f64],
    noise: &SignalNoise,
    seed: u64,
) -> Result<RabiSignal> {
    let sum: f64 = p_n.iter().sum();
    if (sum - 1.0).abs() > 1e-8 || p_n.iter().any(|p| *p < -1e-12) {
        return Err(Error::Distribution { sum });
    }
    check_taus(taus)?;
    if !(0.0..=1.0).contains(&noise.ancilla_ground) {
        return Err(Error::InvalidParameter(format!(
            "ancilla ground population {} outside [0, 1]",
            noise.ancilla_ground
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p_e = Vec::with_capacity(taus.len());
    for &tau in taus {
        let osc: f64 = p_n
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != 0.0)
            .map(|(n, p)| p * photon_tone(n, tau, dev))
            .sum();
        let mut p = (0.5 * (1.0 - noise.ancilla_ground * osc)).clamp(0.0, 1.0);
        if noise.readout_errors {
            p = readout_map(p, dev.ancilla_fg, dev.ancilla_fe);
        }
        if let Some(shots) = noise.shots {
            let k = Binomial::new(u64::from(shots), p)
                .map_err(|e| Error::InvalidParameter(format!("binomial sampler: {e}")))?
                .sample(&mut rng);
            p = k as f64 / f64::from(shots);
        }
        p_e.push(p);
    }
    Ok(RabiSignal {
        taus: taus.to_vec(),
        p_e,
        shots: noise.shots,
        readout_errors: noise.readout_errors,
        setting: None,
    })
}

/// Result of inverting one Rabi signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonFit {
    pub p_n: Vec<f64>,
    pub ancilla_ground: f64,
    /// RMS misfit of `P_e^a(τ)`.
    pub residual_rms: f64,
    /// 2-norm condition number of the design matrix.
    pub condition: f64,
    pub iterations: usize,
}

/// Reusable inverter for one set of interaction times and photon cutoff.
///
/// The design matrix and its Gram matrix depend only on `taus`, `n_max`
/// and the device, so a tomography run builds them once.
#[derive(Debug, Clone)]
pub struct PhotonFitter {
    n_max: usize,
    design: DMatrix<f64>,
    gram: DMatrix<f64>,
    condition: f64,
    readout: (f64, f64),
}

impl PhotonFitter {
    pub fn new(taus: &[f64], n_max: usize, dev: &DeviceParams) -> Result<Self> {
        check_taus(taus)?;
        if taus.len() < 2 * (n_max + 2) {
            return Err(Error::InvalidParameter(format!(
                "{} interaction times cannot resolve {} photon numbers (need {})",
                taus.len(),
                n_max + 1,
                2 * (n_max + 2)
            )));
        }
        let design = DMatrix::from_fn(taus.len(), n_max + 1, |i, n| photon_tone(n, taus[i], dev));
        let gram = design.transpose() * &design;
        let eig = nalgebra::SymmetricEigen::new(gram.clone());
        let (lo, hi) = eig
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let condition = if lo > 0.0 { (hi / lo).sqrt() } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self {
            n_max,
            design,
            gram,
            condition,
            readout: (dev.ancilla_fg, dev.ancilla_fe),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn fit(&self, signal: &RabiSignal) -> Result<PhotonFit> {
        if signal.p_e.len() != self.design.nrows() {
            return Err(Error::InvalidParameter(format!(
                "signal has {} samples, fitter expects {}",
                signal.p_e.len(),
                self.design.nrows()
            )));
        }
        let (fg, fe) = self.readout;
        let y = DVector::from_iterator(
            signal.p_e.len(),
            signal.p_e.iter().map(|&p| {
                let p = if signal.readout_errors { invert_readout(p, fg, fe) } else { p };
                1.0 - 2.0 * p
            }),
        );
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::FitDivergence("non-finite signal samples".into()));
        }
        let b = self.design.transpose() * &y;
        let (mut q, mut iterations) = nnls(&self.gram, &b)?;
        if q.sum() > 1.0 {
            // Enforce Σq = 1 through a stiff quadratic penalty.
            let w = 1e6 * self.gram.trace() / self.gram.nrows() as f64;
            let g = &self.gram + DMatrix::from_element(q.len(), q.len(), w);
            let bb = &b + DVector::from_element(q.len(), w);
            let (q2, it) = nnls(&g, &bb)?;
            q = q2;
            iterations += it;
        }
        let total = q.sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::FitDivergence(format!("fitted amplitude sum {total}")));
        }
        let resid = &self.design * &q - &y;
        let residual_rms = 0.5 * (resid.norm_squared() / y.len() as f64).sqrt();
        Ok(PhotonFit {
            p_n: q.iter().map(|v| v / total).collect(),
            ancilla_ground: total.min(1.0),
            residual_rms,
            condition: self.condition,
            iterations,
        })
    }
}

/// One-shot wrapper around [`PhotonFitter`].
pub fn fit_photon_distribution(signal: &RabiSignal, n_max: usize, dev: &DeviceParams) -> Result<PhotonFit> {
    PhotonFitter::new(&signal.taus, n_max, dev)?.fit(signal)
}

/// Lawson–Hanson active-set solver for `min ½xᵀGx − bᵀx, x ≥ 0`, with `G`
/// symmetric positive definite.
fn nnls(g: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, usize)> {
    let n = b.len();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * b.amax().max(f64::MIN_POSITIVE) * n as f64;
    let max_outer = 3 * n + 10;
    let mut iterations = 0;
    loop {
        let w = b - g * &x;
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match candidate {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => break,
        }
        iterations += 1;
        if iterations > max_outer {
            return Err(Error::FitDivergence("active-set iteration limit reached".into()));
        }
        loop {
            let s = solve_passive(g, b, &passive)?;
            let blocking = (0..n).filter(|&i| passive[i] && s[i] <= 0.0);
            let alpha = blocking
                .map(|i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            if !alpha.is_finite() {
                x = s;
                break;
            }
            x += (&s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    Ok((x, iterations))
}

fn solve_passive(g: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> Result<DVector<f64>> {
    let idx: Vec<usize> = (0..b.len()).filter(|&i| passive[i]).collect();
    let k = idx.len();
    let sub = DMatrix::from_fn(k, k, |r, c| g[(idx[r], idx[c])]);
    let rhs = DVector::from_fn(k, |r, _| b[idx[r]]);
    let z = sub
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| sub.lu().solve(&rhs))
        .ok_or_else(|| Error::FitDivergence("singular active-set subproblem".into()))?;
    let mut s = DVector::zeros(b.len());
    for (r, &i) in idx.iter().enumerate() {
        s[i] = z[r];
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(mean: f64, n_max: usize) -> Vec<f64> {
        let mut p = vec![(-mean).exp()];
        for n in 1..=n_max {
            let prev = p[n - 1];
            p.push(prev * mean / n as f64);
        }
        p
    }

    #[test]
    fn vacuum_gives_flat_signal() {
        let dev = DeviceParams::table_s2();
        let s = simulate_rabi_signal(&[1.0], &dev, &default_taus(), &SignalNoise::noiseless(), 0).unwrap();
        assert!(s.p_e.iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn single_photon_half_period() {
        let dev = DeviceParams::table_s2();
        let tau = std::f64::consts::PI / (2.0 * dev.lambda_prime);
        let s = simulate_rabi_signal(&[0.0, 1.0], &dev, &[tau], &SignalNoise::noiseless(), 0).unwrap();
        let want = 0.5 * (1.0 + (-tau / dev.t1_p).exp());
        assert!((s.p_e[0] - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_distribution() {
        let dev = DeviceParams::table_s2();
        let r = simulate_rabi_signal(&[0.5, 0.4], &dev, &[0.1], &SignalNoise::noiseless(), 0);
        assert!(matches!(r, Err(Error::Distribution { .. })));
    }

    #[test]
    fn noiseless_poisson_round_trip() {
        let dev = DeviceParams::table_s2();
        let taus = default_taus();
        let mut p = poisson(5.0, 40);
        let tail: f64 = 1.0 - p.iter().sum::<f64>();
        p[40] += tail;
        let s = simulate_rabi_signal(&p, &dev, &taus, &SignalNoise::noiseless(), 0).unwrap();
        let fit = fit_photon_distribution(&s, 20, &dev).unwrap();
        let err = (0..=20).map(|n| (fit.p_n[n] - p[n]).abs()).fold(0.0, f64::max);
        assert!(err < 0.02, "max error {err}");
        assert!(fit.ancilla_ground > 0.99);
    }

    #[test]
    fn noiseless_single_photon() {
        let dev = DeviceParams::table_s2();
        let s = simulate_rabi_signal(&[0.0, 1.0], &dev, &default_taus(), &SignalNoise::noiseless(), 0).unwrap();
        let fit = fit_photon_distribution(&s, 20, &dev).unwrap();
        assert!(fit.p_n[1] > 0.98);
    }

    #[test]
    fn shot_noise_round_trip() {
        let dev = DeviceParams::table_s2();
        let p = poisson(5.0, 40);
        let noise = SignalNoise {
            shots: Some(3000),
            ..SignalNoise::noiseless()
        };
        let mut q = p.clone();
        q[40] += 1.0 - p.iter().sum::<f64>();
        let s = simulate_rabi_signal(&q, &dev, &default_taus(), &noise, 7).unwrap();
        let fit = fit_photon_distribution(&s, 20, &dev).unwrap();
        let err = (0..=20).map(|n| (fit.p_n[n] - q[n]).abs()).fold(0.0, f64::max);
        assert!(err < 0.05, "max error {err}");
    }

    #[test]
    fn readout_errors_are_inverted() {
        let dev = DeviceParams::table_s2();
        let p = [0.2, 0.5, 0.3];
        let noise = SignalNoise {
            readout_errors: true,
            ancilla_ground: 0.9,
            ..SignalNoise::noiseless()
        };
        let s = simulate_rabi_signal(&p, &dev, &default_taus(), &noise, 0).unwrap();
        let fit = fit_photon_distribution(&s, 6, &dev).unwrap();
        for n in 0..3 {
            assert!((fit.p_n[n] - p[n]).abs() < 1e-6);
        }
        assert!((fit.ancilla_ground - 0.9).abs() < 1e-6);
    }

    #[test]
    fn too_few_times_rejected() {
        let dev = DeviceParams::table_s2();
        assert!(PhotonFitter::new(&[0.0, 0.1, 0.2], 5, &dev).is_err());
    }

    #[test]
    fn nyquist_limit_for_default_times() {
        let dev = DeviceParams::table_s2();
        let n = nyquist_photon_limit(&default_taus(), dev.lambda_prime);
        assert!((30..40).contains(&n), "limit {n}");
    }

    #[test]
    fn nnls_matches_unconstrained_when_interior() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let x_true = DVector::from_row_slice(&[0.3, 0.7]);
        let b = &g * &x_true;
        let (x, _) = nnls(&g, &b).unwrap();
        assert!((x - x_true).norm() < 1e-12);
        let (x, _) = nnls(&g, &DVector::from_row_slice(&[-1.0, 1.0])).unwrap();
        assert!(x[0] == 0.0 && (x[1] - 1.0).abs() < 1e-12);
    }
}
