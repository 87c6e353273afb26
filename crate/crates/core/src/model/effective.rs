use serde::{Deserialize, Serialize};

use super::DeviceParams;
use crate::error::{Error, Result};
use crate::hilbert::bessel_j;

/// Parameters of the effective Rabi Hamiltonian
/// `H_R = (Ω/2)σ_z + δ a†a + η σ_x (a + a†)`, in rad/μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub eta: f64,
    pub omega: f64,
    pub delta: f64,
    /// Precession frequency of the drive-dressed qubit, `2K J₀(μ)`.
    pub b0: f64,
    pub mu: f64,
}

impl EffectiveParams {
    /// Builds parameters from `(η, Ω, δ)` alone; `b0` and `mu` are left at zero.
    pub fn new(eta: f64, omega: f64, delta: f64) -> Self {
        Self {
            eta,
            omega,
            delta,
            b0: 0.0,
            mu: 0.0,
        }
    }

    /// Chooses `Ω` and `δ = Ω/ratio` so that the normalized coupling equals `xi`.
    pub fn from_xi(eta: f64, xi: f64, ratio: f64) -> Result<Self> {
        if !(xi > 0.0 && ratio > 0.0 && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need eta, xi, ratio > 0 (got {eta}, {xi}, {ratio})"
            )));
        }
        let omega = 2.0 * ratio.sqrt() * eta / xi;
        Ok(Self::new(eta, omega, omega / ratio))
    }

    /// Normalized coupling `ξ = 2η/√(Ωδ)`; NaN when `Ωδ ≤ 0`.
    pub fn xi(&self) -> f64 {
        let od = self.omega * self.delta;
        if od > 0.0 {
            2.0 * self.eta / od.sqrt()
        } else {
            f64::NAN
        }
    }

    pub fn with_omega_delta(self, omega: f64, delta: f64) -> Self {
        Self {
            omega,
            delta,
            ..self
        }
    }
}

/// Effective couplings produced by the two-tone modulation: `μ = ε₁/ν₁`,
/// `η = λJ₂(μ)/2`, `B₀ = 2KJ₀(μ)`, `Ω = ε₂/2`. The resonator detuning `δ` is
/// an external control and is passed through unchanged.
pub fn effective_from_device(dev: &DeviceParams, delta: f64) -> EffectiveParams {
    let mu = dev.mu();
    EffectiveParams {
        eta: dev.lambda * bessel_j(2, mu) / 2.0,
        omega: dev.eps2 / 2.0,
        delta,
        b0: 2.0 * dev.k_drive * bessel_j(0, mu),
        mu,
    }
}
