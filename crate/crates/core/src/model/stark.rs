use serde::{Deserialize, Serialize};

use super::DeviceParams;
use crate::hilbert::bessel_j;

/// Second-order shifts from the off-resonant sidebands, rad/μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarkShifts {
    /// Shift of the `|g⟩/|e⟩` pair from the `m = 0, ±1` sidebands.
    pub s1: f64,
    /// Dispersive shift of `|e⟩` through the second excited level.
    pub s2: f64,
    /// Qubit-dependent Kerr coefficient `(S₁ − S₂/2)² / 2K` once the drive
    /// dresses the qubit.
    pub kerr: f64,
}

impl StarkShifts {
    /// Net shift `S₁ − S₂/2` left after the second excited level partly
    /// cancels the two-level result.
    pub fn net(&self) -> f64 {
        self.s1 - 0.5 * self.s2
    }
}

pub fn stark_corrections(dev: &DeviceParams) -> StarkShifts {
    let mu = dev.mu();
    let (nu, g) = (dev.nu1, dev.gamma_anh);
    let c0 = (bessel_j(0, mu) * dev.lambda).powi(2);
    let c1 = (bessel_j(1, mu) * dev.lambda).powi(2);
    let cm1 = (bessel_j(-1, mu) * dev.lambda).powi(2);
    let s1 = c0 / (2.0 * nu) + c1 / nu + cm1 / (3.0 * nu);
    let s2 = 2.0 * c0 / (2.0 * nu + g) + 2.0 * c1 / (nu + g) + 2.0 * cm1 / (3.0 * nu + g);
    let net = s1 - 0.5 * s2;
    let kerr = if dev.k_drive > 0.0 {
        net * net / (2.0 * dev.k_drive)
    } else {
        0.0
    };
    StarkShifts { s1, s2, kerr }
}
