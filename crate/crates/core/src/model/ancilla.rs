//! Resonator-frequency control through the dispersive shift of a detuned
//! ancilla qubit. Moving the ancilla from `f(0) = f_idle` to `f(t)` shifts
//! the resonator by `λ′²/(f(0) − ω_p) − λ′²/(f(t) − ω_p)`.

use super::DeviceParams;
use crate::error::{Error, Result};

/// Minimum ancilla–resonator detuning, in units of `λ′`, for the
/// dispersive expression to apply.
const DISPERSIVE_MARGIN: f64 = 5.0;

/// Resonator shift `δ(t) − δ(0)` produced by an ancilla at frequency `f`.
pub fn stark_shift_at_frequency(dev: &DeviceParams, f: f64) -> f64 {
    let l2 = dev.lambda_prime * dev.lambda_prime;
    l2 / (dev.f_idle - dev.omega_p) - l2 / (f - dev.omega_p)
}

/// Ancilla frequency that shifts the resonator by `shift = δ(t) − δ(0)`.
pub fn ancilla_frequency(dev: &DeviceParams, shift: f64) -> Result<f64> {
    let l2 = dev.lambda_prime * dev.lambda_prime;
    let bracket = shift / l2 - 1.0 / (dev.f_idle - dev.omega_p);
    if bracket == 0.0 || !bracket.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "resonator shift {shift} rad/us has no finite ancilla frequency"
        )));
    }
    let f = dev.omega_p - 1.0 / bracket;
    let limit = DISPERSIVE_MARGIN * dev.lambda_prime;
    let detuning = (f - dev.omega_p).abs();
    if detuning < limit {
        return Err(Error::DispersiveViolation { detuning, limit });
    }
    Ok(f)
}

/// Ancilla trajectory realizing the sampled resonator detunings `deltas`
/// (the first entry sets the reference `δ(0)`).
pub fn ancilla_stark_schedule(dev: &DeviceParams, deltas: &[f64]) -> Result<Vec<f64>> {
    let Some(&d0) = deltas.first() else {
        return Ok(Vec::new());
    };
    deltas.iter().map(|&d| ancilla_frequency(dev, d - d0)).collect()
}
