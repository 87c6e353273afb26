use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::mhz;
use crate::model::{effective_from_device, DeviceParams};

/// Ramp of the normalized coupling at fixed `η` and fixed `Ω/δ`:
/// `ξ(t) = (ξ_max − ξ₀)(1 − e^{−8t/t_f}) + ξ₀`, `Ω = 2√ratio·η/ξ`, `δ = Ω/ratio`.
///
/// `omega_correction` and `delta_offset` reproduce the experiment-matched
/// simulation (×1.24 on Ω, −2π·0.07 MHz on δ). They default to identity and
/// are only applied when set explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchSchedule {
    pub xi0: f64,
    pub xi_max: f64,
    /// Ramp duration, μs.
    pub t_f: f64,
    /// Fixed effective coupling, rad/μs.
    pub eta: f64,
    /// `Ω/δ`.
    pub ratio: f64,
    pub omega_correction: f64,
    /// Added to δ(t), rad/μs.
    pub delta_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleValues {
    pub xi: f64,
    pub omega: f64,
    pub delta: f64,
    pub omega_uncorrected: f64,
    pub delta_uncorrected: f64,
}

impl QuenchSchedule {
    pub fn with_eta(eta: f64) -> Self {
        Self {
            xi0: 0.5,
            xi_max: 1.5,
            t_f: 2.0,
            eta,
            ratio: 10.0,
            omega_correction: 1.0,
            delta_offset: 0.0,
        }
    }

    /// Default ramp with `η` derived from the device.
    pub fn for_device(dev: &DeviceParams) -> Self {
        Self::with_eta(effective_from_device(dev, 0.0).eta)
    }

    /// Turns on the experiment-matched corrections.
    pub fn with_experimental_corrections(self) -> Self {
        Self {
            omega_correction: 1.24,
            delta_offset: mhz(-0.07),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("xi0", self.xi0 > 0.0),
            ("xi_max", self.xi_max > 0.0),
            ("t_f", self.t_f > 0.0),
            ("eta", self.eta > 0.0),
            ("ratio", self.ratio > 0.0),
            ("omega_correction", self.omega_correction > 0.0),
            ("delta_offset", self.delta_offset.is_finite()),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter(format!("quench schedule: bad {name}")));
            }
        }
        Ok(())
    }

    pub fn xi(&self, t: f64) -> f64 {
        (self.xi_max - self.xi0) * (1.0 - (-8.0 * t / self.t_f).exp()) + self.xi0
    }

    pub fn values(&self, t: f64) -> ScheduleValues {
        let xi = self.xi(t);
        let omega_uncorrected = 2.0 * self.ratio.sqrt() * self.eta / xi;
        let delta_uncorrected = omega_uncorrected / self.ratio;
        let omega = omega_uncorrected * self.omega_correction;
        ScheduleValues {
            xi,
            omega,
            delta: omega / (self.ratio * self.omega_correction) + self.delta_offset,
            omega_uncorrected,
            delta_uncorrected,
        }
    }
}

impl Default for QuenchSchedule {
    fn default() -> Self {
        Self::for_device(&DeviceParams::table_s2())
    }
}

/// `(ξ, Ω, δ)` at time `t`, with the uncorrected pair alongside.
pub fn schedules(q: &QuenchSchedule, t: f64) -> ScheduleValues {
    q.values(t)
}
