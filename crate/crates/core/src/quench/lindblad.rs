use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation_joint, cplx, frobenius, qubit_lowering, qubit_number, ComplexOperator, HilbertSpec};
use crate::model::DeviceParams;

/// Markovian decoherence rates (1/μs). The resonator has no thermal
/// population, so only loss is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSpec {
    /// `1/T₁` of the test qubit.
    pub qubit_relaxation: f64,
    /// Pure-dephasing rate `1/T_φ`.
    pub qubit_dephasing: f64,
    /// `1/T₁` of the resonator.
    pub resonator_decay: f64,
}

impl LindbladSpec {
    pub fn closed() -> Self {
        Self {
            qubit_relaxation: 0.0,
            qubit_dephasing: 0.0,
            resonator_decay: 0.0,
        }
    }

    /// Rates from the device's `T₁`, `T₂` and resonator lifetime. With no
    /// override `1/T_φ = 1/T₂ − 1/(2T₁)`.
    pub fn from_device(dev: &DeviceParams, t_phi_override: Option<f64>) -> Result<Self> {
        let dephasing = match t_phi_override {
            Some(t) if t > 0.0 => 1.0 / t,
            Some(t) => {
                return Err(Error::InvalidParameter(format!("T_phi must be positive, got {t}")))
            }
            None => 1.0 / dev.t2_q - 0.5 / dev.t1_q,
        };
        let s = Self {
            qubit_relaxation: 1.0 / dev.t1_q,
            qubit_dephasing: dephasing,
            resonator_decay: 1.0 / dev.t1_p,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("qubit_relaxation", self.qubit_relaxation),
            ("qubit_dephasing", self.qubit_dephasing),
            ("resonator_decay", self.resonator_decay),
        ] {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} rate must be >= 0, got {r}")));
            }
        }
        Ok(())
    }

    /// Collapse operators in the frame where the qubit operators are the
    /// bare transmon ones: `√Γ₁ q`, `√(2Γ_φ) q†q` and `√κ a`.
    ///
    /// On two levels `√(2Γ_φ) q†q` generates the same dissipator as
    /// `√(Γ_φ/2) σ_z`, i.e. coherences decay as `e^{−Γ_φ t}`.
    pub fn channels(&self, spec: &HilbertSpec) -> Vec<ComplexOperator> {
        let mut out = Vec::new();
        if self.qubit_relaxation > 0.0 {
            out.push(qubit_lowering(spec) * cplx(self.qubit_relaxation.sqrt(), 0.0));
        }
        if self.qubit_dephasing > 0.0 {
            out.push(qubit_number(spec) * cplx((2.0 * self.qubit_dephasing).sqrt(), 0.0));
        }
        if self.resonator_decay > 0.0 {
            out.push(annihilation_joint(spec) * cplx(self.resonator_decay.sqrt(), 0.0));
        }
        out
    }
}

/// Secular form of collapse operators seen from a frame `U(φ)` that rotates
/// quickly and periodically in `φ ∈ [0, 2π)`, with `U(φ)` containing only
/// the harmonics `e^{0, ±iφ/2}` (a spin-½ rotation).
///
/// `U L U†` then has Fourier components `L_k`, `k ∈ {−1, 0, 1}`, and once
/// the cross terms between different harmonics average out the dissipator
/// of `L` becomes `Σ_k D[L_k]`.
pub fn secular_channels(
    channels: &[ComplexOperator],
    frame: impl Fn(f64) -> ComplexOperator,
) -> Vec<ComplexOperator> {
    const SAMPLES: usize = 32;
    let rotated: Vec<(f64, ComplexOperator)> = (0..SAMPLES)
        .map(|s| {
            let phi = 2.0 * std::f64::consts::PI * s as f64 / SAMPLES as f64;
            (phi, frame(phi))
        })
        .collect();
    let mut out = Vec::new();
    for l in channels {
        let scale = frobenius(l);
        for k in [-1.0f64, 0.0, 1.0] {
            let mut acc = ComplexOperator::zeros(l.nrows(), l.ncols());
            for (phi, u) in &rotated {
                acc += u * l * u.adjoint() * num_complex::Complex64::from_polar(1.0 / SAMPLES as f64, -k * phi);
            }
            if frobenius(&acc) > 1e-12 * scale {
                out.push(acc);
            }
        }
    }
    out
}
