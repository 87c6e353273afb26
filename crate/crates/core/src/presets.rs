//! Named analytic states used as tomography inputs and demo presets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_ket, cplx, fock_ket, product_ket, qubit_ket, HilbertSpec, Ket, QuantumState,
};
use crate::model::{np_sp_analytics, Branch, EffectiveParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `|g⟩|0⟩`.
    Vacuum,
    /// `|g⟩|1⟩`.
    Fock1,
    /// `|g⟩|α⟩`.
    Coherent,
    /// `|g⟩(|α⟩ + |−α⟩)/‖·‖`.
    EvenCat,
    /// Squeezed normal-phase ground state at `ξ < 1`.
    Np,
    /// One superradiant branch (`+α`) at `ξ > 1`.
    Sp,
    /// Even superposition of both superradiant branches at `ξ > 1`.
    Cat,
    /// `Np` below the transition and `Cat` above it.
    Ground,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Vacuum,
        Preset::Fock1,
        Preset::Coherent,
        Preset::EvenCat,
        Preset::Np,
        Preset::Sp,
        Preset::Cat,
        Preset::Ground,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Vacuum => "vacuum",
            Preset::Fock1 => "fock1",
            Preset::Coherent => "coherent",
            Preset::EvenCat => "even-cat",
            Preset::Np => "np",
            Preset::Sp => "sp",
            Preset::Cat => "cat",
            Preset::Ground => "ground",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown preset {name:?} (available: {})",
                    names.join(", ")
                ))
            })
    }
}

/// Parameters shared by the presets. `alpha` feeds the field-only states,
/// `xi` (with `eta` and `ratio = Ω/δ`) the Rabi-model ground states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetParams {
    pub alpha: Complex64,
    pub xi: f64,
    /// rad/μs.
    pub eta: f64,
    pub ratio: f64,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self {
            alpha: cplx(2.62, 0.0),
            xi: 1.5,
            eta: crate::hilbert::mhz(0.81),
            ratio: 10.0,
        }
    }
}

fn ground(spec: &HilbertSpec) -> Ket {
    qubit_ket(spec.n_qubit_levels(), &[cplx(1.0, 0.0)])
}

pub fn preset_ket(preset: Preset, spec: &HilbertSpec, p: &PresetParams) -> Result<Ket> {
    let n = spec.n_fock();
    let sw = || np_sp_analytics(&EffectiveParams::from_xi(p.eta, p.xi, p.ratio)?);
    Ok(match preset {
        Preset::Vacuum => product_ket(&ground(spec), &fock_ket(n, 0)),
        Preset::Fock1 => product_ket(&ground(spec), &fock_ket(n, 1)),
        Preset::Coherent => product_ket(&ground(spec), &coherent_ket(n, p.alpha)),
        Preset::EvenCat => product_ket(
            &ground(spec),
            &(coherent_ket(n, p.alpha) + coherent_ket(n, -p.alpha)),
        ),
        Preset::Np => sw()?.np_ground_ket(spec)?,
        Preset::Sp => sw()?.sp_ground_ket(spec, Branch::Plus)?,
        Preset::Cat => sw()?.sp_cat_ket(spec)?,
        Preset::Ground => {
            let a = sw()?;
            if a.xi < 1.0 {
                a.np_ground_ket(spec)?
            } else {
                a.sp_cat_ket(spec)?
            }
        }
    })
}

/// The preset as a normalized density matrix.
pub fn preset_state(preset: Preset, spec: HilbertSpec, p: &PresetParams) -> Result<QuantumState> {
    QuantumState::pure(spec, &preset_ket(preset, &spec, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()).unwrap(), p);
        }
        assert!(Preset::from_name("squeezed").is_err());
    }

    #[test]
    fn every_preset_is_a_valid_state() {
        let spec = HilbertSpec::qubit(30).unwrap();
        let np = PresetParams { xi: 0.5, ..PresetParams::default() };
        for preset in Preset::ALL {
            let p = if preset == Preset::Np { np } else { PresetParams::default() };
            let s = preset_state(preset, spec, &p).unwrap();
            assert!((s.rho().trace().re - 1.0).abs() < 1e-12, "{}", preset.name());
        }
    }

    #[test]
    fn phase_specific_presets_reject_the_wrong_side() {
        let spec = HilbertSpec::qubit(20).unwrap();
        let below = PresetParams { xi: 0.7, ..PresetParams::default() };
        assert!(preset_ket(Preset::Cat, &spec, &below).is_err());
        assert!(preset_ket(Preset::Ground, &spec, &below).is_ok());
        assert!(preset_ket(Preset::Np, &spec, &PresetParams::default()).is_err());
        let critical = PresetParams { xi: 1.0, ..PresetParams::default() };
        assert!(matches!(
            preset_ket(Preset::Ground, &spec, &critical),
            Err(Error::CriticalPoint { .. })
        ));
    }
}
