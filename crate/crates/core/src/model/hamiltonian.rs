use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DeviceParams, EffectiveParams};
use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation_joint, bessel_j, cplx, identity, kron, number_joint, on_qubit, qubit_number,
    qubit_transition, sigma_x, sigma_z, ComplexOperator, HilbertSpec,
};

/// Sidebands `|m| ≤ 8` are kept; `|J_m(0.83)|` is below 1e-8 beyond 7.
pub const DEFAULT_SIDEBAND_CUTOFF: i32 = 8;

/// Which Hamiltonian drives a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianLevel {
    /// Effective Rabi model `H_R` (two-level qubit).
    Rabi,
    /// Rotating-frame model with all retained modulation sidebands.
    Rotating,
    /// As `Rotating`, including the transmon's second excited level.
    ThreeLevel,
}

impl HamiltonianLevel {
    pub fn qubit_levels(self) -> usize {
        match self {
            HamiltonianLevel::ThreeLevel => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HamiltonianLevel::Rabi => "rabi",
            HamiltonianLevel::Rotating => "rotating",
            HamiltonianLevel::ThreeLevel => "three-level",
        }
    }
}

impl std::str::FromStr for HamiltonianLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rabi" | "effective-rabi" => Ok(Self::Rabi),
            "rotating" | "full-rotating-frame" => Ok(Self::Rotating),
            "three-level" | "full-three-level" => Ok(Self::ThreeLevel),
            other => Err(Error::InvalidParameter(format!(
                "unknown Hamiltonian level {other:?} (rabi | rotating | three-level)"
            ))),
        }
    }
}

fn require_two_levels(spec: &HilbertSpec, what: &str) -> Result<()> {
    if spec.n_qubit_levels() != 2 {
        return Err(Error::Unsupported(format!("{what} needs a two-level qubit")));
    }
    Ok(())
}

/// `H_R = (Ω/2)σ_z + δ a†a + η σ_x (a + a†)`.
pub fn rabi_hamiltonian(spec: &HilbertSpec, p: &EffectiveParams) -> Result<ComplexOperator> {
    require_two_levels(spec, "the Rabi Hamiltonian")?;
    let a = annihilation_joint(spec);
    let x = &a + a.adjoint();
    let h = sigma_z(spec) * cplx(p.omega / 2.0, 0.0)
        + number_joint(spec) * cplx(p.delta, 0.0)
        + sigma_x(spec) * x * cplx(p.eta, 0.0);
    Ok(h)
}

/// Time-dependent Hamiltonian of the modulated qubit in the frame rotating
/// with the bare qubit and resonator frequencies.
///
/// It is stored as a fixed list of operators `O_i` and evaluated as
/// `H(t) = Σ c_i(t) O_i`; the list closes under adjoints and the
/// coefficients of each adjoint pair are complex conjugates, so every
/// evaluation is exactly Hermitian.
///
/// With a two-level qubit the terms are
/// `δ a†a + ½ε₂cos(ν₂t)σ_z + [Σ_m J_m(μ)(λ e^{−i(m−2)ν₁t} a† + K e^{−imν₁t}) σ₋ + h.c.]`.
/// With three levels the resonator coupling acquires the `√2 e^{iγt}|e⟩⟨f|`
/// branch and the slow modulation couples to `q†q`. The drive stays on the
/// `g–e` transition: its first sideband lies only `γ − ν₁` away from the
/// `e–f` line and would otherwise pump `|f⟩` at a rate the device avoids by
/// shaping the drive.
#[derive(Debug, Clone)]
pub struct RotatingFrameModel {
    spec: HilbertSpec,
    nu1: f64,
    nu2: f64,
    gamma: f64,
    lambda: f64,
    k_drive: f64,
    b0: f64,
    sidebands: Vec<(i32, f64)>,
    terms: Vec<ComplexOperator>,
}

impl RotatingFrameModel {
    pub fn new(spec: HilbertSpec, dev: &DeviceParams, m_max: i32) -> Result<Self> {
        dev.validate()?;
        if m_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "sideband cutoff must keep m = 0 and m = 2, got {m_max}"
            )));
        }
        let mu = dev.mu();
        let sidebands = (-m_max..=m_max).map(|m| (m, bessel_j(m, mu))).collect();
        let l = spec.n_qubit_levels();
        let a = annihilation_joint(&spec);
        let ad = a.adjoint();
        let lower_ge = on_qubit(&spec, &qubit_transition(l, 0, 1));
        let mut terms = vec![number_joint(&spec)];
        if l == 2 {
            terms.push(sigma_z(&spec) * cplx(0.5, 0.0));
            for op in [&ad * &lower_ge, lower_ge] {
                terms.push(op.clone());
                terms.push(op.adjoint());
            }
        } else {
            let lower_ef = on_qubit(&spec, &qubit_transition(l, 1, 2)) * cplx(2f64.sqrt(), 0.0);
            terms.push(qubit_number(&spec));
            for op in [&ad * &lower_ge, &ad * &lower_ef, lower_ge] {
                terms.push(op.clone());
                terms.push(op.adjoint());
            }
        }
        Ok(Self {
            spec,
            nu1: dev.nu1,
            nu2: dev.nu2,
            gamma: dev.gamma_anh,
            lambda: dev.lambda,
            k_drive: dev.k_drive,
            b0: 2.0 * dev.k_drive * bessel_j(0, mu),
            sidebands,
            terms,
        })
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[ComplexOperator] {
        &self.terms
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// Writes `c_i(t)` for slow-modulation amplitude `eps2` and detuning `delta`.
    pub fn coefficients(&self, t: f64, eps2: f64, delta: f64, out: &mut Vec<Complex64>) {
        out.clear();
        // Σ_m J_m e^{−imν₁t} = e^{−iμ sin ν₁t} up to the sideband cutoff.
        let base: Complex64 = self
            .sidebands
            .iter()
            .map(|&(m, j)| Complex64::from_polar(j, -(m as f64) * self.nu1 * t))
            .sum();
        let c_drive = base * self.k_drive;
        let c_coupling = base * Complex64::from_polar(self.lambda, 2.0 * self.nu1 * t);
        out.push(cplx(delta, 0.0));
        out.push(cplx(eps2 * (self.nu2 * t).cos(), 0.0));
        let mut push_pair = |c: Complex64| {
            out.push(c);
            out.push(c.conj());
        };
        if self.spec.n_qubit_levels() == 2 {
            push_pair(c_coupling);
            push_pair(c_drive);
        } else {
            let anh = Complex64::from_polar(1.0, self.gamma * t);
            push_pair(c_coupling);
            push_pair(c_coupling * anh);
            push_pair(c_drive);
        }
    }

    pub fn hamiltonian(&self, t: f64, eps2: f64, delta: f64) -> ComplexOperator {
        let mut c = Vec::with_capacity(self.terms.len());
        self.coefficients(t, eps2, delta, &mut c);
        let d = self.spec.dim();
        let mut h = ComplexOperator::zeros(d, d);
        for (op, ci) in self.terms.iter().zip(&c) {
            h += op * *ci;
        }
        h
    }

    /// `exp(iB₀σ_x t/2)` on the `{g, e}` subspace: maps a rotating-frame
    /// state at time `t` into the frame where the dynamics reduces to `H_R`.
    pub fn rabi_frame_unitary(&self, t: f64) -> ComplexOperator {
        let l = self.spec.n_qubit_levels();
        let phi = self.b0 * t / 2.0;
        let mut u = identity(l);
        u[(0, 0)] = cplx(phi.cos(), 0.0);
        u[(1, 1)] = cplx(phi.cos(), 0.0);
        u[(0, 1)] = cplx(0.0, phi.sin());
        u[(1, 0)] = cplx(0.0, phi.sin());
        kron(&u, &identity(self.spec.n_fock()))
    }
}

/// Rotating-frame Hamiltonian at time `t` with the device's stored `ε₂`,
/// detuning `delta` and the default sideband cutoff.
pub fn rotating_frame_hamiltonian(
    spec: &HilbertSpec,
    dev: &DeviceParams,
    delta: f64,
    t: f64,
) -> Result<ComplexOperator> {
    require_two_levels(spec, "the rotating-frame Hamiltonian")?;
    let model = RotatingFrameModel::new(*spec, dev, DEFAULT_SIDEBAND_CUTOFF)?;
    Ok(model.hamiltonian(t, dev.eps2, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        commutator, frobenius, hermitian_eigenvalues, hermiticity_error, mhz, parity, sigma_minus,
    };
    use crate::model::effective_from_device;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        cplx(re, 0.0)
    }

    #[test]
    fn decoupled_spectrum() {
        let spec = HilbertSpec::qubit(6).unwrap();
        let p = EffectiveParams::new(0.0, 3.0, 0.7);
        let ev = hermitian_eigenvalues(&rabi_hamiltonian(&spec, &p).unwrap());
        let mut want: Vec<f64> = (0..6)
            .flat_map(|n| [-1.5 + 0.7 * n as f64, 1.5 + 0.7 * n as f64])
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_phase_gap_matches_squeezed_prediction() {
        // Ω/δ = 10 at ξ = 0.5: finite-frequency corrections stay within 5%.
        let spec = HilbertSpec::qubit(40).unwrap();
        let p = EffectiveParams::from_xi(mhz(0.81), 0.5, 10.0).unwrap();
        let ev = hermitian_eigenvalues(&rabi_hamiltonian(&spec, &p).unwrap());
        let gap = ev[1] - ev[0];
        let want = p.delta * (1.0 - 0.25f64).sqrt();
        assert!(((gap - want) / want).abs() < 0.05, "gap {gap} want {want}");
    }

    proptest! {
        #[test]
        fn rabi_is_hermitian_and_parity_symmetric(
            eta in 0.0f64..10.0, omega in -20.0f64..20.0, delta in 0.0f64..10.0
        ) {
            let spec = HilbertSpec::qubit(8).unwrap();
            let h = rabi_hamiltonian(&spec, &EffectiveParams::new(eta, omega, delta)).unwrap();
            prop_assert!(hermiticity_error(&h) < 1e-12);
            prop_assert!(frobenius(&commutator(&h, &parity(&spec))) < 1e-10);
        }

        #[test]
        fn rotating_frame_is_hermitian(t in 0.0f64..3.0, eps2 in 0.0f64..100.0) {
            for levels in [2, 3] {
                let spec = HilbertSpec::new(5, levels).unwrap();
                let m = RotatingFrameModel::new(spec, &DeviceParams::table_s2(), 8).unwrap();
                let h = m.hamiltonian(t, eps2, 3.0);
                prop_assert!(hermiticity_error(&h) < 1e-12);
            }
        }
    }

    #[test]
    fn unmodulated_drive_at_zero_time() {
        let mut dev = DeviceParams::table_s2();
        dev.eps1 = 0.0;
        let spec = HilbertSpec::qubit(4).unwrap();
        let h = rotating_frame_hamiltonian(&spec, &dev, 0.0, 0.0).unwrap();
        let sm = sigma_minus(&spec);
        let a = annihilation_joint(&spec);
        let want = (sm.clone() + sm.adjoint()) * c(dev.k_drive)
            + (a.adjoint() * &sm + a * sm.adjoint()) * c(dev.lambda);
        assert!(frobenius(&(h - want)) < 1e-9);
    }

    #[test]
    fn resonant_terms_average_to_rabi_in_precessing_frame() {
        // Keep only the m = 2 coupling and m = 0 drive sidebands, tune the slow
        // modulation onto B₀, and average the B₀-frame Hamiltonian over one
        // precession period: the result is H_R with η = λJ₂/2 and Ω = ε₂/2.
        let spec = HilbertSpec::qubit(5).unwrap();
        let mut dev = DeviceParams::table_s2();
        dev.eps2 = mhz(4.0);
        let p = effective_from_device(&dev, mhz(0.4));
        let b0 = p.b0;
        let mu = dev.mu();
        let a = annihilation_joint(&spec);
        let sm = sigma_minus(&spec);
        let res = a.adjoint() * &sm * c(dev.lambda * bessel_j(2, mu))
            + &sm * c(dev.k_drive * bessel_j(0, mu));
        let static_part = &res + res.adjoint() + number_joint(&spec) * c(p.delta);
        let sx = sigma_x(&spec);
        let sz = sigma_z(&spec);
        let samples = 4000;
        let period = 2.0 * std::f64::consts::PI / b0;
        let mut avg = ComplexOperator::zeros(spec.dim(), spec.dim());
        let model = {
            let mut d = dev;
            d.nu2 = b0;
            RotatingFrameModel::new(spec, &d, 8).unwrap()
        };
        for s in 0..samples {
            let t = period * (s as f64 + 0.5) / samples as f64;
            let h = &static_part + &sz * c(0.5 * dev.eps2 * (b0 * t).cos());
            let u = model.rabi_frame_unitary(t);
            let hf = &u * h * u.adjoint() - &sx * c(b0 / 2.0);
            avg += hf / c(samples as f64);
        }
        let want = rabi_hamiltonian(&spec, &EffectiveParams::new(p.eta, dev.eps2 / 2.0, p.delta))
            .unwrap();
        assert!(frobenius(&(avg - want)) < 1e-9);
    }

    #[test]
    fn level_names_parse() {
        for l in [HamiltonianLevel::Rabi, HamiltonianLevel::Rotating, HamiltonianLevel::ThreeLevel] {
            assert_eq!(l.name().parse::<HamiltonianLevel>().unwrap(), l);
        }
        assert!("full".parse::<HamiltonianLevel>().is_err());
    }
}
