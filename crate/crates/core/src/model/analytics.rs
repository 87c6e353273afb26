//! Schrieffer–Wolff low-energy description of the Rabi model in the
//! `Ω/δ → ∞` limit: squeezed vacuum below the critical coupling, displaced
//! squeezed states with a tilted qubit above it.

use serde::{Deserialize, Serialize};

use super::EffectiveParams;
use crate::error::{Error, Result};
use crate::hilbert::{
    cplx, displacement, product_ket, qubit_ket, squeezing, HilbertSpec, Ket,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Normal,
    Superradiant,
}

/// Sign of the field amplitude of a superradiant branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwAnalytics {
    pub phase: Phase,
    pub xi: f64,
    pub r: f64,
    /// Field amplitude of the superradiant branches; zero in the normal phase.
    pub alpha: f64,
    /// Qubit tilt angle of the superradiant branches; zero in the normal phase.
    pub theta: f64,
    pub energy_gap: f64,
}

pub fn np_sp_analytics(p: &EffectiveParams) -> Result<SwAnalytics> {
    if !(p.omega * p.delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need omega * delta > 0, got omega = {}, delta = {}",
            p.omega, p.delta
        )));
    }
    let xi = p.xi();
    if (xi - 1.0).abs() < 1e-12 {
        return Err(Error::CriticalPoint { xi });
    }
    let x2 = xi * xi;
    Ok(if xi < 1.0 {
        SwAnalytics {
            phase: Phase::Normal,
            xi,
            r: -0.25 * (1.0 - x2).ln(),
            alpha: 0.0,
            theta: 0.0,
            energy_gap: p.delta * (1.0 - x2).sqrt(),
        }
    } else {
        let x4 = x2 * x2;
        SwAnalytics {
            phase: Phase::Superradiant,
            xi,
            r: -0.25 * (1.0 - 1.0 / x4).ln(),
            alpha: ((p.omega / (4.0 * x2 * p.delta)) * (x4 - 1.0)).sqrt(),
            theta: ((x2 - 1.0) / (x2 + 1.0)).sqrt().atan(),
            energy_gap: p.delta * (1.0 - 1.0 / x4).sqrt(),
        }
    })
}

impl SwAnalytics {
    /// `S(r)|0⟩|g⟩`.
    pub fn np_ground_ket(&self, spec: &HilbertSpec) -> Result<Ket> {
        if self.phase != Phase::Normal {
            return Err(Error::InvalidParameter(format!(
                "normal-phase ground state requested at xi = {} > 1",
                self.xi
            )));
        }
        let field = squeezing(spec.n_fock(), self.r)?.column(0).into_owned();
        let qubit = qubit_ket(spec.n_qubit_levels(), &[cplx(1.0, 0.0)]);
        Ok(product_ket(&qubit, &field))
    }

    /// `D(±α)S(r)|0⟩ ⊗ (∓sinθ|e⟩ + cosθ|g⟩)`.
    pub fn sp_ground_ket(&self, spec: &HilbertSpec, branch: Branch) -> Result<Ket> {
        if self.phase != Phase::Superradiant {
            return Err(Error::InvalidParameter(format!(
                "superradiant ground state requested at xi = {} < 1",
                self.xi
            )));
        }
        let s = branch.sign();
        let n = spec.n_fock();
        let vac_sq = squeezing(n, self.r)?.column(0).into_owned();
        let field = displacement(n, cplx(s * self.alpha, 0.0))? * vac_sq;
        let qubit = qubit_ket(
            spec.n_qubit_levels(),
            &[cplx(self.theta.cos(), 0.0), cplx(-s * self.theta.sin(), 0.0)],
        );
        Ok(product_ket(&qubit, &field))
    }

    /// Even-parity superposition `(|ψ₊⟩ + |ψ₋⟩)/‖·‖`; the norm accounts for
    /// the overlap of the two branches.
    pub fn sp_cat_ket(&self, spec: &HilbertSpec) -> Result<Ket> {
        let psi = self.sp_ground_ket(spec, Branch::Plus)? + self.sp_ground_ket(spec, Branch::Minus)?;
        let norm = psi.norm();
        Ok(psi / cplx(norm, 0.0))
    }
}
