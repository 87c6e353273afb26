//! Rotated-basis protocol for the off-diagonal Wigner element.
//!
//! A qubit rotation `U_J` maps `|+J⟩ → |e⟩` and `|−J⟩ → |g⟩`, so reading the
//! qubit after `U_J` projects onto `|±J⟩` with `|±x⟩ = (|e⟩ ± |g⟩)/√2` and
//! `|±y⟩ = (|e⟩ ± i|g⟩)/√2`. The diagonal maps of these outcomes give
//! `Re W_eg = ½(W₊ₓ − W₋ₓ)` and `Im W_eg = ½(W₋ᵧ − W₊ᵧ)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wigner::{check_grid, kernel_value, parity_kernel};
use crate::error::{Error, Result};
use crate::hilbert::{ComplexOperator, QuantumState};
use crate::pool::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisSetting {
    /// No rotation: outcomes `e` (plus) and `g` (minus).
    Identity,
    /// `R_y(π/2)`: outcomes `±x`.
    RotateY,
    /// `R_x(π/2)`: outcomes `±y`.
    RotateX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Plus,
    Minus,
}

impl BasisSetting {
    pub const ALL: [BasisSetting; 3] =
        [BasisSetting::Identity, BasisSetting::RotateY, BasisSetting::RotateX];

    pub fn name(self) -> &'static str {
        match self {
            BasisSetting::Identity => "identity",
            BasisSetting::RotateY => "ry-pi/2",
            BasisSetting::RotateX => "rx-pi/2",
        }
    }

    /// Amplitudes `(⟨g|±J⟩, ⟨e|±J⟩)` of the projected qubit state.
    pub fn ket(self, outcome: Outcome) -> [Complex64; 2] {
        let s = match outcome {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        };
        let h = FRAC_1_SQRT_2;
        match (self, outcome) {
            (BasisSetting::Identity, Outcome::Plus) => [c(0.0, 0.0), c(1.0, 0.0)],
            (BasisSetting::Identity, Outcome::Minus) => [c(1.0, 0.0), c(0.0, 0.0)],
            (BasisSetting::RotateY, _) => [c(s * h, 0.0), c(h, 0.0)],
            (BasisSetting::RotateX, _) => [c(0.0, s * h), c(h, 0.0)],
        }
    }

    /// `U_J = |e⟩⟨+J| + |g⟩⟨−J|` on `{g, e}`.
    pub fn rotation(self) -> ComplexOperator {
        let p = self.ket(Outcome::Plus);
        let m = self.ket(Outcome::Minus);
        ComplexOperator::from_fn(2, 2, |row, col| {
            if row == 1 {
                p[col].conj()
            } else {
                m[col].conj()
            }
        })
    }

    /// `⟨±J|ρ|±J⟩`, the unnormalized resonator state after the outcome.
    pub fn conditional_block(self, state: &QuantumState, outcome: Outcome) -> Result<ComplexOperator> {
        let amp = self.ket(outcome);
        let n = state.spec().n_fock();
        let mut out = ComplexOperator::zeros(n, n);
        for k in 0..2 {
            for kp in 0..2 {
                let w = amp[k].conj() * amp[kp];
                if w.norm() > 0.0 {
                    out += state.qubit_block(k, kp)? * w;
                }
            }
        }
        Ok(out)
    }

    /// Outcome probabilities `(P₊, P₋)`.
    pub fn populations(self, state: &QuantumState) -> (f64, f64) {
        let tr = |o| {
            self.conditional_block(state, o)
                .map(|b| b.diagonal().iter().map(|z| z.re).sum::<f64>())
                .unwrap_or(0.0)
        };
        (tr(Outcome::Plus), tr(Outcome::Minus))
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The three qubit settings of the protocol, in measurement order.
pub fn rotated_basis_settings() -> [BasisSetting; 3] {
    BasisSetting::ALL
}

/// Unnormalized diagonal Wigner map `W_{±J,±J}` of one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMap {
    pub setting: BasisSetting,
    pub outcome: Outcome,
    pub beta: Vec<Complex64>,
    pub values: Vec<f64>,
}

/// Exact `W_{±J,±J}(β) = (2/π) Tr[⟨±J|ρ|±J⟩ D(2β)Π]`.
pub fn diagonal_forward(
    state: &QuantumState,
    setting: BasisSetting,
    outcome: Outcome,
    beta: &[Complex64],
) -> Result<DiagonalMap> {
    check_grid(beta)?;
    let block = setting.conditional_block(state, outcome)?;
    let n = block.nrows();
    let values = par_map(beta.to_vec(), |b| kernel_value(&block, &parity_kernel(n, b)).re);
    Ok(DiagonalMap {
        setting,
        outcome,
        beta: beta.to_vec(),
        values,
    })
}

/// Off-diagonal element assembled from the four rotated maps.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedCombination {
    pub re_w_eg: Vec<f64>,
    pub im_w_eg: Vec<f64>,
    /// `max_β |(W₊ₓ + W₋ₓ) − (W₊ᵧ + W₋ᵧ)|`: both sums equal `W_ee + W_gg`.
    pub trace_discrepancy: f64,
}

pub fn combine_rotated(
    plus_x: &DiagonalMap,
    minus_x: &DiagonalMap,
    plus_y: &DiagonalMap,
    minus_y: &DiagonalMap,
) -> Result<RotatedCombination> {
    let maps = [plus_x, minus_x, plus_y, minus_y];
    let expected = [
        (BasisSetting::RotateY, Outcome::Plus),
        (BasisSetting::RotateY, Outcome::Minus),
        (BasisSetting::RotateX, Outcome::Plus),
        (BasisSetting::RotateX, Outcome::Minus),
    ];
    for (m, (s, o)) in maps.iter().zip(expected) {
        if m.setting != s || m.outcome != o {
            return Err(Error::GridMismatch(format!(
                "expected the {} {:?} map, got {} {:?}",
                s.name(),
                o,
                m.setting.name(),
                m.outcome
            )));
        }
        if m.beta != plus_x.beta || m.values.len() != m.beta.len() {
            return Err(Error::GridMismatch("rotated maps use different β grids".into()));
        }
    }
    let n = plus_x.beta.len();
    let mut out = RotatedCombination {
        re_w_eg: Vec::with_capacity(n),
        im_w_eg: Vec::with_capacity(n),
        trace_discrepancy: 0.0,
    };
    for i in 0..n {
        let (px, mx, py, my) = (plus_x.values[i], minus_x.values[i], plus_y.values[i], minus_y.values[i]);
        out.re_w_eg.push(0.5 * (px - mx));
        out.im_w_eg.push(0.5 * (my - py));
        out.trace_discrepancy = out.trace_discrepancy.max(((px + mx) - (py + my)).abs());
    }
    Ok(out)
}
