//! Phase-space separation of the normal-phase vacuum from the
//! superradiant lobes, and the super-cat size.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coherence::block_trace;
use crate::error::{Error, Result};
use crate::hilbert::{coherent_ket, ComplexOperator};

/// Lobes closer to the origin than this are not searched for.
const MIN_LOBE_RADIUS: f64 = 1.0;
/// Largest annulus mass accepted by [`separate_phases`].
pub const ANNULUS_LIMIT: f64 = 0.10;

/// `⟨β|σ|β⟩` (the Husimi function times π).
pub fn husimi(sigma: &ComplexOperator, beta: Complex64) -> f64 {
    let k = coherent_ket(sigma.nrows(), beta);
    (k.adjoint() * sigma * &k)[(0, 0)].re
}

/// Location of the largest Husimi value with `|β| ≥ 1`: a grid search
/// followed by pattern-search refinement.
pub fn husimi_peak(sigma: &ComplexOperator) -> Complex64 {
    let n = sigma.nrows() as f64;
    // Keep coherent probes well inside the truncated space: |β|² + 4|β| ≤ n.
    let r_max = (-2.0 + (4.0 + n).sqrt()).max(MIN_LOBE_RADIUS + 0.5);
    let h = 0.2;
    let steps = (r_max / h).ceil() as i32;
    let mut best = (f64::NEG_INFINITY, Complex64::new(MIN_LOBE_RADIUS, 0.0));
    for i in -steps..=steps {
        for j in -steps..=steps {
            let b = Complex64::new(i as f64 * h, j as f64 * h);
            let r = b.norm();
            if !(MIN_LOBE_RADIUS..=r_max).contains(&r) {
                continue;
            }
            let q = husimi(sigma, b);
            if q > best.0 + 1e-14 {
                best = (q, b);
            }
        }
    }
    let (mut q, mut b) = best;
    let mut step = h / 2.0;
    while step > 1e-7 {
        let mut improved = false;
        for d in [Complex64::new(step, 0.0), Complex64::new(-step, 0.0), Complex64::new(0.0, step), Complex64::new(0.0, -step)] {
            let cand = b + d;
            if cand.norm() < MIN_LOBE_RADIUS {
                continue;
            }
            let qc = husimi(sigma, cand);
            if qc > q {
                q = qc;
                b = cand;
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    b
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseSeparation {
    pub alpha_hat: Complex64,
    /// Radius of the vacuum disk, `|α̂|/2`.
    pub r_cut: f64,
    /// Fock states `n < r_cut²` assigned to the normal phase.
    pub n_cut: usize,
    /// `(w_np, w_sp)`, summing to one.
    pub weights: (f64, f64),
    /// Population of the Fock shells `r_cut² ≤ n < 2 r_cut²` just outside
    /// the disk (at least one shell), where neither phase dominates.
    pub annulus_mass: f64,
    /// Vacuum population carried by the superradiant lobes themselves,
    /// from their coherent-state decomposition.
    pub sp_vacuum_population: f64,
    #[serde(skip)]
    pub rho_np: Option<ComplexOperator>,
    #[serde(skip)]
    pub rho_sp: Option<ComplexOperator>,
}

/// Splits a resonator block into its vacuum-disk and lobe parts.
///
/// A phase-space disk centered at the origin is rotationally symmetric,
/// so the projection onto it is diagonal in the Fock basis: Fock state `n`
/// lives on the ring of radius `√n`. The normal phase keeps the rings
/// inside `r_cut = |α̂|/2`, the superradiant phase the rest.
pub fn separate_phases(block: &ComplexOperator) -> Result<PhaseSeparation> {
    let tr = block_trace(block)?;
    let sigma = block / Complex64::new(tr, 0.0);
    let n = sigma.nrows();
    let alpha_hat = husimi_peak(&sigma);
    let r_cut = alpha_hat.norm() / 2.0;
    let cut2 = r_cut * r_cut;
    let n_cut = ((cut2.ceil() as usize).max(1)).min(n);
    let pops: Vec<f64> = (0..n).map(|k| sigma[(k, k)].re).collect();
    let w_np: f64 = pops[..n_cut].iter().sum();
    // At least the first shell beyond the disk counts, so small disks still
    // detect weight spilling out of them.
    let annulus_end = ((2.0 * cut2).ceil() as usize).max(n_cut + 1).min(n);
    let annulus_mass: f64 = (n_cut..annulus_end)
        .map(|k| pops[k])
        .sum();
    if annulus_mass > ANNULUS_LIMIT {
        return Err(Error::NotSeparable {
            annulus: annulus_mass,
            limit: ANNULUS_LIMIT,
        });
    }
    let w_sp = (1.0 - w_np).max(0.0);
    let part = |range: std::ops::Range<usize>, w: f64| {
        (w > 1e-12).then(|| {
            let mut m = ComplexOperator::zeros(n, n);
            for i in range.clone() {
                for j in range.clone() {
                    m[(i, j)] = sigma[(i, j)] / w;
                }
            }
            m
        })
    };
    let rho_np = part(0..n_cut, w_np);
    let rho_sp = part(n_cut..n, w_sp);
    let sp_vacuum_population = match &rho_sp {
        Some(sp) => lobe_vacuum_population(sp, alpha_hat)?,
        None => 0.0,
    };
    Ok(PhaseSeparation {
        alpha_hat,
        r_cut,
        n_cut,
        weights: (w_np, w_sp),
        annulus_mass,
        sp_vacuum_population,
        rho_np,
        rho_sp,
    })
}

/// Coefficients `C` of `P σ P = Σ C_ij |φ_i⟩⟨φ_j|` for the (non-orthogonal)
/// components `φ = (|0⟩, |α⟩, |−α⟩)`, via the inverse Gram matrix.
fn component_coefficients(sigma: &ComplexOperator, alpha: Complex64) -> Result<(ComplexOperator, Vec<crate::hilbert::Ket>)> {
    let n = sigma.nrows();
    let phis = vec![
        coherent_ket(n, Complex64::new(0.0, 0.0)),
        coherent_ket(n, alpha),
        coherent_ket(n, -alpha),
    ];
    let gram = ComplexOperator::from_fn(3, 3, |i, j| phis[i].dotc(&phis[j]));
    let m = ComplexOperator::from_fn(3, 3, |i, j| (phis[i].adjoint() * sigma * &phis[j])[(0, 0)]);
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("cat components are linearly dependent".into()))?;
    Ok((&inv * m * &inv, phis))
}

fn lobe_vacuum_population(sp: &ComplexOperator, alpha: Complex64) -> Result<f64> {
    let (c, phis) = component_coefficients(sp, alpha)?;
    let mut vac = Complex64::new(0.0, 0.0);
    let mut norm = Complex64::new(0.0, 0.0);
    for i in 1..3 {
        for j in 1..3 {
            vac += c[(i, j)] * phis[i][0] * phis[j][0].conj();
            norm += c[(i, j)] * phis[j].dotc(&phis[i]);
        }
    }
    Ok(if norm.re > 0.0 { (vac.re / norm.re).max(0.0) } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatAnalysis {
    pub alpha_hat: Complex64,
    /// `(P_0, P_{+α}, P_{−α})`.
    pub populations: (f64, f64, f64),
    /// Weight outside the three-component model.
    pub remainder: f64,
    /// Size with pair weights `|α|²` (vacuum to lobe) and `2|α|²` (lobe to
    /// lobe); a balanced two-component cat gives `2|α|²`.
    pub cat_size: f64,
    /// Size with the squared phase-space distances `|α|²` and `4|α|²` as
    /// pair weights.
    pub cat_size_distance: f64,
    /// `4|α̂|²`.
    pub d_squared: f64,
}

/// Three-component analysis of a resonator block. With `alpha = None` the
/// amplitude comes from [`separate_phases`].
pub fn cat_analysis(block: &ComplexOperator, alpha: Option<Complex64>) -> Result<CatAnalysis> {
    let tr = block_trace(block)?;
    let alpha_hat = match alpha {
        Some(a) => a,
        None => separate_phases(block)?.alpha_hat,
    };
    let sigma = block / Complex64::new(tr, 0.0);
    let (c, _) = component_coefficients(&sigma, alpha_hat)?;
    let mut p: Vec<f64> = (0..3).map(|i| c[(i, i)].re.clamp(0.0, 1.0)).collect();
    let total: f64 = p.iter().sum();
    if total > 1.0 {
        p.iter_mut().for_each(|v| *v /= total);
    }
    let remainder = (1.0 - p.iter().sum::<f64>()).max(0.0);
    let a2 = alpha_hat.norm_sqr();
    Ok(CatAnalysis {
        alpha_hat,
        populations: (p[0], p[1], p[2]),
        remainder,
        cat_size: super_cat_size(p[0], p[1], p[2], a2, 2.0 * a2),
        cat_size_distance: super_cat_size(p[0], p[1], p[2], a2, 4.0 * a2),
        d_squared: 4.0 * a2,
    })
}

/// Pair-weighted size `Σ d_sl² √(P_s P_l) / Σ √(P_s P_l)` over the pairs
/// (0, +), (0, −) and (+, −).
pub fn super_cat_size(p0: f64, pp: f64, pm: f64, vac_lobe: f64, lobe_lobe: f64) -> f64 {
    let w = [(p0 * pp).sqrt(), (p0 * pm).sqrt(), (pp * pm).sqrt()];
    let den: f64 = w.iter().sum();
    if den == 0.0 {
        return 0.0;
    }
    (w[0] * vac_lobe + w[1] * vac_lobe + w[2] * lobe_lobe) / den
}
