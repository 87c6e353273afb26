//! Operator constructors and small dense helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{matrix_exp, ComplexOperator, HilbertSpec, Ket};
use crate::error::{Error, Result};

/// Leakage beyond the Fock cutoff above which constructors refuse to build.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexOperator {
    DMatrix::identity(n, n)
}

pub fn dagger(a: &ComplexOperator) -> ComplexOperator {
    a.adjoint()
}

pub fn frobenius(a: &ComplexOperator) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &ComplexOperator, b: &ComplexOperator) -> ComplexOperator {
    a * b - b * a
}

/// ‖A − A†‖_F / max(‖A‖_F, 1).
pub fn hermiticity_error(a: &ComplexOperator) -> f64 {
    frobenius(&(a - a.adjoint())) / frobenius(a).max(1.0)
}

pub fn hermitize(a: &ComplexOperator) -> ComplexOperator {
    (a + a.adjoint()) * cplx(0.5, 0.0)
}

pub fn trace(a: &ComplexOperator) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Kronecker product `a ⊗ b` with `a` as the slow (outer) index.
pub fn kron(a: &ComplexOperator, b: &ComplexOperator) -> ComplexOperator {
    a.kronecker(b)
}

pub fn ket_to_density(psi: &Ket) -> ComplexOperator {
    psi * psi.adjoint()
}

pub fn expectation(op: &ComplexOperator, rho: &ComplexOperator) -> Complex64 {
    // Tr(op * rho) without forming the product.
    let n = op.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Resonator factor

pub fn annihilation(n_fock: usize) -> ComplexOperator {
    let mut a = DMatrix::zeros(n_fock, n_fock);
    for n in 1..n_fock {
        a[(n - 1, n)] = cplx((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(n_fock: usize) -> ComplexOperator {
    annihilation(n_fock).adjoint()
}

pub fn number(n_fock: usize) -> ComplexOperator {
    DMatrix::from_diagonal(&DVector::from_fn(n_fock, |n, _| cplx(n as f64, 0.0)))
}

/// Photon parity `(-1)^{a†a}`.
pub fn photon_parity(n_fock: usize) -> ComplexOperator {
    DMatrix::from_diagonal(&DVector::from_fn(n_fock, |n, _| {
        cplx(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    }))
}

pub fn fock_ket(n_fock: usize, n: usize) -> Ket {
    let mut v = DVector::zeros(n_fock);
    v[n] = ONE;
    v
}

/// Coherent state `|α⟩` truncated to `n_fock` levels (not renormalized).
pub fn coherent_ket(n_fock: usize, alpha: Complex64) -> Ket {
    let mut v = DVector::zeros(n_fock);
    let mut c = cplx((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = c;
    for n in 1..n_fock {
        c = c * alpha / (n as f64).sqrt();
        v[n] = c;
    }
    v
}

/// `P(N ≥ n)` for `N ~ Poisson(mean)`.
pub fn poisson_tail(mean: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let mut term = (-mean + n as f64 * mean.ln() - ln_fact).exp();
    let mut sum = 0.0_f64;
    let mut k = n;
    while term > 1e-18 * sum.max(1e-300) || (k as f64) < mean {
        sum += term;
        k += 1;
        term *= mean / k as f64;
        if k > n + 10_000 {
            break;
        }
    }
    sum.min(1.0)
}

fn padded_generator_exp(
    n_fock: usize,
    work: usize,
    generator: impl Fn(&ComplexOperator, &ComplexOperator) -> ComplexOperator,
) -> Result<ComplexOperator> {
    let a = annihilation(work);
    let ad = a.adjoint();
    let full = matrix_exp(&generator(&a, &ad))?;
    Ok(full.view((0, 0), (n_fock, n_fock)).into_owned())
}

/// Displacement `D(β) = exp(β a† − β* a)` restricted to the first `n_fock`
/// levels. The exponential is taken in a padded space so the retained block
/// is free of truncation artefacts.
pub fn displacement(n_fock: usize, beta: Complex64) -> Result<ComplexOperator> {
    let leakage = poisson_tail(beta.norm_sqr(), n_fock);
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::Truncation {
            leakage,
            limit: LEAKAGE_LIMIT,
            context: format!("displacement |beta| = {:.3} at n_fock = {n_fock}", beta.norm()),
        });
    }
    if beta.norm() == 0.0 {
        return Ok(identity(n_fock));
    }
    let b = beta.norm();
    let work = n_fock + 30 + (6.0 * b * b + 12.0 * b).ceil() as usize;
    padded_generator_exp(n_fock, work, |a, ad| ad * beta - a * beta.conj())
}

/// Photon distribution of the squeezed vacuum `S(r)|0⟩` (even levels only).
pub fn squeezed_vacuum_distribution(r: f64, n_max: usize) -> Vec<f64> {
    let t2 = r.tanh().powi(2);
    let mut out = vec![0.0; n_max];
    let mut p = 1.0 / r.cosh();
    for m in 0.. {
        let n = 2 * m;
        if n >= n_max {
            break;
        }
        out[n] = p;
        // P_{2m+2}/P_{2m} = tanh² r · (2m+1)/(2m+2)
        p *= t2 * (2 * m + 1) as f64 / (2 * m + 2) as f64;
    }
    out
}

/// Squeezing `S(r) = exp[(r a†² − r a²)/2]` for real `r`.
pub fn squeezing(n_fock: usize, r: f64) -> Result<ComplexOperator> {
    let leakage = 1.0 - squeezed_vacuum_distribution(r, n_fock).iter().sum::<f64>();
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::Truncation {
            leakage,
            limit: LEAKAGE_LIMIT,
            context: format!("squeezing r = {r:.3} at n_fock = {n_fock}"),
        });
    }
    if r == 0.0 {
        return Ok(identity(n_fock));
    }
    let work = 2 * n_fock + 20;
    padded_generator_exp(n_fock, work, |a, ad| {
        (ad * ad - a * a) * cplx(0.5 * r, 0.0)
    })
}

/// Exact matrix elements `⟨m|D(γ)|n⟩` for `m < rows`, `n < cols`.
///
/// Uses the closed form `√(n!/m!) γ^{m−n} e^{−|γ|²/2} L_n^{(m−n)}(|γ|²)` for
/// `m ≥ n` (and its adjoint counterpart otherwise), with the factorial and
/// power prefactor accumulated in log space so large shifts neither
/// overflow nor underflow. No Fock truncation is involved.
pub fn displacement_elements(rows: usize, cols: usize, gamma: Complex64) -> ComplexOperator {
    let x = gamma.norm_sqr();
    let mut d = DMatrix::zeros(rows, cols);
    if x == 0.0 {
        for i in 0..rows.min(cols) {
            d[(i, i)] = ONE;
        }
        return d;
    }
    let ln_r = 0.5 * x.ln();
    let phase = gamma / gamma.norm();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..rows.max(cols)).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    for m in 0..rows {
        for n in 0..cols {
            let (lo, hi) = if m >= n { (n, m) } else { (m, n) };
            let k = hi - lo;
            let lag = laguerre(lo, k as f64, x);
            if lag == 0.0 {
                continue;
            }
            let ln_mag = 0.5 * (ln_fact[lo] - ln_fact[hi]) + k as f64 * ln_r - 0.5 * x
                + lag.abs().ln();
            let mag = ln_mag.exp() * lag.signum();
            // γ^k for m ≥ n, (−γ*)^k otherwise.
            let ph = if m >= n {
                phase.powu(k as u32)
            } else {
                (-phase.conj()).powu(k as u32)
            };
            d[(m, n)] = ph * mag;
        }
    }
    d
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` by upward recurrence.
fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

// ---------------------------------------------------------------------------
// Qubit factor and joint space

/// Qubit matrix on the `n_qubit_levels` space with `|k⟩⟨l|` set to one.
pub fn qubit_transition(levels: usize, k: usize, l: usize) -> ComplexOperator {
    let mut m = DMatrix::zeros(levels, levels);
    m[(k, l)] = ONE;
    m
}

/// Embeds a qubit-factor operator as `q ⊗ I_fock`.
pub fn on_qubit(spec: &HilbertSpec, q: &ComplexOperator) -> ComplexOperator {
    kron(q, &identity(spec.n_fock()))
}

/// Embeds a resonator-factor operator as `I_qubit ⊗ r`.
pub fn on_resonator(spec: &HilbertSpec, r: &ComplexOperator) -> ComplexOperator {
    kron(&identity(spec.n_qubit_levels()), r)
}

pub fn annihilation_joint(spec: &HilbertSpec) -> ComplexOperator {
    on_resonator(spec, &annihilation(spec.n_fock()))
}

pub fn number_joint(spec: &HilbertSpec) -> ComplexOperator {
    on_resonator(spec, &number(spec.n_fock()))
}

/// `σ₋ = |g⟩⟨e|` on the qubit factor.
pub fn sigma_minus(spec: &HilbertSpec) -> ComplexOperator {
    on_qubit(spec, &qubit_transition(spec.n_qubit_levels(), 0, 1))
}

/// `σ_z = |e⟩⟨e| − |g⟩⟨g|` (zero on `|f⟩`).
pub fn sigma_z(spec: &HilbertSpec) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    on_qubit(spec, &(qubit_transition(l, 1, 1) - qubit_transition(l, 0, 0)))
}

/// `σ_x = σ₋ + σ₊`.
pub fn sigma_x(spec: &HilbertSpec) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    on_qubit(spec, &(qubit_transition(l, 0, 1) + qubit_transition(l, 1, 0)))
}

/// `σ_y = iσ₋ − iσ₊`.
pub fn sigma_y(spec: &HilbertSpec) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    let i = cplx(0.0, 1.0);
    on_qubit(spec, &((qubit_transition(l, 0, 1) - qubit_transition(l, 1, 0)) * i))
}

/// Transmon lowering operator `q = |g⟩⟨e| + √2 |e⟩⟨f|` (just `σ₋` for two levels).
pub fn qubit_lowering(spec: &HilbertSpec) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    let mut q = qubit_transition(l, 0, 1);
    if l == 3 {
        q += qubit_transition(l, 1, 2) * cplx(2f64.sqrt(), 0.0);
    }
    on_qubit(spec, &q)
}

/// `q†q = diag(0, 1, 2)` on the qubit factor.
pub fn qubit_number(spec: &HilbertSpec) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    let q = DMatrix::from_diagonal(&DVector::from_fn(l, |k, _| cplx(k as f64, 0.0)));
    on_qubit(spec, &q)
}

pub fn qubit_projector(spec: &HilbertSpec, level: usize) -> ComplexOperator {
    on_qubit(spec, &qubit_transition(spec.n_qubit_levels(), level, level))
}

/// Total excitation parity `Π = (−1)^{a†a + q†q}`; `|g⟩|0⟩` has `Π = +1`.
/// On the two-level subspace this is `−σ_z ⊗ (−1)^{a†a}`.
pub fn parity(spec: &HilbertSpec) -> ComplexOperator {
    let l = spec.n_qubit_levels();
    let q = DMatrix::from_diagonal(&DVector::from_fn(l, |k, _| {
        cplx(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    }));
    kron(&q, &photon_parity(spec.n_fock()))
}

/// Product ket `|q⟩ ⊗ |r⟩`.
pub fn product_ket(qubit: &Ket, resonator: &Ket) -> Ket {
    qubit.kronecker(resonator)
}

pub fn qubit_ket(levels: usize, amplitudes: &[Complex64]) -> Ket {
    let mut v = DVector::zeros(levels);
    for (k, a) in amplitudes.iter().enumerate() {
        v[k] = *a;
    }
    v
}
