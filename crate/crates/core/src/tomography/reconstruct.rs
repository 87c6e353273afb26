//! Density-matrix reconstruction from sampled Wigner-matrix values.
//!
//! Every sample is a real linear functional `Tr[ρ M]` of the joint state
//! with a Hermitian `M` built from the parity kernel. In the orthonormal
//! real coordinates `(ρ_ii, √2 Re ρ_ij, √2 Im ρ_ij)` these functionals are
//! plain dot products, so the problem becomes a linear least-squares fit
//! over the convex set of density matrices. It is solved by accelerated
//! projected gradient (FISTA with adaptive restart), started from the
//! projection of the unconstrained least-squares solution. Each projection
//! clips the spectrum onto the probability simplex.

use std::f64::consts::FRAC_2_PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wigner::{parity_kernel, WignerRecord};
use crate::error::{Error, Result};
use crate::hilbert::{ComplexOperator, HilbertSpec, QuantumState};
use crate::pool::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionOptions {
    pub max_iterations: usize,
    /// Stop once an iteration moves the estimate by less than this
    /// (Frobenius norm), or changes the squared misfit by less than this
    /// fraction of itself.
    pub tolerance: f64,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub rho_hat: QuantumState,
    /// RMS misfit to the samples used.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Element {
    Ee,
    Gg,
    ReEg,
    ImEg,
}

/// Real dimension of the `d × d` Hermitian matrices.
fn coordinate_count(d: usize) -> usize {
    d * d
}

/// Real coordinates of a Hermitian matrix.
fn to_coordinates(m: &ComplexOperator) -> DVector<f64> {
    let d = m.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            v.push(s2 * m[(i, j)].re);
            v.push(s2 * m[(i, j)].im);
        }
    }
    DVector::from_vec(v)
}

fn from_coordinates(x: &DVector<f64>, d: usize) -> ComplexOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexOperator::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(x[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = Complex64::new(h * x[k], h * x[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Hermitian functional of one sample, with qubit order g = 0, e = 1.
fn sample_functional(kernel: &ComplexOperator, element: Element) -> ComplexOperator {
    let n = kernel.nrows();
    let mut m = ComplexOperator::zeros(2 * n, 2 * n);
    let k = kernel * Complex64::new(FRAC_2_PI, 0.0);
    match element {
        Element::Ee => m.view_mut((n, n), (n, n)).copy_from(&k),
        Element::Gg => m.view_mut((0, 0), (n, n)).copy_from(&k),
        Element::ReEg | Element::ImEg => {
            // X = |g⟩⟨e| ⊗ K gives Tr[ρX] = W_eg; take its Hermitian and
            // anti-Hermitian parts.
            let (upper, lower) = if element == Element::ReEg {
                (k.clone() * Complex64::new(0.5, 0.0), k.adjoint() * Complex64::new(0.5, 0.0))
            } else {
                (k.clone() * Complex64::new(0.0, -0.5), k.adjoint() * Complex64::new(0.0, 0.5))
            };
            m.view_mut((0, n), (n, n)).copy_from(&upper);
            m.view_mut((n, 0), (n, n)).copy_from(&lower);
        }
    }
    m
}

/// Projects a Hermitian matrix onto density matrices (PSD, unit trace).
pub fn project_to_density(m: &ComplexOperator) -> ComplexOperator {
    let eig = nalgebra::SymmetricEigen::new(crate::hilbert::hermitize(m));
    let lam: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let p = project_to_simplex(&lam);
    let v = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * p[j]);
    crate::hilbert::hermitize(&(scaled * v.adjoint()))
}

/// Euclidean projection onto `{p ≥ 0, Σp = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Fits a density matrix on `spec` (two-level qubit) to the unmasked
/// samples of `record`.
///
/// Returns the best iterate with `converged = false` when the iteration
/// budget runs out; the caller decides whether that is fatal.
pub fn reconstruct_density(
    record: &WignerRecord,
    spec: HilbertSpec,
    options: &ReconstructionOptions,
) -> Result<ReconstructionResult> {
    if spec.n_qubit_levels() != 2 {
        return Err(Error::Unsupported(
            "Wigner-matrix reconstruction needs a two-level qubit".into(),
        ));
    }
    record.validate()?;
    let n = spec.n_fock();
    let d = spec.dim();
    let p = coordinate_count(d);

    let points: Vec<usize> = (0..record.len()).filter(|&i| !record.masked[i]).collect();
    let rows_per_point = par_map(points, |i| {
        let kernel = parity_kernel(n, record.beta[i]);
        let mut rows = Vec::with_capacity(4);
        for (el, w) in [
            (Element::Ee, record.w_ee[i]),
            (Element::Gg, record.w_gg[i]),
            (Element::ReEg, record.re_w_eg[i]),
            (Element::ImEg, record.im_w_eg[i]),
        ] {
            if w.is_finite() {
                rows.push((to_coordinates(&sample_functional(&kernel, el)), w));
            }
        }
        rows
    });
    let rows: Vec<(DVector<f64>, f64)> = rows_per_point.into_iter().flatten().collect();
    let m = rows.len();
    if m == 0 {
        return Err(Error::InvalidParameter("no unmasked Wigner samples".into()));
    }
    let a = DMatrix::from_fn(m, p, |r, c| rows[r].0[c]);
    let w = DVector::from_iterator(m, rows.iter().map(|r| r.1));
    let gram = a.transpose() * &a;
    let rhs = a.transpose() * &w;
    let w_sq = w.norm_squared();

    let objective = |x: &DVector<f64>| {
        // ‖Ax − w‖² = xᵀGx − 2xᵀAᵀw + ‖w‖²
        (x.dot(&(&gram * x)) - 2.0 * x.dot(&rhs) + w_sq).max(0.0)
    };
    let project = |x: &DVector<f64>| to_coordinates(&project_to_density(&from_coordinates(x, d)));

    // Warm start: projected (ridge-regularized) least-squares solution.
    let ridge = 1e-10 * gram.trace() / p as f64;
    let reg = &gram + DMatrix::identity(p, p) * ridge;
    let start = reg
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .unwrap_or_else(|| to_coordinates(&(ComplexOperator::identity(d, d) / Complex64::new(d as f64, 0.0))));
    let mut x = project(&start);

    let lipschitz = largest_eigenvalue(&gram).max(f64::MIN_POSITIVE);
    let step = 1.0 / lipschitz;
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut f = objective(&x);
    let mut best = (f, x.clone());
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let grad = &gram * &y - &rhs;
        let x_next = project(&(&y - grad * step));
        let moved = (&x_next - &x).norm();
        let f_next = objective(&x_next);
        if f_next < best.0 {
            best = (f_next, x_next.clone());
        }
        // Restart the momentum whenever it points uphill.
        let uphill = (&y - &x_next).dot(&(&x_next - &x)) > 0.0;
        let t_next = if uphill { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        y = if uphill {
            x_next.clone()
        } else {
            &x_next + (&x_next - &x) * ((t - 1.0) / t_next)
        };
        t = t_next;
        x = x_next;
        let stalled = !uphill && (f - f_next).abs() <= options.tolerance * f_next;
        f = f_next;
        if moved < options.tolerance || stalled {
            converged = true;
            break;
        }
    }
    let (f_best, x_best) = if converged && objective(&x) <= best.0 {
        (objective(&x), x)
    } else {
        best
    };
    let rho = project_to_density(&from_coordinates(&x_best, d));
    Ok(ReconstructionResult {
        rho_hat: QuantumState::new(spec, rho)?,
        residual: (f_best / m as f64).sqrt(),
        iterations,
        converged,
        samples: m,
    })
}

fn largest_eigenvalue(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i % 7) as f64 * 0.1);
    v /= v.norm();
    let mut lam = 0.0;
    for _ in 0..200 {
        let gv = g * &v;
        let next = gv.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = gv / next;
        if (next - lam).abs() <= 1e-10 * next {
            lam = next;
            break;
        }
        lam = next;
    }
    1.05 * lam
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::*;
    use crate::tomography::wigner::{square_grid, wigner_matrix_forward};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn overlap_fidelity(rho: &ComplexOperator, sigma: &ComplexOperator) -> f64 {
        // Uhlmann fidelity via the eigen-decomposition of ρ.
        let eig = nalgebra::SymmetricEigen::new(hermitize(rho));
        let v = &eig.eigenvectors;
        let sq = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * eig.eigenvalues[j].max(0.0).sqrt());
        let root = &sq * v.adjoint();
        let inner = hermitize(&(&root * sigma * &root));
        let s: f64 = hermitian_eigenvalues(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
        s * s
    }

    #[test]
    fn coordinates_are_isometric() {
        let a = hermitize(&ComplexOperator::from_fn(3, 3, |i, j| c(i as f64 + 0.5 * j as f64, j as f64 - i as f64)));
        let b = hermitize(&ComplexOperator::from_fn(3, 3, |i, j| c((i * j) as f64, 0.3 * i as f64)));
        let dot = to_coordinates(&a).dot(&to_coordinates(&b));
        assert!((dot - trace(&(&a * &b)).re).abs() < 1e-12);
        assert!(frobenius(&(from_coordinates(&to_coordinates(&a), 3) - &a)) < 1e-14);
    }

    #[test]
    fn sample_functionals_reproduce_forward_map() {
        let spec = HilbertSpec::qubit(3).unwrap();
        let psi = nalgebra::DVector::from_fn(6, |i, _| c(0.2 * i as f64 + 0.1, 0.3 - 0.1 * i as f64));
        let s = QuantumState::pure(spec, &psi).unwrap();
        let b = c(0.4, -0.3);
        let w = wigner_matrix_forward(&s, &[b]).unwrap();
        let k = parity_kernel(3, b);
        for (el, want) in [
            (Element::Ee, w.w_ee[0]),
            (Element::Gg, w.w_gg[0]),
            (Element::ReEg, w.re_w_eg[0]),
            (Element::ImEg, w.im_w_eg[0]),
        ] {
            let got = trace(&(s.rho() * sample_functional(&k, el))).re;
            assert!((got - want).abs() < 1e-12, "{el:?}");
        }
    }

    #[test]
    fn simplex_projection() {
        let p = project_to_simplex(&[0.5, 0.8, -0.2]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[2] == 0.0 && (p[1] - p[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn vacuum_round_trip() {
        let spec = HilbertSpec::qubit(3).unwrap();
        let s = QuantumState::basis(spec, 0, 0).unwrap();
        let rec = wigner_matrix_forward(&s, &square_grid(2.0, 7)).unwrap();
        let r = reconstruct_density(&rec, spec, &ReconstructionOptions::default()).unwrap();
        assert!(r.converged);
        assert!(expectation(r.rho_hat.rho(), s.rho()).re > 0.999);
    }

    #[test]
    fn maximally_mixed_round_trip() {
        let spec = HilbertSpec::qubit(3).unwrap();
        let s = QuantumState::maximally_mixed(spec);
        let rec = wigner_matrix_forward(&s, &square_grid(2.0, 7)).unwrap();
        let r = reconstruct_density(&rec, spec, &ReconstructionOptions::default()).unwrap();
        let diff = r.rho_hat.rho() - s.rho();
        assert!(diff.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-3);
    }

    #[test]
    fn masked_points_are_ignored() {
        let spec = HilbertSpec::qubit(3).unwrap();
        let s = QuantumState::basis(spec, 1, 1).unwrap();
        let mut rec = wigner_matrix_forward(&s, &square_grid(2.0, 7)).unwrap();
        rec.provenance = crate::tomography::Provenance::FitFromSignal;
        rec.w_ee[3] = 100.0;
        rec.masked[3] = true;
        let r = reconstruct_density(&rec, spec, &ReconstructionOptions::default()).unwrap();
        assert!(expectation(r.rho_hat.rho(), s.rho()).re > 0.999);
        assert_eq!(r.samples, 4 * 48);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn rank_two_round_trip(v in proptest::collection::vec(-1.0f64..1.0, 32), w in 0.2f64..0.8) {
            let n = 4;
            let spec = HilbertSpec::qubit(n).unwrap();
            let k1 = nalgebra::DVector::from_fn(8, |i, _| c(v[2 * i], v[2 * i + 1]));
            let k2 = nalgebra::DVector::from_fn(8, |i, _| c(v[16 + 2 * i], v[17 + 2 * i]));
            prop_assume!(k1.norm() > 0.3 && k2.norm() > 0.3);
            let r1 = ket_to_density(&(&k1 / c(k1.norm(), 0.0)));
            let r2 = ket_to_density(&(&k2 / c(k2.norm(), 0.0)));
            let rho = QuantumState::new(spec, hermitize(&(r1 * c(w, 0.0) + r2 * c(1.0 - w, 0.0)))).unwrap();
            let rec = wigner_matrix_forward(&rho, &square_grid(2.5, 9)).unwrap();
            let r = reconstruct_density(&rec, spec, &ReconstructionOptions::default()).unwrap();
            prop_assert!(overlap_fidelity(r.rho_hat.rho(), rho.rho()) > 0.99);
        }
    }
}
