use crate::error::Result;
use crate::hilbert::{hermitian_eigenvalues, hermitize, ComplexOperator, QuantumState};

/// Absolute sum of the negative eigenvalues of the qubit partial transpose.
pub fn negativity(state: &QuantumState) -> Result<f64> {
    let pt = state.partial_transpose_qubit()?;
    Ok(hermitian_eigenvalues(&pt)
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum())
}

/// `Tr ρ²`.
pub fn purity(state: &QuantumState) -> f64 {
    let r = state.rho();
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
    r.iter().map(|z| z.norm_sqr()).sum()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` of two density matrices.
pub fn fidelity(rho: &ComplexOperator, sigma: &ComplexOperator) -> f64 {
    let root = psd_sqrt(rho);
    let inner = hermitize(&(&root * sigma * &root));
    let s: f64 = hermitian_eigenvalues(&inner)
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    (s * s).min(1.0)
}

fn psd_sqrt(m: &ComplexOperator) -> ComplexOperator {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let v = &eig.eigenvectors;
    let scaled = ComplexOperator::from_fn(v.nrows(), v.ncols(), |i, j| {
        v[(i, j)] * eig.eigenvalues[j].max(0.0).sqrt()
    });
    scaled * v.adjoint()
}
