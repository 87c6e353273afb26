use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::ComplexOperator;

pub(crate) fn block_trace(block: &ComplexOperator) -> Result<f64> {
    let tr: f64 = block.diagonal().iter().map(|z| z.re).sum();
    if tr <= 1e-12 {
        return Err(Error::EmptyBlock { trace: tr });
    }
    Ok(tr)
}

/// Coherence between the empty and filled field, `Σ_{n≥1} |⟨0|ρ|n⟩| / Tr ρ`.
pub fn np_sp_coherence(block: &ComplexOperator) -> Result<f64> {
    let tr = block_trace(block)?;
    let s: f64 = (1..block.ncols()).map(|n| block[(0, n)].norm()).sum();
    Ok(s / tr)
}

/// The same coherence for the coherent state `|α⟩`, summed in closed form:
/// `e^{−|α|²} Σ_{n≥1} |α|ⁿ / √n!`.
pub fn coherent_reference_coherence(alpha_abs: f64) -> f64 {
    if alpha_abs == 0.0 {
        return 0.0;
    }
    let x = alpha_abs * alpha_abs;
    let ln_a = alpha_abs.ln();
    let mut ln_fact = 0.0;
    let mut sum = 0.0;
    let mut n = 1usize;
    loop {
        ln_fact += (n as f64).ln();
        let term = (n as f64 * ln_a - 0.5 * ln_fact - x).exp();
        sum += term;
        // Past the peak near n ≈ 2|α|² the terms fall faster than geometrically.
        if n as f64 > 2.0 * x + 10.0 && term < 1e-17 * sum {
            break;
        }
        n += 1;
    }
    sum
}

/// Field coherence `Tr(ρ a) / Tr ρ`.
pub fn order_parameter(block: &ComplexOperator) -> Result<Complex64> {
    let tr = block_trace(block)?;
    // Tr(ρ a) = Σ √(n+1) ρ_{n+1,n}
    let s: Complex64 = (0..block.nrows().saturating_sub(1))
        .map(|n| block[(n + 1, n)] * ((n + 1) as f64).sqrt())
        .sum();
    Ok(s / tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_and_empty() {
        let v = ket_to_density(&fock_ket(5, 0));
        assert_eq!(np_sp_coherence(&v).unwrap(), 0.0);
        assert_eq!(order_parameter(&v).unwrap(), c(0.0, 0.0));
        let z = ComplexOperator::zeros(5, 5);
        assert!(matches!(np_sp_coherence(&z), Err(Error::EmptyBlock { .. })));
        assert!(matches!(order_parameter(&z), Err(Error::EmptyBlock { .. })));
    }

    #[test]
    fn reference_coherence_matches_fock_sum() {
        let closed = coherent_reference_coherence(2.62);
        assert!((closed - 0.1147).abs() < 0.0005, "closed form {closed}");
        // Independent route: build |α⟩⟨α| in a large space and read off row 0.
        let rho = ket_to_density(&coherent_ket(80, c(0.0, 2.62)));
        let direct = np_sp_coherence(&rho).unwrap();
        assert!((direct - closed).abs() < 1e-10, "{direct} vs {closed}");
    }

    #[test]
    fn single_off_diagonal_superposition() {
        let mut psi = fock_ket(6, 0) + fock_ket(6, 4);
        psi /= c(2f64.sqrt(), 0.0);
        assert!((np_sp_coherence(&ket_to_density(&psi)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coherent_order_parameter() {
        let a0 = c(1.1, -0.6);
        let rho = ket_to_density(&coherent_ket(40, a0));
        assert!((order_parameter(&rho).unwrap() - a0).norm() < 1e-8);
    }

    proptest! {
        #[test]
        fn cauchy_schwarz_bound(v in proptest::collection::vec(-1.0f64..1.0, 36), scale in 0.1f64..3.0) {
            let m = ComplexOperator::from_fn(6, 6, |i, j| c(v[i * 6 + j], v[(j * 6 + i + 3) % 36]));
            let rho = &m * m.adjoint() * c(scale, 0.0);
            prop_assume!(trace(&rho).re > 1e-6);
            let tr = trace(&rho).re;
            let bound: f64 = (1..6).map(|n| (rho[(0, 0)].re * rho[(n, n)].re).sqrt()).sum::<f64>() / tr;
            prop_assert!(np_sp_coherence(&rho).unwrap() <= bound + 1e-12);
        }
    }
}
