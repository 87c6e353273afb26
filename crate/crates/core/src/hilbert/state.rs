use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ops::{frobenius, hermitize, ket_to_density, trace};
use super::{ComplexOperator, HilbertSpec, Ket};
use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Density matrix on the joint qubit ⊗ Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: ComplexOperator,
    spec: HilbertSpec,
}

impl QuantumState {
    /// Validates Hermiticity, unit trace and positivity within tolerance.
    pub fn new(spec: HilbertSpec, rho: ComplexOperator) -> Result<Self> {
        if rho.nrows() != spec.dim() || rho.ncols() != spec.dim() {
            return Err(Error::InvalidState(format!(
                "density matrix is {}x{}, Hilbert space has dimension {}",
                rho.nrows(),
                rho.ncols(),
                spec.dim()
            )));
        }
        let herm = frobenius(&(&rho - rho.adjoint())) / frobenius(&rho).max(f64::MIN_POSITIVE);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (rel. error {herm:.3e})")));
        }
        let tr = trace(&rho);
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = min_eigenvalue(&rho);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { rho, spec })
    }

    /// Wraps a matrix produced by a trace-preserving numerical procedure,
    /// symmetrizing and renormalizing it but skipping the positivity check.
    pub(crate) fn from_numerical(spec: HilbertSpec, rho: &ComplexOperator) -> Self {
        let mut rho = hermitize(rho);
        let tr = trace(&rho).re;
        if tr.abs() > 0.0 {
            rho /= Complex64::new(tr, 0.0);
        }
        Self { rho, spec }
    }

    pub fn pure(spec: HilbertSpec, psi: &Ket) -> Result<Self> {
        let norm = psi.norm();
        if psi.len() != spec.dim() || norm == 0.0 {
            return Err(Error::InvalidState(format!(
                "ket has length {} and norm {norm}, expected dimension {}",
                psi.len(),
                spec.dim()
            )));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Self::new(spec, hermitize(&ket_to_density(&psi)))
    }

    /// `|level⟩⟨level| ⊗ |n⟩⟨n|`.
    pub fn basis(spec: HilbertSpec, level: usize, n: usize) -> Result<Self> {
        spec.check_level(level)?;
        let mut rho = DMatrix::zeros(spec.dim(), spec.dim());
        let i = spec.index(level, n);
        rho[(i, i)] = Complex64::new(1.0, 0.0);
        Self::new(spec, rho)
    }

    pub fn maximally_mixed(spec: HilbertSpec) -> Self {
        let d = spec.dim();
        let rho = DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0);
        Self { rho, spec }
    }

    pub fn rho(&self) -> &ComplexOperator {
        &self.rho
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn into_rho(self) -> ComplexOperator {
        self.rho
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.rho)
    }

    /// `ρ_{k,k'} = ⟨k|ρ|k'⟩`, an `n_fock × n_fock` resonator block.
    pub fn qubit_block(&self, k: usize, kp: usize) -> Result<ComplexOperator> {
        self.spec.check_level(k)?;
        self.spec.check_level(kp)?;
        let n = self.spec.n_fock();
        Ok(self.rho.view((k * n, kp * n), (n, n)).into_owned())
    }

    /// Reduced resonator state `Tr_Q ρ`.
    pub fn partial_trace_qubit(&self) -> ComplexOperator {
        let n = self.spec.n_fock();
        let mut out = DMatrix::zeros(n, n);
        for k in 0..self.spec.n_qubit_levels() {
            out += self.rho.view((k * n, k * n), (n, n));
        }
        out
    }

    /// Reduced qubit state `Tr_R ρ`.
    pub fn partial_trace_resonator(&self) -> ComplexOperator {
        let n = self.spec.n_fock();
        let l = self.spec.n_qubit_levels();
        DMatrix::from_fn(l, l, |k, kp| {
            (0..n).map(|m| self.rho[(k * n + m, kp * n + m)]).sum()
        })
    }

    /// `ρ^{Γ_Q} = Σ ρ_{k',k} ⊗ |k⟩⟨k'|` (transpose on the qubit factor).
    pub fn partial_transpose_qubit(&self) -> Result<ComplexOperator> {
        if self.spec.n_qubit_levels() != 2 {
            return Err(Error::Unsupported(
                "partial transpose is defined for a two-level qubit".into(),
            ));
        }
        Ok(partial_transpose_qubit_matrix(&self.rho, self.spec.n_fock()))
    }
}

/// Reassembles `Σ_{k,k'} |k⟩⟨k'| ⊗ ρ_{k,k'}` from blocks indexed `[k][k']`.
pub fn assemble_blocks(blocks: &[Vec<ComplexOperator>]) -> ComplexOperator {
    let l = blocks.len();
    let n = blocks[0][0].nrows();
    let mut rho = DMatrix::zeros(l * n, l * n);
    for (k, row) in blocks.iter().enumerate() {
        for (kp, b) in row.iter().enumerate() {
            rho.view_mut((k * n, kp * n), (n, n)).copy_from(b);
        }
    }
    rho
}

pub fn partial_transpose_qubit_matrix(rho: &ComplexOperator, n: usize) -> ComplexOperator {
    let l = rho.nrows() / n;
    let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
    for k in 0..l {
        for kp in 0..l {
            out.view_mut((k * n, kp * n), (n, n))
                .copy_from(&rho.view((kp * n, k * n), (n, n)));
        }
    }
    out
}

pub fn hermitian_eigenvalues(m: &ComplexOperator) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &ComplexOperator) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ops::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell(spec: HilbertSpec) -> QuantumState {
        // (|e,0⟩ + |g,1⟩)/√2
        let mut psi = nalgebra::DVector::zeros(spec.dim());
        psi[spec.index(1, 0)] = c(1.0, 0.0);
        psi[spec.index(0, 1)] = c(1.0, 0.0);
        QuantumState::pure(spec, &psi).unwrap()
    }

    #[test]
    fn product_state_blocks() {
        let spec = HilbertSpec::qubit(4).unwrap();
        let s = QuantumState::basis(spec, 1, 0).unwrap();
        let ee = s.qubit_block(1, 1).unwrap();
        assert_eq!(ee[(0, 0)], c(1.0, 0.0));
        assert!(frobenius(&s.qubit_block(0, 0).unwrap()) == 0.0);
        assert!(matches!(s.qubit_block(2, 0), Err(Error::Index { .. })));
    }

    #[test]
    fn blocks_reassemble() {
        let spec = HilbertSpec::qubit(5).unwrap();
        let s = bell(spec);
        let blocks: Vec<Vec<_>> = (0..2)
            .map(|k| (0..2).map(|kp| s.qubit_block(k, kp).unwrap()).collect())
            .collect();
        assert!(frobenius(&(assemble_blocks(&blocks) - s.rho())) < 1e-12);
    }

    #[test]
    fn bell_partial_transpose_eigenvalue() {
        let spec = HilbertSpec::qubit(4).unwrap();
        let pt = bell(spec).partial_transpose_qubit().unwrap();
        let ev = hermitian_eigenvalues(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert!((trace(&pt).re - 1.0).abs() < 1e-12);
        assert!(hermiticity_error(&pt) < 1e-14);
    }

    #[test]
    fn partial_transpose_rejects_three_levels() {
        let spec = HilbertSpec::new(3, 3).unwrap();
        let s = QuantumState::basis(spec, 0, 0).unwrap();
        assert!(matches!(s.partial_transpose_qubit(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let spec = HilbertSpec::qubit(2).unwrap();
        let mut m = DMatrix::identity(4, 4) * c(0.5, 0.0);
        assert!(QuantumState::new(spec, m.clone()).is_err()); // trace 2
        m = DMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(QuantumState::new(spec, m).is_err()); // not positive
    }

    fn random_ket(seed: &[f64], dim: usize) -> Ket {
        nalgebra::DVector::from_fn(dim, |i, _| c(seed[2 * i], seed[2 * i + 1]))
    }

    proptest! {
        #[test]
        fn partial_traces_recover_product_factors(
            q in proptest::collection::vec(-1.0f64..1.0, 4),
            r in proptest::collection::vec(-1.0f64..1.0, 12),
        ) {
            let spec = HilbertSpec::qubit(6).unwrap();
            let qk = random_ket(&q, 2);
            let rk = random_ket(&r, 6);
            prop_assume!(qk.norm() > 0.1 && rk.norm() > 0.1);
            let qk = &qk / c(qk.norm(), 0.0);
            let rk = &rk / c(rk.norm(), 0.0);
            let s = QuantumState::pure(spec, &product_ket(&qk, &rk)).unwrap();
            let rq = s.partial_trace_resonator();
            let rr = s.partial_trace_qubit();
            prop_assert!(frobenius(&(rq - ket_to_density(&qk))) < 1e-12);
            prop_assert!(frobenius(&(rr.clone() - ket_to_density(&rk))) < 1e-12);
            prop_assert!((trace(&rr).re - 1.0).abs() < 1e-12);
            let pt = s.partial_transpose_qubit().unwrap();
            prop_assert!(min_eigenvalue(&pt) > -1e-12);
            let back = partial_transpose_qubit_matrix(&pt, 6);
            prop_assert!(frobenius(&(back - s.rho())) == 0.0);
        }
    }
}
