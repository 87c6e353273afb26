//! Minimal CSR matrices for the master-equation right-hand side.

use num_complex::Complex64;

use super::ComplexOperator;

#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

/// Positions of one operator's nonzeros inside a shared sparsity pattern.
pub type SlotMap = Vec<(usize, Complex64)>;

impl SparseOperator {
    pub fn from_dense(m: &ComplexOperator) -> Self {
        Self::union(&[m]).0
    }

    /// Builds the union sparsity pattern of `ops` (values summed) and, for
    /// each operator, the slots its entries occupy. Overwriting the values
    /// via [`Self::set_linear_combination`] then evaluates `Σ cᵢ opsᵢ`
    /// without re-allocating.
    pub fn union(ops: &[&ComplexOperator]) -> (Self, Vec<SlotMap>) {
        let dim = ops[0].nrows();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut maps: Vec<SlotMap> = vec![Vec::new(); ops.len()];
        row_start.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let mut slot = None;
                for (k, op) in ops.iter().enumerate() {
                    let v = op[(i, j)];
                    if v.re != 0.0 || v.im != 0.0 {
                        let s = *slot.get_or_insert_with(|| {
                            cols.push(j);
                            vals.push(Complex64::new(0.0, 0.0));
                            cols.len() - 1
                        });
                        vals[s] += v;
                        maps[k].push((s, v));
                    }
                }
            }
            row_start.push(cols.len());
        }
        (
            Self {
                dim,
                row_start,
                cols,
                vals,
            },
            maps,
        )
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Overwrites the stored values with `Σ coeffs[k] · maps[k]`.
    pub fn set_linear_combination(&mut self, maps: &[SlotMap], coeffs: &[Complex64]) {
        self.vals.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (map, &c) in maps.iter().zip(coeffs) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for &(s, v) in map {
                self.vals[s] += c * v;
            }
        }
    }

    /// `out = self · x` for a dense square `x`.
    pub fn mul_into(&self, x: &ComplexOperator, out: &mut ComplexOperator) {
        out.fill(Complex64::new(0.0, 0.0));
        self.mul_add(Complex64::new(1.0, 0.0), x, out);
    }

    /// `out += coeff * (self · x)` for a dense column-major `x`.
    pub fn mul_add(&self, coeff: Complex64, x: &ComplexOperator, out: &mut ComplexOperator) {
        let n = self.dim;
        let ncols = x.ncols();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for i in 0..n {
            for idx in self.row_start[i]..self.row_start[i + 1] {
                let a = coeff * self.vals[idx];
                let j = self.cols[idx];
                for c in 0..ncols {
                    os[c * n + i] += a * xs[c * n + j];
                }
            }
        }
    }

    /// `out += coeff * (self · x†)`.
    pub fn mul_adjoint_add(&self, coeff: Complex64, x: &ComplexOperator, out: &mut ComplexOperator) {
        let n = self.dim;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for i in 0..n {
            for idx in self.row_start[i]..self.row_start[i + 1] {
                let a = coeff * self.vals[idx];
                let j = self.cols[idx];
                // (x†)[j, c] = conj(x[c, j]) = conj(xs[j * n + c])
                for c in 0..n {
                    os[c * n + i] += a * xs[j * n + c].conj();
                }
            }
        }
    }
}
