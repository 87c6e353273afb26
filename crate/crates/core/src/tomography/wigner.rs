use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::protocol::BasisSetting;
use crate::error::{Error, Result};
use crate::hilbert::{displacement_elements, ComplexOperator, QuantumState};
use crate::pool::par_map;

/// How a [`WignerRecord`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactForward,
    FitFromSignal,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::ExactForward => "exact-forward",
            Provenance::FitFromSignal => "fit-from-signal",
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-forward" => Ok(Self::ExactForward),
            "fit-from-signal" => Ok(Self::FitFromSignal),
            other => Err(Error::Parse(format!("unknown provenance {other:?}"))),
        }
    }
}

/// Probabilities of the two outcomes of one qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingPopulations {
    pub setting: BasisSetting,
    pub plus: f64,
    pub minus: f64,
}

/// A grid point whose measurement-chain estimate failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub message: String,
}

/// Wigner-matrix elements `W_ee`, `W_gg`, `Re W_eg`, `Im W_eg` on a β grid.
///
/// The elements are unnormalized: each carries the weight `Tr ρ_kk'` of
/// its qubit block, so `W_ee + W_gg` integrates to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerRecord {
    pub beta: Vec<Complex64>,
    pub w_ee: Vec<f64>,
    pub w_gg: Vec<f64>,
    pub re_w_eg: Vec<f64>,
    pub im_w_eg: Vec<f64>,
    /// Points excluded from reconstruction.
    pub masked: Vec<bool>,
    pub provenance: Provenance,
    pub populations: Vec<SettingPopulations>,
    pub failures: Vec<PointFailure>,
}

pub const CSV_HEADER: &str = "re_beta,im_beta,w_ee,w_gg,re_w_eg,im_w_eg,masked,provenance";

impl WignerRecord {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Checks column lengths, grid finiteness and uniqueness, and the
    /// `|W_kk| ≤ 2/π` bound for exact records.
    pub fn validate(&self) -> Result<()> {
        let n = self.beta.len();
        let cols = [&self.w_ee, &self.w_gg, &self.re_w_eg, &self.im_w_eg];
        if cols.iter().any(|c| c.len() != n) || self.masked.len() != n {
            return Err(Error::GridMismatch("column lengths differ from the grid".into()));
        }
        check_grid(&self.beta)?;
        if self.provenance == Provenance::ExactForward {
            let bound = FRAC_2_PI + 1e-9;
            for (i, (&a, &b)) in self.w_ee.iter().zip(&self.w_gg).enumerate() {
                if a.abs() > bound || b.abs() > bound {
                    return Err(Error::InvalidState(format!(
                        "diagonal Wigner value out of range at grid index {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{},{}\n",
                self.beta[i].re,
                self.beta[i].im,
                self.w_ee[i],
                self.w_gg[i],
                self.re_w_eg[i],
                self.im_w_eg[i],
                u8::from(self.masked[i]),
                self.provenance.name()
            ));
        }
        out
    }

    /// Parses the CSV written by [`Self::to_csv`]. Populations and failure
    /// notes live in the run manifest and come back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header {CSV_HEADER:?}, found {other:?}"
                )))
            }
        }
        let mut rec = Self::empty(Provenance::ExactForward);
        let mut provenance = None;
        for (row, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 8 {
                return Err(Error::Parse(format!("row {row}: expected 8 fields, got {}", f.len())));
            }
            let num = |i: usize| {
                f[i].parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {row}, column {i}: {e}")))
            };
            rec.beta.push(Complex64::new(num(0)?, num(1)?));
            rec.w_ee.push(num(2)?);
            rec.w_gg.push(num(3)?);
            rec.re_w_eg.push(num(4)?);
            rec.im_w_eg.push(num(5)?);
            rec.masked.push(match f[6] {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("row {row}: masked flag {other:?}"))),
            });
            let p: Provenance = f[7].parse()?;
            if provenance.is_some_and(|q| q != p) {
                return Err(Error::Parse(format!("row {row}: mixed provenance")));
            }
            provenance = Some(p);
        }
        rec.provenance = provenance.unwrap_or(Provenance::ExactForward);
        rec.validate()?;
        Ok(rec)
    }

    pub(crate) fn empty(provenance: Provenance) -> Self {
        Self {
            beta: Vec::new(),
            w_ee: Vec::new(),
            w_gg: Vec::new(),
            re_w_eg: Vec::new(),
            im_w_eg: Vec::new(),
            masked: Vec::new(),
            provenance,
            populations: Vec::new(),
            failures: Vec::new(),
        }
    }
}

/// Square grid of `points × points` values of β covering
/// `[−half_width, half_width]²`, row-major in `Im β`.
pub fn square_grid(half_width: f64, points: usize) -> Vec<Complex64> {
    let axis: Vec<f64> = if points <= 1 {
        vec![0.0]
    } else {
        (0..points)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64)
            .collect()
    };
    axis.iter()
        .flat_map(|&im| axis.iter().map(move |&re| Complex64::new(re, im)))
        .collect()
}

/// `25 × 25` points over `[−3, 3]²`.
pub fn default_grid() -> Vec<Complex64> {
    square_grid(3.0, 25)
}

pub(crate) fn check_grid(beta: &[Complex64]) -> Result<()> {
    if beta.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
        return Err(Error::GridMismatch("grid contains non-finite points".into()));
    }
    let mut keys: Vec<(u64, u64)> = beta.iter().map(|b| (b.re.to_bits(), b.im.to_bits())).collect();
    keys.sort_unstable();
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::GridMismatch("grid contains duplicate points".into()));
    }
    Ok(())
}

/// Parity kernel `D(2β) Π` restricted to the lowest `n` Fock states.
///
/// With its exact matrix elements `(2/π) Tr[σ K(β)]` equals the full
/// alternating sum `(2/π) Σ_n (−1)ⁿ ⟨n|D(−β) σ D(β)|n⟩` for any `σ`
/// supported on those states, so no displaced-state truncation enters.
pub fn parity_kernel(n: usize, beta: Complex64) -> ComplexOperator {
    let mut k = displacement_elements(n, n, beta * 2.0);
    for col in (1..n).step_by(2) {
        k.column_mut(col).neg_mut();
    }
    k
}

/// `(2/π) Tr[σ K]` for a resonator block `σ`.
pub(crate) fn kernel_value(sigma: &ComplexOperator, kernel: &ComplexOperator) -> Complex64 {
    // Tr[σ K] = Σ_{mn} σ_{mn} K_{nm}
    let n = sigma.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n {
        for l in 0..n {
            acc += sigma[(m, l)] * kernel[(l, m)];
        }
    }
    acc * FRAC_2_PI
}

/// Wigner value of a single resonator block on a grid.
pub fn block_wigner(sigma: &ComplexOperator, beta: &[Complex64]) -> Vec<Complex64> {
    let n = sigma.nrows();
    par_map(beta.to_vec(), |b| kernel_value(sigma, &parity_kernel(n, b)))
}

/// Exact Wigner matrix of `state` on `beta`.
pub fn wigner_matrix_forward(state: &QuantumState, beta: &[Complex64]) -> Result<WignerRecord> {
    check_grid(beta)?;
    let g = state.qubit_block(0, 0)?;
    let e = state.qubit_block(1, 1)?;
    let eg = state.qubit_block(1, 0)?;
    let n = state.spec().n_fock();
    let values = par_map(beta.to_vec(), |b| {
        let k = parity_kernel(n, b);
        (kernel_value(&e, &k).re, kernel_value(&g, &k).re, kernel_value(&eg, &k))
    });
    let mut rec = WignerRecord::empty(Provenance::ExactForward);
    rec.beta = beta.to_vec();
    for (wee, wgg, weg) in values {
        rec.w_ee.push(wee);
        rec.w_gg.push(wgg);
        rec.re_w_eg.push(weg.re);
        rec.im_w_eg.push(weg.im);
        rec.masked.push(false);
    }
    let populations = |s: BasisSetting| {
        let (plus, minus) = s.populations(state);
        SettingPopulations { setting: s, plus, minus }
    };
    rec.populations = BasisSetting::ALL.iter().map(|&s| populations(s)).collect();
    Ok(rec)
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
    fn vacuum_and_single_photon_at_origin() {
        let spec = HilbertSpec::qubit(6).unwrap();
        let vac = QuantumState::basis(spec, 0, 0).unwrap();
        let w = wigner_matrix_forward(&vac, &[c(0.0, 0.0), c(0.4, -0.2)]).unwrap();
        assert!((w.w_gg[0] - FRAC_2_PI).abs() < 1e-12);
        assert!(w.w_ee.iter().chain(&w.re_w_eg).chain(&w.im_w_eg).all(|v| v.abs() < 1e-15));
        let one = QuantumState::basis(spec, 0, 1).unwrap();
        let w = wigner_matrix_forward(&one, &[c(0.0, 0.0)]).unwrap();
        assert!((w.w_gg[0] + FRAC_2_PI).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_gaussian() {
        let n = 30;
        let spec = HilbertSpec::qubit(n).unwrap();
        let a0 = c(1.3, 0.0);
        let psi = product_ket(&qubit_ket(2, &[c(1.0, 0.0), c(0.0, 0.0)]), &coherent_ket(n, a0));
        let s = QuantumState::pure(spec, &psi).unwrap();
        let grid = square_grid(1.0, 5);
        let w = wigner_matrix_forward(&s, &grid).unwrap();
        for (b, v) in grid.iter().zip(&w.w_gg) {
            let want = FRAC_2_PI * (-2.0 * (b - a0).norm_sqr()).exp();
            assert!((v - want).abs() < 1e-6, "beta {b}: {v} vs {want}");
        }
    }

    #[test]
    fn exact_kernel_matches_padded_fock_sum() {
        // Independent route: displace in a much larger space and sum (−1)ⁿ Pₙ.
        let n = 8;
        let big = 90;
        let mut sigma = ComplexOperator::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                sigma[(i, j)] = c(0.1 / (1 + i + j) as f64, 0.03 * (i as f64 - j as f64));
            }
        }
        let sigma = hermitize(&sigma);
        let mut padded = ComplexOperator::zeros(big, big);
        padded.view_mut((0, 0), (n, n)).copy_from(&sigma);
        for b in [c(0.0, 0.0), c(1.1, -0.7), c(-2.5, 2.0)] {
            let d = displacement(big, -b).unwrap();
            let disp = &d * &padded * d.adjoint();
            let sum: f64 = (0..60).map(|m| if m % 2 == 0 { disp[(m, m)].re } else { -disp[(m, m)].re }).sum();
            let direct = FRAC_2_PI * sum;
            let k = kernel_value(&sigma, &parity_kernel(n, b));
            assert!((k.re - direct).abs() < 1e-9, "beta {b}: {} vs {direct}", k.re);
            assert!(k.im.abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_integral() {
        // Gaussian tails of a |α| ≤ 1.5 state beyond |β| = 4 are below e^{−12}.
        let n = 20;
        let spec = HilbertSpec::qubit(n).unwrap();
        let psi = product_ket(
            &qubit_ket(2, &[c(0.6, 0.0), c(0.0, 0.8)]),
            &coherent_ket(n, c(1.0, 0.5)),
        );
        let s = QuantumState::pure(spec, &psi).unwrap();
        let grid = square_grid(4.0, 41);
        let w = wigner_matrix_forward(&s, &grid).unwrap();
        let h = 8.0 / 40.0;
        let total: f64 = w.w_ee.iter().zip(&w.w_gg).map(|(a, b)| (a + b) * h * h).sum();
        assert!((total - 1.0).abs() < 0.02, "integral {total}");
    }

    #[test]
    fn csv_round_trip() {
        let spec = HilbertSpec::qubit(4).unwrap();
        let s = QuantumState::basis(spec, 1, 1).unwrap();
        let mut rec = wigner_matrix_forward(&s, &square_grid(1.0, 3)).unwrap();
        rec.masked[4] = true;
        let back = WignerRecord::from_csv(&rec.to_csv()).unwrap();
        assert_eq!(back.beta, rec.beta);
        assert_eq!(back.masked, rec.masked);
        for (a, b) in back.w_ee.iter().zip(&rec.w_ee) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(WignerRecord::from_csv("re_beta,im_beta\n").is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(check_grid(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(check_grid(&[c(f64::NAN, 0.0)]).is_err());
        assert_eq!(default_grid().len(), 625);
    }

    fn random_state(seed: &[f64], n: usize) -> QuantumState {
        let spec = HilbertSpec::qubit(n).unwrap();
        let d = spec.dim();
        let m = ComplexOperator::from_fn(d, d, |i, j| c(seed[(i * d + j) % seed.len()], seed[(i + 3 * j + 1) % seed.len()]));
        let rho = &m * m.adjoint();
        let tr = trace(&rho).re;
        QuantumState::new(spec, hermitize(&(rho / c(tr, 0.0)))).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn forward_map_is_linear(
            s1 in proptest::collection::vec(-1.0f64..1.0, 17),
            s2 in proptest::collection::vec(-1.0f64..1.0, 19),
            a in 0.0f64..1.0,
        ) {
            let r1 = random_state(&s1, 4);
            let r2 = random_state(&s2, 4);
            let mix = QuantumState::new(*r1.spec(), r1.rho() * c(a, 0.0) + r2.rho() * c(1.0 - a, 0.0)).unwrap();
            let grid = square_grid(1.5, 4);
            let (w1, w2, wm) = (
                wigner_matrix_forward(&r1, &grid).unwrap(),
                wigner_matrix_forward(&r2, &grid).unwrap(),
                wigner_matrix_forward(&mix, &grid).unwrap(),
            );
            for i in 0..grid.len() {
                for (x, y, z) in [
                    (w1.w_ee[i], w2.w_ee[i], wm.w_ee[i]),
                    (w1.w_gg[i], w2.w_gg[i], wm.w_gg[i]),
                    (w1.re_w_eg[i], w2.re_w_eg[i], wm.re_w_eg[i]),
                    (w1.im_w_eg[i], w2.im_w_eg[i], wm.im_w_eg[i]),
                ] {
                    prop_assert!((a * x + (1.0 - a) * y - z).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn origin_value_is_block_parity(s in proptest::collection::vec(-1.0f64..1.0, 23)) {
            let st = random_state(&s, 5);
            let w = wigner_matrix_forward(&st, &[c(0.0, 0.0)]).unwrap();
            let par = photon_parity(5);
            for (k, v) in [(1, w.w_ee[0]), (0, w.w_gg[0])] {
                let block = st.qubit_block(k, k).unwrap();
                let want = FRAC_2_PI * trace(&(&block * &par)).re;
                prop_assert!((v - want).abs() < 1e-10);
            }
        }
    }
}
