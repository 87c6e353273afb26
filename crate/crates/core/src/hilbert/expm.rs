//! Matrix exponential via scaling-and-squaring with a Padé(13) approximant.
//!
//! Higham (2005), "The Scaling and Squaring Method for the Matrix Exponential
//! Revisited". Lower-degree approximants are used when the 1-norm allows it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::ComplexOperator;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17_297_280.0,
            8_648_640.0,
            1_995_840.0,
            277_200.0,
            25_200.0,
            1_512.0,
            56.0,
            1.0,
        ],
        9 => &[
            17_643_225_600.0,
            8_821_612_800.0,
            2_075_673_600.0,
            302_702_400.0,
            30_270_240.0,
            2_162_160.0,
            110_880.0,
            3_960.0,
            90.0,
            1.0,
        ],
        _ => &B13,
    }
}

pub(crate) fn one_norm(a: &ComplexOperator) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scale(m: &ComplexOperator, s: f64) -> ComplexOperator {
    m * Complex64::new(s, 0.0)
}

/// `exp(A)` for a square complex matrix.
pub fn matrix_exp(a: &ComplexOperator) -> Result<ComplexOperator> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidParameter(format!(
            "matrix_exp needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Convergence("non-finite input entries".into()));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    let ident = DMatrix::<Complex64>::identity(n, n);

    for &(m, theta) in &THETA {
        if norm <= theta {
            return pade_low(a, m, &ident);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = scale(a, 0.5_f64.powi(s));
    let mut r = pade13(&scaled, &ident)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Convergence(format!(
            "non-finite result after {s} squarings"
        )));
    }
    Ok(r)
}

fn pade_low(a: &ComplexOperator, m: usize, ident: &ComplexOperator) -> Result<ComplexOperator> {
    let b = pade_coefficients(m);
    let a2 = a * a;
    let mut u = scale(ident, b[1]);
    let mut v = scale(ident, b[0]);
    let mut power = ident.clone();
    for k in 1..=m / 2 {
        power = &power * &a2;
        u += scale(&power, b[2 * k + 1]);
        v += scale(&power, b[2 * k]);
    }
    let u = a * u;
    solve_pade(&u, &v)
}

fn pade13(a: &ComplexOperator, ident: &ComplexOperator) -> Result<ComplexOperator> {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    let u = a
        * (&a6 * inner_u
            + scale(&a6, b[7])
            + scale(&a4, b[5])
            + scale(&a2, b[3])
            + scale(ident, b[1]));
    let inner_v = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    let v = &a6 * inner_v
        + scale(&a6, b[6])
        + scale(&a4, b[4])
        + scale(&a2, b[2])
        + scale(ident, b[0]);
    solve_pade(&u, &v)
}

/// Solves `(V - U) X = (V + U)`.
fn solve_pade(u: &ComplexOperator, v: &ComplexOperator) -> Result<ComplexOperator> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Convergence("singular Pade denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ops::{dagger, frobenius};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<Complex64>::zeros(5, 5);
        let e = matrix_exp(&z).unwrap();
        assert!(frobenius(&(e - DMatrix::identity(5, 5))) < 1e-15);
    }

    #[test]
    fn pauli_x_quarter_turn() {
        // exp(i pi sigma_x / 2) = i sigma_x
        let h = c(0.0, std::f64::consts::FRAC_PI_2);
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), h, h, c(0.0, 0.0)]);
        let e = matrix_exp(&a).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(frobenius(&(e - want)) < 1e-10);
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(0.3, 0.0), c(-2.0, 1.0), c(5.5, -0.25), c(-9.0, 3.0)];
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
        let e = matrix_exp(&a).unwrap();
        for (i, z) in d.iter().enumerate() {
            assert!((e[(i, i)] - z.exp()).norm() < 1e-10 * z.exp().norm().max(1.0));
        }
    }

    #[test]
    fn inverse_round_trip_large_norm() {
        // Deterministic pseudo-random matrix with 1-norm around 10.
        let n = 12;
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = DMatrix::from_fn(n, n, |_, _| c(next(), next()));
        let norm = one_norm(&a);
        a *= c(10.0 / norm, 0.0);
        let e = matrix_exp(&a).unwrap();
        let einv = matrix_exp(&(-a.clone())).unwrap();
        let err = frobenius(&(&e * &einv - DMatrix::identity(n, n)));
        assert!(err < 1e-8, "err {err}");
    }

    #[test]
    fn anti_hermitian_gives_unitary() {
        let n = 8;
        let h = DMatrix::from_fn(n, n, |i, j| c((i + j) as f64 * 0.3, (i as f64 - j as f64) * 0.2));
        let herm = (&h + dagger(&h)) * c(0.5, 0.0);
        let u = matrix_exp(&(herm * c(0.0, 1.0))).unwrap();
        let err = frobenius(&(dagger(&u) * &u - DMatrix::identity(n, n)));
        assert!(err < 1e-10);
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = DMatrix::<Complex64>::zeros(2, 2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(matrix_exp(&a), Err(Error::Convergence(_))));
    }
}
