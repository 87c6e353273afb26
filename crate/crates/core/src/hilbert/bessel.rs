//! Bessel functions of the first kind, integer order.
//!
//! Miller's backward recurrence normalized by `J_0 + 2 Σ J_2k = 1`. The
//! recurrence is started well above `max(|m|, |x|)` so every order up to the
//! start index comes out with near machine precision for |x| ≤ 20.

/// `J_m(x)` for integer `m` (negative orders via `J_{-m} = (-1)^m J_m`).
pub fn bessel_j(m: i32, x: f64) -> f64 {
    let order = m.unsigned_abs() as usize;
    let value = bessel_j_orders(order, x)[order];
    if m < 0 && order % 2 == 1 {
        -value
    } else {
        value
    }
}

/// `[J_0(x), J_1(x), ..., J_max(x)]`.
pub fn bessel_j_orders(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = (max_order as f64).max(ax);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    start += start % 2;

    // Unnormalized backward recurrence: J_{k-1} = (2k/x) J_k - J_{k+1}.
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = (2.0 * k as f64 / ax) * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm: f64 = vals[0] + 2.0 * vals.iter().step_by(2).skip(1).sum::<f64>();
    for (k, slot) in out.iter_mut().enumerate() {
        let v = vals[k] / norm;
        *slot = if x < 0.0 && k % 2 == 1 { -v } else { v };
    }
    out
}
