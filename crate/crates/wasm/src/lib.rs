//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a flat `Float64Array`; the layout is
//! documented per function. The `*_values` functions hold the logic and are
//! callable (and tested) natively; the exported wrappers only translate
//! errors into JavaScript exceptions.

use num_complex::Complex64;
use rabi_spt::hilbert::{poisson_tail, to_mhz, HilbertSpec};
use rabi_spt::model::{DeviceParams, HamiltonianLevel};
use rabi_spt::presets::{preset_state, Preset, PresetParams};
use rabi_spt::quench::{run_quench, LindbladSpec, QuenchOptions, QuenchSchedule};
use rabi_spt::tomography::{simulate_rabi_signal, square_grid, wigner_matrix_forward, SignalNoise};
use rabi_spt::Result;
use wasm_bindgen::prelude::*;

/// Largest Fock space the demo accepts; keeps each call interactive.
pub const MAX_DEMO_FOCK: usize = 40;
const MAX_QUENCH_FOCK: usize = 16;

fn check_fock(n: usize, max: usize) -> Result<()> {
    if (2..=max).contains(&n) {
        Ok(())
    } else {
        Err(rabi_spt::Error::InvalidParameter(format!("n_fock must lie in 2..={max}, got {n}")))
    }
}

/// `W_ee` on the grid followed by `W_gg`, each `points²` values with the
/// real part of β varying fastest.
pub fn wigner_map_values(preset: &str, xi: f64, alpha: f64, n_fock: usize, half_width: f64, points: usize) -> Result<Vec<f64>> {
    check_fock(n_fock, MAX_DEMO_FOCK)?;
    let preset = Preset::from_name(preset)?;
    let dev = DeviceParams::table_s2();
    let params = PresetParams {
        alpha: Complex64::new(alpha, 0.0),
        xi,
        eta: QuenchSchedule::for_device(&dev).eta,
        ..PresetParams::default()
    };
    let state = preset_state(preset, HilbertSpec::qubit(n_fock)?, &params)?;
    let rec = wigner_matrix_forward(&state, &square_grid(half_width, points))?;
    Ok(rec.w_ee.into_iter().chain(rec.w_gg).collect())
}

/// Interleaved `(t_us, n̄)` pairs of a coupling ramp up to `xi_max`, for the
/// effective Rabi model. `t_phi_us <= 0` switches decoherence off.
pub fn quench_nbar_values(xi_max: f64, t_phi_us: f64, n_fock: usize) -> Result<Vec<f64>> {
    check_fock(n_fock, MAX_QUENCH_FOCK)?;
    let dev = DeviceParams::table_s2();
    let mut schedule = QuenchSchedule::for_device(&dev);
    schedule.xi_max = xi_max;
    let lindblad = if t_phi_us > 0.0 {
        LindbladSpec::from_device(&dev, Some(t_phi_us))?
    } else {
        LindbladSpec::closed()
    };
    let options = QuenchOptions {
        n_fock,
        output_interval: 0.02,
        ..QuenchOptions::new(HamiltonianLevel::Rabi)
    };
    let run = run_quench(&dev, &schedule, &lindblad, &options, None)?;
    let rec = run.record;
    Ok(rec.times.iter().zip(&rec.nbar).flat_map(|(t, n)| [*t, *n]).collect())
}

/// Interleaved `(τ_us, P_e)` pairs of the ancilla signal for a coherent
/// field of amplitude `alpha`. `shots = 0` gives the noiseless curve.
pub fn rabi_signal_values(alpha: f64, shots: u32, seed: u32, tau_max_us: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(tau_max_us > 0.0) {
        return Err(rabi_spt::Error::InvalidParameter("need points >= 2 and tau_max_us > 0".into()));
    }
    let mean = alpha * alpha;
    let mut n_max = 1;
    while poisson_tail(mean, n_max) > 1e-12 {
        n_max += 1;
    }
    let mut p = vec![(-mean).exp()];
    for n in 1..n_max {
        p.push(p[n - 1] * mean / n as f64);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    let taus: Vec<f64> = (0..points).map(|i| tau_max_us * i as f64 / (points - 1) as f64).collect();
    let noise = SignalNoise {
        shots: (shots > 0).then_some(shots),
        readout_errors: shots > 0,
        ..SignalNoise::noiseless()
    };
    let sig = simulate_rabi_signal(&p, &DeviceParams::table_s2(), &taus, &noise, seed as u64)?;
    Ok(sig.taus.iter().zip(&sig.p_e).flat_map(|(t, p)| [*t, *p]).collect())
}

/// Ancilla–resonator coupling λ′/2π in MHz, for axis labels.
pub fn ancilla_coupling_mhz() -> f64 {
    to_mhz(DeviceParams::table_s2().lambda_prime)
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn preset_names() -> Vec<String> {
    Preset::ALL.iter().map(|p| p.name().to_string()).collect()
}

#[wasm_bindgen]
pub fn wigner_map(preset: &str, xi: f64, alpha: f64, n_fock: usize, half_width: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(wigner_map_values(preset, xi, alpha, n_fock, half_width, points))
}

#[wasm_bindgen]
pub fn quench_nbar(xi_max: f64, t_phi_us: f64, n_fock: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(quench_nbar_values(xi_max, t_phi_us, n_fock))
}

#[wasm_bindgen]
pub fn rabi_signal(alpha: f64, shots: u32, seed: u32, tau_max_us: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(rabi_signal_values(alpha, shots, seed, tau_max_us, points))
}

#[wasm_bindgen]
pub fn ancilla_coupling() -> f64 {
    ancilla_coupling_mhz()
}

#[wasm_bindgen]
pub fn effective_coupling_mhz() -> f64 {
    to_mhz(QuenchSchedule::for_device(&DeviceParams::table_s2()).eta)
}
