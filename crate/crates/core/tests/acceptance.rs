//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime
//! and runtime budget.
//!
//! The process exits 0 even when a criterion is red, so that the suite can
//! run inside `cargo test` and report every line. Set
//! `RABI_SPT_ACCEPTANCE_STRICT=1` to exit 1 on any red line instead.

use std::f64::consts::{FRAC_2_PI, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rabi_spt::hilbert::{
    coherent_ket, fock_ket, hermitize, ket_to_density, mhz, product_ket, qubit_ket, to_mhz, trace,
    ComplexOperator, HilbertSpec, Ket, QuantumState,
};
use rabi_spt::metrics::{
    cat_analysis, coherent_reference_coherence, fidelity, negativity, np_sp_coherence,
};
use rabi_spt::model::{
    effective_from_device, np_sp_analytics, stark_corrections, DeviceParams, EffectiveParams,
    HamiltonianLevel,
};
use rabi_spt::quench::{
    run_quench, LindbladSpec, QuenchOptions, QuenchRun, QuenchSchedule, COMPARISON_T_PHI,
    TOMOGRAPHY_TIME,
};
use rabi_spt::tomography::{
    combine_rotated, default_grid, default_taus, diagonal_forward, fit_photon_distribution,
    reconstruct_density, simulate_rabi_signal, simulate_tomography, square_grid,
    wigner_matrix_forward, BasisSetting, Outcome, ReconstructionOptions, SignalNoise,
    TomographyOptions, WignerRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

struct Suite {
    red: usize,
}

impl Suite {
    fn check(&mut self, id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let r = f();
        let took = start.elapsed();
        let pass = r.pass && took <= budget;
        if !pass {
            self.red += 1;
        }
        let over = if took > budget { " OVER BUDGET" } else { "" };
        println!(
            "[{}] {id:>2} {name}: {} ({:.3?} / budget {:?}{over})",
            if pass { "PASS" } else { "FAIL" },
            r.detail,
            took,
            budget
        );
    }
}

/// Poisson weights computed directly, independent of the library helpers.
fn poisson(mean: f64, n_max: usize) -> Vec<f64> {
    let mut p = vec![(-mean).exp()];
    for n in 1..=n_max {
        p.push(p[n - 1] * mean / n as f64);
    }
    p
}

fn normalized(psi: Ket) -> Ket {
    let norm = psi.norm();
    psi / c(norm, 0.0)
}

fn default_quench(lindblad: LindbladSpec) -> QuenchRun {
    let dev = DeviceParams::table_s2();
    let schedule = QuenchSchedule::for_device(&dev);
    run_quench(&dev, &schedule, &lindblad, &QuenchOptions::new(HamiltonianLevel::Rabi), None)
        .expect("quench runs")
}

fn unmasked_minima(rec: &WignerRecord) -> (f64, f64, usize) {
    let mut ee = f64::INFINITY;
    let mut gg = f64::INFINITY;
    let mut used = 0;
    for i in 0..rec.len() {
        if rec.masked[i] || rec.failures.iter().any(|f| f.index == i) {
            continue;
        }
        used += 1;
        ee = ee.min(rec.w_ee[i]);
        gg = gg.min(rec.w_gg[i]);
    }
    (ee, gg, used)
}

fn main() {
    let dev = DeviceParams::table_s2();
    let mut suite = Suite { red: 0 };
    let threads = rabi_spt::pool::configured_threads()
        .map_or_else(|| "default".to_string(), |n| n.to_string());
    println!("acceptance suite (worker threads: {threads})");

    suite.check(1, "effective couplings", Duration::from_millis(1), || {
        let p = effective_from_device(&dev, 0.0);
        let (eta, b0) = (to_mhz(p.eta), to_mhz(p.b0));
        verdict(
            (eta - 0.81).abs() <= 0.01 && (b0 - 33.28).abs() <= 0.05,
            format!("eta/2pi = {eta:.4} MHz, B0/2pi = {b0:.3} MHz"),
        )
    });

    suite.check(2, "Stark and Kerr constants", Duration::from_millis(1), || {
        let s = stark_corrections(&dev);
        let net = to_mhz(s.s1 - 0.5 * s.s2);
        let kerr = to_mhz(s.kerr);
        verdict(
            (net - 0.45).abs() <= 0.15 * 0.45 && (kerr - 0.0051).abs() <= 0.15 * 0.0051,
            format!("S1 - S2/2 = {net:.4} MHz, Kerr = {kerr:.5} MHz"),
        )
    });

    suite.check(3, "coherent-reference coherence", Duration::from_millis(10), || {
        let a = 2.62f64;
        let closed = coherent_reference_coherence(a);
        // Oracle: e^{-|a|^2/2} a^n / sqrt(n!) multiplied by the vacuum
        // amplitude e^{-|a|^2/2}, summed term by term.
        let mut amp = (-a * a / 2.0).exp();
        let v0 = amp;
        let mut oracle = 0.0;
        for n in 1..200 {
            amp *= a / (n as f64).sqrt();
            oracle += v0 * amp;
        }
        let via_state = np_sp_coherence(&ket_to_density(&coherent_ket(60, c(a, 0.0)))).unwrap();
        verdict(
            (closed - 0.1147).abs() <= 0.0005
                && (closed - oracle).abs() < 1e-12
                && (via_state - oracle).abs() < 1e-9,
            format!("C = {closed:.5} (oracle {oracle:.5}, density {via_state:.5})"),
        )
    });

    suite.check(4, "superradiant cat negativity", Duration::from_secs(1), || {
        let spec = HilbertSpec::qubit(40).unwrap();
        let p = EffectiveParams::from_xi(mhz(0.81), 1.5, 10.0).unwrap();
        let cat = np_sp_analytics(&p).unwrap().sp_cat_ket(&spec).unwrap();
        let n = negativity(&QuantumState::pure(spec, &cat).unwrap()).unwrap();
        verdict((n - 0.4483).abs() <= 0.02, format!("N = {n:.4}"))
    });

    suite.check(5, "cat geometry and sizes", Duration::from_secs(1), || {
        let n = 40;
        let a = c(2.62, 0.0);
        let even = normalized(coherent_ket(n, a) + coherent_ket(n, -a));
        let two = cat_analysis(&ket_to_density(&even), Some(a)).unwrap();
        let d2_oracle = 4.0 * 2.62f64 * 2.62;
        // Matched populations: vacuum weight 0.3, lobes 0.35 each.
        let three = normalized(
            coherent_ket(n, c(0.0, 0.0)) * c(0.3f64.sqrt(), 0.0)
                + (coherent_ket(n, a) + coherent_ket(n, -a)) * c(0.35f64.sqrt(), 0.0),
        );
        let three = cat_analysis(&ket_to_density(&three), Some(a)).unwrap();
        let s3 = three.cat_size_distance;
        verdict(
            (two.d_squared - d2_oracle).abs() < 1e-12
                && (two.cat_size - 13.73).abs() <= 0.1
                && (s3 - 14.03).abs() <= 1.0
                && (s3 - 13.27).abs() <= 1.0,
            format!(
                "d^2 = {:.4}, two-component S = {:.3}, three-component S = {s3:.3}",
                two.d_squared, two.cat_size
            ),
        )
    });

    suite.check(6, "quench phenomenology", Duration::from_secs(300), || {
        let lindblad = LindbladSpec::from_device(&dev, Some(COMPARISON_T_PHI)).unwrap();
        let noisy = default_quench(lindblad);
        let state = noisy.record.final_state().unwrap();
        let p0: f64 = (0..state.spec().n_qubit_levels())
            .map(|k| state.rho()[(state.spec().index(k, 0), state.spec().index(k, 0))].re)
            .sum();
        let nbar = *noisy.record.nbar.last().unwrap();
        let closed = default_quench(LindbladSpec::closed());
        let parity = closed.record.parity.iter().copied().fold(f64::INFINITY, f64::min);
        verdict(
            (p0 - 0.30).abs() <= 0.15 && (3.0..=8.0).contains(&nbar) && parity > 0.9,
            format!("P0 = {p0:.3}, final nbar = {nbar:.3}, closed-system min parity = {parity:.6}"),
        )
    });

    suite.check(7, "effective vs full model", Duration::from_secs(600), || {
        let schedule = QuenchSchedule::for_device(&dev);
        let run = |level| {
            let options = QuenchOptions {
                t_end: Some(0.5),
                ..QuenchOptions::new(level)
            };
            run_quench(&dev, &schedule, &LindbladSpec::closed(), &options, None).unwrap()
        };
        let eff = run(HamiltonianLevel::Rabi);
        let full = run(HamiltonianLevel::Rotating);
        let f = fidelity(
            eff.record.final_state().unwrap().rho(),
            full.record.final_state().unwrap().rho(),
        );
        verdict(
            f > 0.95,
            format!("F = {f:.4} at 0.5 us (full-model step {} ns)", full.manifest.dt * 1e3),
        )
    });

    suite.check(8, "tomography round trips", Duration::from_secs(300), || {
        let grid = default_grid();
        // Noiseless chain against the forward map for a displaced
        // superposition with qubit coherence.
        let spec = HilbertSpec::qubit(12).unwrap();
        let field = normalized(coherent_ket(12, c(0.8, 0.3)) + fock_ket(12, 1) * c(0.0, 0.7));
        let qubit = qubit_ket(2, &[c(0.8, 0.0), c(0.36, 0.48)]);
        let s = QuantumState::pure(spec, &normalized(product_ket(&qubit, &field))).unwrap();
        let exact = wigner_matrix_forward(&s, &grid).unwrap();
        let chain = simulate_tomography(&s, &dev, &grid, &TomographyOptions::default()).unwrap();
        let chain_err = (0..grid.len())
            .flat_map(|i| {
                [
                    chain.w_ee[i] - exact.w_ee[i],
                    chain.w_gg[i] - exact.w_gg[i],
                    chain.re_w_eg[i] - exact.re_w_eg[i],
                    chain.im_w_eg[i] - exact.im_w_eg[i],
                ]
            })
            .fold(0.0f64, |m, d| m.max(d.abs()));

        // Reconstruction of random mixed states from exact samples.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let rspec = HilbertSpec::qubit(4).unwrap();
        let d = rspec.dim();
        let mut worst_fid = 1.0f64;
        let rgrid = square_grid(2.5, 9);
        for _ in 0..20 {
            let rank = rng.random_range(1..=3);
            let m = ComplexOperator::from_fn(d, rank, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let rho = hermitize(&(&m * m.adjoint()));
            let rho = &rho / trace(&rho);
            let truth = QuantumState::new(rspec, rho).unwrap();
            let rec = wigner_matrix_forward(&truth, &rgrid).unwrap();
            let r = reconstruct_density(&rec, rspec, &ReconstructionOptions::default()).unwrap();
            worst_fid = worst_fid.min(fidelity(r.rho_hat.rho(), truth.rho()));
        }

        // Rotated-basis combination against the off-diagonal forward map.
        let m = |set, out| diagonal_forward(&s, set, out, &grid).unwrap();
        let comb = combine_rotated(
            &m(BasisSetting::RotateY, Outcome::Plus),
            &m(BasisSetting::RotateY, Outcome::Minus),
            &m(BasisSetting::RotateX, Outcome::Plus),
            &m(BasisSetting::RotateX, Outcome::Minus),
        )
        .unwrap();
        let comb_err = (0..grid.len())
            .map(|i| {
                (comb.re_w_eg[i] - exact.re_w_eg[i])
                    .abs()
                    .max((comb.im_w_eg[i] - exact.im_w_eg[i]).abs())
            })
            .fold(comb.trace_discrepancy, f64::max);
        verdict(
            chain.failures.is_empty() && chain_err < 0.01 && worst_fid > 0.99 && comb_err < 1e-10,
            format!(
                "chain max |dW| = {chain_err:.2e}, worst of 20 reconstruction fidelities = {worst_fid:.5}, rotated identity error = {comb_err:.1e}"
            ),
        )
    });

    suite.check(9, "photon-number fit", Duration::from_secs(30), || {
        let mut p = poisson(5.0, 40);
        p[40] += 1.0 - p.iter().sum::<f64>();
        let taus = default_taus();
        let err = |noise: &SignalNoise, seed| {
            let s = simulate_rabi_signal(&p, &dev, &taus, noise, seed).unwrap();
            let fit = fit_photon_distribution(&s, 20, &dev).unwrap();
            (0..=20).map(|n| (fit.p_n[n] - p[n]).abs()).fold(0.0, f64::max)
        };
        let clean = err(&SignalNoise::noiseless(), 0);
        let noisy = err(
            &SignalNoise {
                shots: Some(3000),
                ..SignalNoise::noiseless()
            },
            7,
        );
        verdict(
            clean < 0.02 && noisy < 0.05,
            format!("max error noiseless {clean:.2e}, 3000 shots {noisy:.4}"),
        )
    });

    suite.check(10, "Wigner sanity and noisy pipeline", Duration::from_secs(600), || {
        let spec = HilbertSpec::qubit(30).unwrap();
        let g = qubit_ket(2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let origin = [c(0.0, 0.0)];
        let vac = QuantumState::pure(spec, &product_ket(&g, &fock_ket(30, 0))).unwrap();
        let one = QuantumState::pure(spec, &product_ket(&g, &fock_ket(30, 1))).unwrap();
        let w_vac = wigner_matrix_forward(&vac, &origin).unwrap().w_gg[0];
        let w_one = wigner_matrix_forward(&one, &origin).unwrap().w_gg[0];
        let alpha = c(1.2, -0.7);
        let coh = QuantumState::pure(spec, &product_ket(&g, &coherent_ket(30, alpha))).unwrap();
        let grid = square_grid(3.0, 13);
        let w_coh = wigner_matrix_forward(&coh, &grid).unwrap();
        let gauss_err = grid
            .iter()
            .zip(&w_coh.w_gg)
            .map(|(b, w)| (w - FRAC_2_PI * (-2.0 * (b - alpha).norm_sqr()).exp()).abs())
            .fold(0.0, f64::max);
        let sanity = (w_vac - FRAC_2_PI).abs() < 1e-6
            && (w_one + FRAC_2_PI).abs() < 1e-6
            && gauss_err < 1e-6;

        let lindblad = LindbladSpec::from_device(&dev, Some(COMPARISON_T_PHI)).unwrap();
        let run = default_quench(lindblad);
        let state = run.record.snapshot_at(TOMOGRAPHY_TIME).unwrap();
        let rec = simulate_tomography(state, &dev, &default_grid(), &TomographyOptions::measured(3000, 11))
            .unwrap();
        let (ee, gg, used) = unmasked_minima(&rec);
        verdict(
            sanity && ee < -0.02 && gg < -0.02,
            format!(
                "W_vac(0)*pi/2 = {:.9}, W_1(0)*pi/2 = {:.9}, Gaussian error {gauss_err:.1e}; noisy pipeline min W_ee = {ee:.4}, min W_gg = {gg:.4} over {used} unmasked points",
                w_vac * PI / 2.0,
                w_one * PI / 2.0
            ),
        )
    });

    // Informational: the same chain applied to the closed-system state shows
    // that the negativity is erased by the simulated decoherence, not by the
    // measurement chain.
    let start = Instant::now();
    let closed = default_quench(LindbladSpec::closed());
    let state = closed.record.snapshot_at(TOMOGRAPHY_TIME).unwrap();
    let rec = simulate_tomography(state, &dev, &default_grid(), &TomographyOptions::measured(3000, 11)).unwrap();
    let (ee, gg, used) = unmasked_minima(&rec);
    println!(
        "[INFO] 10 closed-system state through the same chain: min W_ee = {ee:.4}, min W_gg = {gg:.4} over {used} unmasked points ({:.3?})",
        start.elapsed()
    );

    println!("{} of 10 criteria red", suite.red);
    let strict = std::env::var("RABI_SPT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && suite.red > 0 {
        std::process::exit(1);
    }
}
