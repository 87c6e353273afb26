use std::path::{Path, PathBuf};

use rabi_spt::hilbert::{ComplexOperator, QuantumState};
use rabi_spt::metrics::{fidelity, metrics_report, MetricsReport};
use rabi_spt::pool::configured_threads;
use rabi_spt::presets::preset_state;
use rabi_spt::quench::{compare_models, photon_distribution, run_quench, QuenchManifest};
use rabi_spt::tomography::{
    reconstruct_density, simulate_tomography, wigner_matrix_forward, PointFailure, Provenance,
    SettingPopulations, WignerRecord,
};
use serde::Serialize;

use crate::config::{RunConfig, TomographyMode};
use crate::io::{density_to_csv, load_state, read_text, sha256_hex, FileDigest, OutputDir};
use crate::CliError;

fn show(v: Option<f64>) -> String {
    // `+ 0.0` turns a negative zero into a plain zero.
    v.map_or("n/a".to_string(), |x| format!("{:.4}", x + 0.0))
}

pub const TOMOGRAPHY_STATE_FILE: &str = "state_tomography-time.csv";
pub const WIGNER_FILE: &str = "wigner.csv";

#[derive(Serialize)]
struct Manifest<'a, D: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    threads: Option<usize>,
    config: &'a RunConfig,
    inputs: Vec<FileDigest>,
    outputs: &'a [FileDigest],
    details: D,
}

/// Writes `config.toml` (the resolved configuration, reusable with
/// `--config`) and `manifest.json` describing everything written before.
fn finish<D: Serialize>(
    out: &mut OutputDir,
    command: &'static str,
    config: &RunConfig,
    inputs: Vec<FileDigest>,
    details: D,
) -> Result<(), CliError> {
    out.write("config.toml", &config.to_toml())?;
    let outputs = out.written().to_vec();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: config.seed,
        threads: configured_threads(),
        config,
        inputs,
        outputs: &outputs,
        details,
    };
    out.write_json("manifest.json", &manifest)
}

fn digest_input(path: &Path) -> Result<FileDigest, CliError> {
    let text = read_text(path)?;
    Ok(FileDigest {
        file: path.display().to_string(),
        bytes: text.len(),
        sha256: sha256_hex(text.as_bytes()),
    })
}

fn output_dir(config: &RunConfig, command: &str) -> Result<OutputDir, CliError> {
    let root = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("rabi-spt-out").join(command));
    OutputDir::create(&root)
}

/// The configured input state and, for file inputs, its digest.
fn input_state(config: &RunConfig) -> Result<(QuantumState, Vec<FileDigest>), CliError> {
    match &config.state.path {
        Some(path) => {
            let file = if path.is_dir() { path.join(TOMOGRAPHY_STATE_FILE) } else { path.clone() };
            Ok((load_state(path)?, vec![digest_input(&file)?]))
        }
        None => {
            let (preset, spec, params) = config.preset()?;
            Ok((preset_state(preset, spec, &params)?, Vec::new()))
        }
    }
}

#[derive(Serialize)]
struct QuenchSummary {
    final_nbar: f64,
    final_vacuum_population: f64,
    final_parity: f64,
    final_purity: f64,
    run: QuenchManifest,
}

pub fn quench(config: &RunConfig) -> Result<(), CliError> {
    let dev = config.device()?;
    let schedule = config.schedule(&dev)?;
    let lindblad = config.lindblad(&dev)?;
    let options = config.quench_options()?;
    let run = run_quench(&dev, &schedule, &lindblad, &options, None)?;
    let mut out = output_dir(config, "quench")?;
    let rec = &run.record;
    out.write("trajectory.csv", &rec.to_csv())?;
    for snap in &rec.snapshots {
        let name = match &snap.label {
            Some(label) => format!("state_{label}.csv"),
            None => format!("state_t{:.4}us.csv", snap.t),
        };
        out.write(&name, &density_to_csv(&snap.state))?;
    }
    let last = rec.times.len() - 1;
    let final_state = rec
        .final_state()
        .ok_or_else(|| CliError::Numerical("quench produced no final state".into()))?;
    let summary = QuenchSummary {
        final_nbar: rec.nbar[last],
        final_vacuum_population: photon_distribution(final_state)[0],
        final_parity: rec.parity[last],
        final_purity: rec.purity[last],
        run: run.manifest.clone(),
    };
    eprintln!(
        "quench: final nbar {:.3}, vacuum {:.3}, parity {:.3}",
        summary.final_nbar, summary.final_vacuum_population, summary.final_parity
    );
    finish(&mut out, "quench", config, Vec::new(), summary)
}

#[derive(Serialize)]
struct WignerSummary {
    provenance: Provenance,
    points: usize,
    masked_points: usize,
    min_w_ee: f64,
    min_w_gg: f64,
    populations: Vec<SettingPopulations>,
    failures: Vec<PointFailure>,
}

fn masked_min(values: &[f64], masked: &[bool]) -> f64 {
    values
        .iter()
        .zip(masked)
        .filter(|(v, m)| !**m && v.is_finite())
        .map(|(v, _)| *v)
        .fold(f64::INFINITY, f64::min)
}

pub fn wigner(config: &RunConfig) -> Result<(), CliError> {
    let (state, inputs) = input_state(config)?;
    let grid = config.grid()?;
    let record = match config.tomography.mode {
        TomographyMode::Exact => wigner_matrix_forward(&state, &grid)?,
        TomographyMode::Measured => {
            let dev = config.device()?;
            simulate_tomography(&state, &dev, &grid, &config.tomography_options()?)?
        }
    };
    let mut out = output_dir(config, "wigner")?;
    out.write(WIGNER_FILE, &record.to_csv())?;
    let summary = WignerSummary {
        provenance: record.provenance,
        points: record.len(),
        masked_points: record.masked.iter().filter(|m| **m).count(),
        min_w_ee: masked_min(&record.w_ee, &record.masked),
        min_w_gg: masked_min(&record.w_gg, &record.masked),
        populations: record.populations.clone(),
        failures: record.failures.clone(),
    };
    eprintln!(
        "wigner: {} points ({} masked), min W_ee {:.4}, min W_gg {:.4}",
        summary.points, summary.masked_points, summary.min_w_ee, summary.min_w_gg
    );
    finish(&mut out, "wigner", config, inputs, summary)
}

#[derive(Serialize)]
struct ReconstructionSummary {
    residual: f64,
    iterations: usize,
    converged: bool,
    samples: usize,
    metrics: MetricsReport,
}

pub fn reconstruct(config: &RunConfig, input: &Path) -> Result<(), CliError> {
    let file = if input.is_dir() { input.join(WIGNER_FILE) } else { input.to_path_buf() };
    let record = WignerRecord::from_csv(&read_text(&file)?)?;
    let (spec, options) = config.reconstruction()?;
    let result = reconstruct_density(&record, spec, &options)?;
    let metrics = metrics_report(&result.rho_hat);
    let mut out = output_dir(config, "reconstruct")?;
    out.write("density.csv", &density_to_csv(&result.rho_hat))?;
    out.write_json("metrics.json", &metrics)?;
    let summary = ReconstructionSummary {
        residual: result.residual,
        iterations: result.iterations,
        converged: result.converged,
        samples: result.samples,
        metrics,
    };
    eprintln!(
        "reconstruct: residual {:.3e} after {} iterations, negativity {}",
        summary.residual,
        summary.iterations,
        show(summary.metrics.negativity)
    );
    finish(&mut out, "reconstruct", config, vec![digest_input(&file)?], &summary)?;
    if !summary.converged {
        return Err(CliError::NotConverged(format!(
            "reconstruction stopped after {} iterations (residual {:.3e}); best iterate written",
            summary.iterations, summary.residual
        )));
    }
    Ok(())
}

pub fn metrics(config: &RunConfig) -> Result<(), CliError> {
    let (state, inputs) = input_state(config)?;
    let report = metrics_report(&state);
    let mut out = output_dir(config, "metrics")?;
    out.write_json("metrics.json", &report)?;
    eprintln!(
        "metrics: negativity {}, purity {:.4}, alpha {}",
        show(report.negativity),
        report.purity,
        report.alpha_hat.map_or("n/a".to_string(), |a| format!("{:.4}{:+.4}i", a.re, a.im))
    );
    finish(&mut out, "metrics", config, inputs, &report)
}

#[derive(Serialize)]
struct ComparisonSummary {
    t_end: f64,
    vacuum_population: Vec<(String, f64)>,
    distribution_sums: Vec<(String, f64)>,
    runs: Vec<QuenchManifest>,
}

pub fn compare(config: &RunConfig) -> Result<(), CliError> {
    let dev = config.device()?;
    let schedule = config.schedule(&dev)?;
    let cmp = compare_models(&dev, &schedule, &config.comparison())?;
    let mut out = output_dir(config, "compare")?;
    out.write("distributions.csv", &cmp.distributions_csv())?;
    let fields: Vec<ComplexOperator> =
        cmp.cases.iter().map(|c| c.final_state().partial_trace_qubit()).collect();
    let mut table = String::from("case_a,case_b,total_variation,field_fidelity\n");
    for i in 0..cmp.cases.len() {
        for j in i + 1..cmp.cases.len() {
            table.push_str(&format!(
                "{},{},{},{}\n",
                cmp.cases[i].label,
                cmp.cases[j].label,
                cmp.total_variation(i, j),
                fidelity(&fields[i], &fields[j])
            ));
        }
    }
    out.write("fidelity.csv", &table)?;
    let summary = ComparisonSummary {
        t_end: cmp.t_end,
        vacuum_population: cmp
            .cases
            .iter()
            .map(|c| (c.label.to_string(), c.photon_distribution[0]))
            .collect(),
        distribution_sums: cmp
            .cases
            .iter()
            .map(|c| (c.label.to_string(), c.photon_distribution.iter().sum()))
            .collect(),
        runs: cmp.cases.iter().map(|c| c.run.manifest.clone()).collect(),
    };
    for (label, p0) in &summary.vacuum_population {
        eprintln!("compare: {label} vacuum population {p0:.3}");
    }
    finish(&mut out, "compare", config, Vec::new(), summary)
}
