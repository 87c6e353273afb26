//! Run configuration: a TOML file with one table per pipeline stage.
//! Every table rejects unknown keys, and every key has a default, so an
//! empty file is a valid configuration.

use std::path::PathBuf;

use num_complex::Complex64;
use rabi_spt::hilbert::{mhz, HilbertSpec};
use rabi_spt::model::{DeviceConfig, DeviceParams, HamiltonianLevel};
use rabi_spt::presets::{Preset, PresetParams};
use rabi_spt::quench::{
    ComparisonOptions, LindbladSpec, QuenchOptions, QuenchSchedule, Stepping, COMPARISON_T_PHI,
};
use rabi_spt::tomography::{
    default_taus, square_grid, ReconstructionOptions, SignalNoise, TomographyOptions,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Seeds every random draw of the run.
    pub seed: u64,
    pub level: HamiltonianLevel,
    pub out: Option<PathBuf>,
    pub device: DeviceSection,
    pub schedule: ScheduleSection,
    pub lindblad: LindbladSection,
    pub quench: QuenchSection,
    pub state: StateSection,
    pub tomography: TomographySection,
    pub reconstruct: ReconstructSection,
    pub compare: CompareSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            level: HamiltonianLevel::Rabi,
            out: None,
            device: DeviceSection::default(),
            schedule: ScheduleSection::default(),
            lindblad: LindbladSection::default(),
            quench: QuenchSection::default(),
            state: StateSection::default(),
            tomography: TomographySection::default(),
            reconstruct: ReconstructSection::default(),
            compare: CompareSection::default(),
        }
    }
}

/// Either a named preset or a full parameter table (`[device.params]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    pub preset: Option<String>,
    pub params: Option<DeviceConfig>,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self {
            preset: Some("table-s2".into()),
            params: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    pub xi0: f64,
    pub xi_max: f64,
    pub t_f_us: f64,
    /// `Ω/δ`.
    pub ratio: f64,
    /// Effective coupling η/2π; derived from the device when absent.
    pub eta_mhz: Option<f64>,
    /// Applies the experiment-matched Ω scale and δ offset below (opt-in).
    pub experimental_corrections: bool,
    pub omega_correction: f64,
    pub delta_offset_mhz: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            xi0: 0.5,
            xi_max: 1.5,
            t_f_us: 2.0,
            ratio: 10.0,
            eta_mhz: None,
            experimental_corrections: false,
            omega_correction: 1.24,
            delta_offset_mhz: -0.07,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindbladSection {
    pub closed: bool,
    /// Pure-dephasing time; ignored when `t_phi_from_device` is set.
    pub t_phi_us: f64,
    pub t_phi_from_device: bool,
    /// Explicit rates (1/μs), overriding everything above.
    pub rates: Option<LindbladSpec>,
}

impl Default for LindbladSection {
    fn default() -> Self {
        Self {
            closed: false,
            t_phi_us: COMPARISON_T_PHI,
            t_phi_from_device: false,
            rates: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchSection {
    pub n_fock: usize,
    /// Step in ns; 1 ns for the Rabi level and 0.1 ns otherwise when absent.
    pub dt_ns: Option<f64>,
    /// Enables step doubling with this local-error tolerance.
    pub adaptive_tol: Option<f64>,
    pub output_interval_us: f64,
    pub sideband_cutoff: i32,
    pub dressed_noise: bool,
    pub stark_compensation: bool,
    pub t_end_us: Option<f64>,
    pub snapshot_times_us: Vec<f64>,
}

impl Default for QuenchSection {
    fn default() -> Self {
        let o = QuenchOptions::default();
        Self {
            n_fock: o.n_fock,
            dt_ns: None,
            adaptive_tol: None,
            output_interval_us: o.output_interval,
            sideband_cutoff: o.sideband_cutoff,
            dressed_noise: o.dressed_noise,
            stark_compensation: o.stark_compensation,
            t_end_us: None,
            snapshot_times_us: Vec::new(),
        }
    }
}

/// Input state for `wigner` and `metrics`: a density CSV (or a quench
/// output directory) when `path` is set, otherwise an analytic preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub path: Option<PathBuf>,
    pub preset: String,
    pub n_fock: usize,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub xi: f64,
}

impl Default for StateSection {
    fn default() -> Self {
        let p = PresetParams::default();
        Self {
            path: None,
            preset: "cat".into(),
            n_fock: 40,
            alpha_re: p.alpha.re,
            alpha_im: p.alpha.im,
            xi: p.xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TomographyMode {
    /// Forward Wigner matrix of the state itself.
    Exact,
    /// Simulated ancilla signals, photon-number fits and readout errors.
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographySection {
    pub mode: TomographyMode,
    pub grid_half_width: f64,
    pub grid_points: usize,
    /// Shots per ancilla signal point in measured mode.
    pub shots: u32,
    pub photon_mask: f64,
    pub n_max: Option<usize>,
    pub tau_step_ns: f64,
    pub tau_max_us: f64,
}

impl Default for TomographySection {
    fn default() -> Self {
        Self {
            mode: TomographyMode::Exact,
            grid_half_width: 3.0,
            grid_points: 25,
            shots: 3000,
            photon_mask: 10.0,
            n_max: None,
            tau_step_ns: 2.0,
            tau_max_us: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructSection {
    pub n_fock: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for ReconstructSection {
    fn default() -> Self {
        let o = ReconstructionOptions::default();
        Self {
            n_fock: 20,
            // Masked grids leave the fit underdetermined and convergence
            // slow; noisy records typically settle after about 1000 steps.
            max_iterations: 2000,
            tolerance: o.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub n_fock: usize,
    pub full_level: HamiltonianLevel,
    pub t_phi_us: f64,
    pub corrected_decoherent: bool,
    pub t_end_us: Option<f64>,
}

impl Default for CompareSection {
    fn default() -> Self {
        let o = ComparisonOptions::default();
        Self {
            n_fock: o.n_fock,
            full_level: o.full_level,
            t_phi_us: o.t_phi,
            corrected_decoherent: o.corrected_decoherent,
            t_end_us: o.t_end,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn device(&self) -> Result<DeviceParams, CliError> {
        let d = match (&self.device.preset, &self.device.params) {
            (_, Some(p)) => DeviceParams::try_from(*p)?,
            (Some(name), None) => DeviceParams::preset(name)?,
            (None, None) => DeviceParams::table_s2(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn schedule(&self, dev: &DeviceParams) -> Result<QuenchSchedule, CliError> {
        let s = &self.schedule;
        let base = match s.eta_mhz {
            Some(eta) => QuenchSchedule::with_eta(mhz(eta)),
            None => QuenchSchedule::for_device(dev),
        };
        let mut q = QuenchSchedule {
            xi0: s.xi0,
            xi_max: s.xi_max,
            t_f: s.t_f_us,
            ratio: s.ratio,
            ..base
        };
        if s.experimental_corrections {
            q.omega_correction = s.omega_correction;
            q.delta_offset = mhz(s.delta_offset_mhz);
        }
        q.validate()?;
        Ok(q)
    }

    pub fn lindblad(&self, dev: &DeviceParams) -> Result<LindbladSpec, CliError> {
        let l = &self.lindblad;
        let spec = if let Some(r) = l.rates {
            r
        } else if l.closed {
            LindbladSpec::closed()
        } else if l.t_phi_from_device {
            LindbladSpec::from_device(dev, None)?
        } else {
            LindbladSpec::from_device(dev, Some(l.t_phi_us))?
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn quench_options(&self) -> Result<QuenchOptions, CliError> {
        let q = &self.quench;
        if q.output_interval_us <= 0.0 {
            return Err(CliError::Config("quench.output_interval_us must be positive".into()));
        }
        let mut o = QuenchOptions::new(self.level);
        o.n_fock = q.n_fock;
        o.dt = q.dt_ns.map(|ns| ns * 1e-3);
        if let Some(tol) = q.adaptive_tol {
            o.stepping = Stepping::Adaptive { tol };
        }
        o.output_interval = q.output_interval_us;
        o.sideband_cutoff = q.sideband_cutoff;
        o.dressed_noise = q.dressed_noise;
        o.stark_compensation = q.stark_compensation;
        o.t_end = q.t_end_us;
        o.snapshots = q.snapshot_times_us.iter().map(|&t| (t, None)).collect();
        Ok(o)
    }

    pub fn preset(&self) -> Result<(Preset, HilbertSpec, PresetParams), CliError> {
        let s = &self.state;
        let preset = Preset::from_name(&s.preset)?;
        let spec = HilbertSpec::qubit(s.n_fock)?;
        let dev = self.device()?;
        let eta = match self.schedule.eta_mhz {
            Some(e) => mhz(e),
            None => QuenchSchedule::for_device(&dev).eta,
        };
        let params = PresetParams {
            alpha: Complex64::new(s.alpha_re, s.alpha_im),
            xi: s.xi,
            eta,
            ratio: self.schedule.ratio,
        };
        Ok((preset, spec, params))
    }

    pub fn grid(&self) -> Result<Vec<Complex64>, CliError> {
        let t = &self.tomography;
        if t.grid_points < 2 || !(t.grid_half_width > 0.0) {
            return Err(CliError::Config(
                "tomography grid needs grid_points >= 2 and grid_half_width > 0".into(),
            ));
        }
        Ok(square_grid(t.grid_half_width, t.grid_points))
    }

    pub fn tomography_options(&self) -> Result<TomographyOptions, CliError> {
        let t = &self.tomography;
        if !(t.tau_step_ns > 0.0 && t.tau_max_us > 0.0) {
            return Err(CliError::Config("tau_step_ns and tau_max_us must be positive".into()));
        }
        let mut o = match t.mode {
            TomographyMode::Exact => TomographyOptions {
                noise: SignalNoise::noiseless(),
                ..TomographyOptions::default()
            },
            TomographyMode::Measured => TomographyOptions::measured(t.shots, self.seed),
        };
        let steps = (t.tau_max_us * 1e3 / t.tau_step_ns).round() as usize;
        let default = default_taus();
        let step_us = t.tau_step_ns * 1e-3;
        o.taus = if steps + 1 == default.len() && (default[1] - step_us).abs() < 1e-15 {
            default
        } else {
            (0..=steps).map(|i| i as f64 * step_us).collect()
        };
        o.n_max = t.n_max;
        o.photon_mask = t.photon_mask;
        Ok(o)
    }

    pub fn reconstruction(&self) -> Result<(HilbertSpec, ReconstructionOptions), CliError> {
        let r = &self.reconstruct;
        Ok((
            HilbertSpec::qubit(r.n_fock)?,
            ReconstructionOptions {
                max_iterations: r.max_iterations,
                tolerance: r.tolerance,
            },
        ))
    }

    pub fn comparison(&self) -> ComparisonOptions {
        let c = &self.compare;
        ComparisonOptions {
            n_fock: c.n_fock,
            full_level: c.full_level,
            t_phi: c.t_phi_us,
            corrected_decoherent: c.corrected_decoherent,
            t_end: c.t_end_us,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_fail() {
        for text in ["sed = 3", "[schedule]\nxi_mx = 1.2", "[device.params]\nomega0_ghz = 5.18\nbogus = 1"] {
            assert!(matches!(RunConfig::from_toml(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn serialized_config_round_trips() {
        let mut c = RunConfig::from_toml("seed = 7\nlevel = \"three-level\"\n[quench]\nn_fock = 12").unwrap();
        c.device.params = Some(DeviceConfig::from(DeviceParams::table_s2()));
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.level, HamiltonianLevel::ThreeLevel);
    }

    #[test]
    fn default_schedule_uses_device_coupling() {
        let c = RunConfig::default();
        let dev = c.device().unwrap();
        let q = c.schedule(&dev).unwrap();
        assert!((rabi_spt::hilbert::to_mhz(q.eta) - 0.81).abs() < 0.01);
        assert_eq!(q.omega_correction, 1.0);
        let mut opted = RunConfig::default();
        opted.schedule.experimental_corrections = true;
        assert!((opted.schedule(&dev).unwrap().omega_correction - 1.24).abs() < 1e-12);
    }

    #[test]
    fn default_taus_are_reused() {
        let o = RunConfig::default().tomography_options().unwrap();
        assert_eq!(o.taus, default_taus());
    }
}
