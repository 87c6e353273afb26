use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ghz, mhz, to_mhz};

/// Physical device description. Frequencies are angular (rad/μs), times μs.
///
/// `eps2` is the amplitude of the slow modulation. It is a control knob: the
/// quench schedule overrides it at every instant, so the stored value only
/// matters for static Hamiltonian snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "DeviceConfig", try_from = "DeviceConfig")]
pub struct DeviceParams {
    pub omega0: f64,
    pub omega_p: f64,
    pub eps1: f64,
    pub nu1: f64,
    pub eps2: f64,
    pub nu2: f64,
    pub k_drive: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub gamma_anh: f64,
    pub t1_q: f64,
    pub t2_q: f64,
    pub t1_p: f64,
    pub fg: f64,
    pub fe: f64,
    pub ancilla_fg: f64,
    pub ancilla_fe: f64,
    pub f_idle: f64,
}

impl DeviceParams {
    /// Characterized two-qubit/bus-resonator device used throughout.
    pub fn table_s2() -> Self {
        Self {
            omega0: ghz(5.18),
            omega_p: ghz(5.581),
            eps1: mhz(165.85),
            nu1: mhz(200.0),
            eps2: 0.0,
            nu2: mhz(33.28),
            k_drive: mhz(19.91),
            lambda: mhz(19.91),
            lambda_prime: mhz(20.91),
            gamma_anh: mhz(250.0),
            t1_q: 21.5,
            t2_q: 1.1,
            t1_p: 12.9,
            fg: 0.983,
            fe: 0.937,
            ancilla_fg: 0.990,
            ancilla_fe: 0.920,
            f_idle: ghz(5.93),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "table-s2" => Ok(Self::table_s2()),
            other => Err(Error::InvalidParameter(format!(
                "unknown device preset {other:?} (available: table-s2)"
            ))),
        }
    }

    /// Modulation index `μ = ε₁/ν₁`.
    pub fn mu(&self) -> f64 {
        self.eps1 / self.nu1
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega0", self.omega0),
            ("omega_p", self.omega_p),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("lambda_prime", self.lambda_prime),
            ("gamma_anh", self.gamma_anh),
            ("t1_q", self.t1_q),
            ("t2_q", self.t2_q),
            ("t1_p", self.t1_p),
            ("f_idle", self.f_idle),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("k_drive", self.k_drive),
            ("lambda", self.lambda),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        for (name, f) in [
            ("fg", self.fg),
            ("fe", self.fe),
            ("ancilla_fg", self.ancilla_fg),
            ("ancilla_fe", self.ancilla_fe),
        ] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1], got {f}")));
            }
        }
        if !(0.0..2.0).contains(&self.mu()) {
            return Err(Error::InvalidParameter(format!(
                "modulation index eps1/nu1 = {} outside [0, 2)",
                self.mu()
            )));
        }
        Ok(())
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self::table_s2()
    }
}

/// Human-unit mirror of [`DeviceParams`] used for configuration files:
/// frequencies as ν/2π in GHz or MHz, times in μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub omega0_ghz: f64,
    pub omega_p_ghz: f64,
    pub eps1_mhz: f64,
    pub nu1_mhz: f64,
    #[serde(default)]
    pub eps2_mhz: f64,
    pub nu2_mhz: f64,
    pub k_mhz: f64,
    pub lambda_mhz: f64,
    pub lambda_prime_mhz: f64,
    pub gamma_mhz: f64,
    pub t1_q_us: f64,
    pub t2_q_us: f64,
    pub t1_p_us: f64,
    pub fg: f64,
    pub fe: f64,
    pub ancilla_fg: f64,
    pub ancilla_fe: f64,
    pub f_idle_ghz: f64,
}

impl From<DeviceParams> for DeviceConfig {
    fn from(d: DeviceParams) -> Self {
        let ghz_of = |w: f64| to_mhz(w) / 1000.0;
        Self {
            omega0_ghz: ghz_of(d.omega0),
            omega_p_ghz: ghz_of(d.omega_p),
            eps1_mhz: to_mhz(d.eps1),
            nu1_mhz: to_mhz(d.nu1),
            eps2_mhz: to_mhz(d.eps2),
            nu2_mhz: to_mhz(d.nu2),
            k_mhz: to_mhz(d.k_drive),
            lambda_mhz: to_mhz(d.lambda),
            lambda_prime_mhz: to_mhz(d.lambda_prime),
            gamma_mhz: to_mhz(d.gamma_anh),
            t1_q_us: d.t1_q,
            t2_q_us: d.t2_q,
            t1_p_us: d.t1_p,
            fg: d.fg,
            fe: d.fe,
            ancilla_fg: d.ancilla_fg,
            ancilla_fe: d.ancilla_fe,
            f_idle_ghz: ghz_of(d.f_idle),
        }
    }
}

impl TryFrom<DeviceConfig> for DeviceParams {
    type Error = Error;

    fn try_from(c: DeviceConfig) -> Result<Self> {
        let d = Self {
            omega0: ghz(c.omega0_ghz),
            omega_p: ghz(c.omega_p_ghz),
            eps1: mhz(c.eps1_mhz),
            nu1: mhz(c.nu1_mhz),
            eps2: mhz(c.eps2_mhz),
            nu2: mhz(c.nu2_mhz),
            k_drive: mhz(c.k_mhz),
            lambda: mhz(c.lambda_mhz),
            lambda_prime: mhz(c.lambda_prime_mhz),
            gamma_anh: mhz(c.gamma_mhz),
            t1_q: c.t1_q_us,
            t2_q: c.t2_q_us,
            t1_p: c.t1_p_us,
            fg: c.fg,
            fe: c.fe,
            ancilla_fg: c.ancilla_fg,
            ancilla_fe: c.ancilla_fe,
            f_idle: ghz(c.f_idle_ghz),
        };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_is_valid_and_in_paper_regime() {
        let d = DeviceParams::preset("table-s2").unwrap();
        d.validate().unwrap();
        assert!((d.mu() - 0.82925).abs() < 1e-12);
        assert!(DeviceParams::preset("nope").is_err());
    }

    #[test]
    fn config_round_trip() {
        let d = DeviceParams::table_s2();
        let json = serde_json::to_string(&d).unwrap();
        let back: DeviceParams = serde_json::from_str(&json).unwrap();
        for (a, b) in [(d.omega0, back.omega0), (d.eta_like(), back.eta_like()), (d.t1_p, back.t1_p)] {
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut v = serde_json::to_value(DeviceParams::table_s2()).unwrap();
        v["lamda_mhz"] = serde_json::json!(1.0);
        assert!(serde_json::from_value::<DeviceParams>(v).is_err());
        let mut v = serde_json::to_value(DeviceParams::table_s2()).unwrap();
        v["fe"] = serde_json::json!(1.2);
        assert!(serde_json::from_value::<DeviceParams>(v).is_err());
    }

    impl DeviceParams {
        fn eta_like(&self) -> f64 {
            self.lambda * self.mu()
        }
    }
}
