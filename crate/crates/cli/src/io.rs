use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rabi_spt::hilbert::{ComplexOperator, HilbertSpec, QuantumState};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// `row`/`col` are joint indices `k·n_fock + n`; the level and Fock
/// columns repeat them in factored form so the file is self-describing.
pub const DENSITY_HEADER: &str = "row,col,k,n,kp,np,re,im";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Collects the files of one command and writes each through a temporary
/// sibling followed by a rename, so readers never see partial files.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<FileDigest>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))?;
        self.written.push(FileDigest {
            file: name.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Numerical(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn written(&self) -> &[FileDigest] {
        &self.written
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Every entry `⟨k,n|ρ|k',n'⟩` on its own line, in joint-index order.
pub fn density_to_csv(state: &QuantumState) -> String {
    let spec = state.spec();
    let n = spec.n_fock();
    let rho = state.rho();
    let mut s = String::with_capacity(rho.len() * 40);
    s.push_str(DENSITY_HEADER);
    s.push('\n');
    for i in 0..spec.dim() {
        for j in 0..spec.dim() {
            let z = rho[(i, j)];
            s.push_str(&format!("{i},{j},{},{},{},{},{},{}\n", i / n, i % n, j / n, j % n, z.re, z.im));
        }
    }
    s
}

pub fn density_from_csv(text: &str) -> Result<QuantumState, CliError> {
    let bad = |line: usize, msg: &str| CliError::Config(format!("density CSV line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == DENSITY_HEADER => {}
        _ => return Err(bad(1, &format!("expected header {DENSITY_HEADER}"))),
    }
    let mut entries = Vec::new();
    let (mut levels, mut n_fock) = (0, 0);
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(bad(i + 1, "expected 8 fields"));
        }
        let idx: Vec<usize> = f[..6]
            .iter()
            .map(|v| v.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(i + 1, "bad index"))?;
        let re: f64 = f[6].trim().parse().map_err(|_| bad(i + 1, "bad real part"))?;
        let im: f64 = f[7].trim().parse().map_err(|_| bad(i + 1, "bad imaginary part"))?;
        levels = levels.max(idx[2] + 1).max(idx[4] + 1);
        n_fock = n_fock.max(idx[3] + 1).max(idx[5] + 1);
        entries.push((idx, Complex64::new(re, im)));
    }
    let spec = HilbertSpec::new(n_fock, levels)?;
    if entries.len() != spec.dim() * spec.dim() {
        return Err(bad(0, &format!("expected {} entries, found {}", spec.dim().pow(2), entries.len())));
    }
    let mut rho = ComplexOperator::zeros(spec.dim(), spec.dim());
    for (line, (idx, z)) in entries.into_iter().enumerate() {
        let (row, col) = (spec.index(idx[2], idx[3]), spec.index(idx[4], idx[5]));
        if (row, col) != (idx[0], idx[1]) {
            return Err(bad(line + 2, "row/col disagree with the level and Fock columns"));
        }
        rho[(row, col)] = z;
    }
    Ok(QuantumState::new(spec, rho)?)
}

/// A density CSV, or a quench output directory (its tomography-time state).
pub fn load_state(path: &Path) -> Result<QuantumState, CliError> {
    let file = if path.is_dir() {
        path.join(crate::commands::TOMOGRAPHY_STATE_FILE)
    } else {
        path.to_path_buf()
    };
    density_from_csv(&read_text(&file)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rabi_spt::presets::{preset_state, Preset, PresetParams};

    #[test]
    fn density_csv_round_trips_exactly() {
        let spec = HilbertSpec::qubit(6).unwrap();
        let s = preset_state(Preset::Coherent, spec, &PresetParams::default()).unwrap();
        let back = density_from_csv(&density_to_csv(&s)).unwrap();
        assert_eq!(back.rho(), s.rho());
        assert_eq!(back.spec(), s.spec());
    }

    #[test]
    fn truncated_density_csv_is_rejected() {
        let spec = HilbertSpec::qubit(3).unwrap();
        let s = QuantumState::basis(spec, 0, 0).unwrap();
        let text = density_to_csv(&s);
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(density_from_csv(&cut).is_err());
        assert!(density_from_csv("a,b\n").is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
