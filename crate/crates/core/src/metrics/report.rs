use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    cat_analysis, coherent_reference_coherence, negativity, np_sp_coherence, purity,
    separate_phases, CatAnalysis, PhaseSeparation,
};
use crate::hilbert::QuantumState;

/// Per-qubit-block quantities; `None` where the block is empty or its
/// phases cannot be separated, with the reason in `notes`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockMetrics {
    pub coherence: Option<f64>,
    pub separation: Option<PhaseSeparation>,
    pub cat: Option<CatAnalysis>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub negativity: Option<f64>,
    pub purity: f64,
    pub c_ee: Option<f64>,
    pub c_gg: Option<f64>,
    /// Coherence of the coherent state with the fitted `|α̂|`.
    pub c_reference: Option<f64>,
    pub s_ee: Option<f64>,
    pub s_gg: Option<f64>,
    pub s_distance_ee: Option<f64>,
    pub s_distance_gg: Option<f64>,
    pub alpha_hat: Option<Complex64>,
    pub d_squared: Option<f64>,
    /// `(w_np, w_sp)` per block `[ee, gg]`.
    pub weights: [Option<(f64, f64)>; 2],
    pub sp_vacuum_population: [Option<f64>; 2],
    pub notes: Vec<String>,
}

fn keep<T>(r: crate::error::Result<T>, label: &str, what: &str, notes: &mut Vec<String>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{label} {what}: {e}"));
            None
        }
    }
}

fn block_metrics(state: &QuantumState, k: usize, notes: &mut Vec<String>) -> BlockMetrics {
    let label = if k == 1 { "ee" } else { "gg" };
    let block = match state.qubit_block(k, k) {
        Ok(b) => b,
        Err(e) => {
            notes.push(format!("{label}: {e}"));
            return BlockMetrics { coherence: None, separation: None, cat: None };
        }
    };
    let coherence = keep(np_sp_coherence(&block), label, "coherence", notes);
    let separation = keep(separate_phases(&block), label, "separation", notes);
    let cat = match &separation {
        Some(s) if s.weights.1 > 1e-6 => {
            keep(cat_analysis(&block, Some(s.alpha_hat)), label, "cat size", notes)
        }
        Some(_) => {
            notes.push(format!("{label}: no superradiant lobes"));
            None
        }
        None => None,
    };
    BlockMetrics { coherence, separation, cat }
}

/// Every scalar characterization of a joint state.
pub fn metrics_report(state: &QuantumState) -> MetricsReport {
    let mut notes = Vec::new();
    let negativity = match negativity(state) {
        Ok(n) => Some(n),
        Err(e) => {
            notes.push(format!("negativity: {e}"));
            None
        }
    };
    let ee = block_metrics(state, 1, &mut notes);
    let gg = block_metrics(state, 0, &mut notes);
    // The amplitude of the more populated block represents the state.
    let pe = state.qubit_block(1, 1).map(|b| b.trace().re).unwrap_or(0.0);
    let main = if pe >= 0.5 { &ee } else { &gg };
    let alpha_hat = main.cat.map(|c| c.alpha_hat).or(ee.cat.or(gg.cat).map(|c| c.alpha_hat));
    MetricsReport {
        negativity,
        purity: purity(state),
        c_ee: ee.coherence,
        c_gg: gg.coherence,
        c_reference: alpha_hat.map(|a| coherent_reference_coherence(a.norm())),
        s_ee: ee.cat.map(|c| c.cat_size),
        s_gg: gg.cat.map(|c| c.cat_size),
        s_distance_ee: ee.cat.map(|c| c.cat_size_distance),
        s_distance_gg: gg.cat.map(|c| c.cat_size_distance),
        alpha_hat,
        d_squared: alpha_hat.map(|a| 4.0 * a.norm_sqr()),
        weights: [
            ee.separation.as_ref().map(|s| s.weights),
            gg.separation.as_ref().map(|s| s.weights),
        ],
        sp_vacuum_population: [
            ee.separation.as_ref().map(|s| s.sp_vacuum_population),
            gg.separation.as_ref().map(|s| s.sp_vacuum_population),
        ],
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::*;

    #[test]
    fn report_on_entangled_cat() {
        let n = 30;
        let spec = HilbertSpec::qubit(n).unwrap();
        let a = Complex64::new(2.0, 0.0);
        let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let g = product_ket(&qubit_ket(2, &[Complex64::new(1.0, 0.0)]), &coherent_ket(n, a));
        let e = product_ket(&qubit_ket(2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]), &coherent_ket(n, -a));
        let s = QuantumState::pure(spec, &((g + e) * half)).unwrap();
        let r = metrics_report(&s);
        assert!(r.negativity.unwrap() > 0.49);
        assert!((r.purity - 1.0).abs() < 1e-9);
        assert!((r.alpha_hat.unwrap().norm() - 2.0).abs() < 1e-3);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"negativity\""));
    }

    #[test]
    fn report_on_vacuum_notes_missing_lobes() {
        let spec = HilbertSpec::qubit(10).unwrap();
        let r = metrics_report(&QuantumState::basis(spec, 0, 0).unwrap());
        assert_eq!(r.negativity, Some(0.0));
        assert!(r.s_gg.is_none() && r.alpha_hat.is_none());
        assert!(!r.notes.is_empty());
    }
}
