//! Scalar characterizations of joint qubit–field states: entanglement,
//! purity, normal/superradiant coherence, phase separation and cat size.

mod coherence;
mod entanglement;
mod phase;
mod report;

pub use coherence::{coherent_reference_coherence, np_sp_coherence, order_parameter};
pub use entanglement::{fidelity, negativity, purity};
pub use phase::{
    cat_analysis, husimi, husimi_peak, separate_phases, super_cat_size, CatAnalysis,
    PhaseSeparation, ANNULUS_LIMIT,
};
pub use report::{metrics_report, BlockMetrics, MetricsReport};
