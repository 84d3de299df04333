//! Dual entanglement of two identical particles.
//!
//! Two identical particles told apart by one variable and entangled in a
//! second are also entangled in the first when the second serves as the
//! label. This crate builds such states, performs the change of label
//! variable, measures the entanglement through CHSH tests (exactly and by
//! simulated coincidence counting), and models how partial
//! distinguishability and environmental dephasing wash the dual
//! entanglement out.

pub mod bell;
pub mod density;
pub mod dualism;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod identicity;

pub use bell::{chsh, correlation, observable, optimize_chsh, ChshOptimum, ChshSettings, MeasurementSetting, TSIRELSON};
pub use density::DensityOperator4;
pub use dualism::{
    concurrence, dual_representation, dualism_magnitude_check, is_factorizable, manifest_repair, DualityReport,
    NonManifestState, FACTORIZABLE_TOL,
};
pub use error::{Error, Result};
pub use experiment::{
    estimate_correlation, route_pbs, run_experiment, sample_outcomes, CoincidenceCounts, ExperimentConfig,
    ExperimentResult, PairStream,
};
pub use fock::{
    exchange_reorder, inner_product, to_fock, to_pseudo_label, DualPairState, FockConfiguration, FockExpansion,
    Mode, PseudoLabelVector, Statistics, VariablePair,
};
pub use identicity::{
    degraded_dual_state, smax_vs_overlap, temperature_threshold, transition_channel, OverlapParameter,
    TemperatureQuery, TransitionParams,
};
