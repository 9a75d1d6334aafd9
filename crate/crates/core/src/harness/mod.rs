//! Monte Carlo error curves, exact mutual-information oracles, lemma checks
//! and the flat experiment config.

mod config;
mod lemmas;
mod oracles;
mod scenario;

pub use config::{ExperimentConfig, ModelName, ModelSpec};
pub use lemmas::{
    concentration_frequency, min_distance_of, separation_check, verify_lemmas, CheckItem, LemmaBundle, LemmaReport,
};
pub use oracles::{
    empirical_mi_noiseless_std, empirical_mi_onebit, noiseless_mi_for_members, onebit_mi_for_members, MiEstimate,
    MAX_EXACT_DESIGN_BITS, MAX_ONEBIT_SAMPLES, MAX_ORACLE_MEMBERS,
};
pub use scenario::{
    analytic_columns, estimate_error_probability, phase_curve, worker_count, CurveRow, CurveTable, ErrorEstimate,
    Scenario, Setting, CSV_HEADER, DEFAULT_F3_EPS, DEFAULT_TRIALS, MIN_TRIALS,
};
