//! Granger causality between daily series and time-varying regression.

mod bootstrap;
mod design;
mod dlm;
mod granger;

pub use bootstrap::{block_resample, replicate_seed, BootstrapConfig, DEFAULT_BLOCK_LEN, MIN_REPS};
pub use design::{build_lag_design, LagDesign, OWN_NAME};
pub use dlm::{dlm_filter, dlm_regression, DlmTrace, DEFAULT_DISCOUNT};
pub use granger::{
    granger_test, run_hypothesis, DerivativeSource, FitSummary, GrangerReport, Hypothesis,
    HypothesisConfig, LambdaGrid, Selection, ALIAS_TOLERANCE,
};
