//! End-to-end runs: ingest, harmonic fit, diagnostics, causality tests,
//! reports and plot files.

mod config;
mod plots;
mod report;
mod run;

pub use config::PipelineConfig;
pub use plots::{emit_plots, render_svg};
pub use report::{DlmSummary, IngestSummary, PhaseArea, PipelineReport, StageState, StageStatus, StageTiming};
pub use run::{run_pipeline, Verb, REPORT_JSON, REPORT_TEXT};
