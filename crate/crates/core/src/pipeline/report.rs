use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::run::Verb;
use crate::causality::{DlmTrace, GrangerReport};
use crate::harmonic::{HarmonicFit, PhaseKind, PhaseTrajectory};
use crate::ingest::{CalendarDate, IngestReport};
use crate::memory::{AdfResult, Correlogram, HurstReport, SkewSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageState {
    Completed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageStatus {
    pub stage: String,
    pub state: StageState,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub sie: IngestReport,
    pub nao: IngestReport,
    pub alternate_days_filled: usize,
    pub sie_range: (CalendarDate, CalendarDate),
    pub nao_range: (CalendarDate, CalendarDate),
    pub sie_observed: usize,
    pub nao_observed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseArea {
    pub year: i32,
    pub kind: PhaseKind,
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DlmSummary {
    pub labels: Vec<String>,
    pub discount: f64,
    pub steps: usize,
    pub final_coefficients: Vec<f64>,
    pub final_variances: Vec<f64>,
}

impl From<&DlmTrace> for DlmSummary {
    fn from(t: &DlmTrace) -> Self {
        DlmSummary {
            labels: t.labels.clone(),
            discount: t.discount,
            steps: t.times.len(),
            final_coefficients: t.coefficient_paths.iter().map(|p| *p.last().unwrap_or(&f64::NAN)).collect(),
            final_variances: t.state_variances.iter().map(|p| *p.last().unwrap_or(&f64::NAN)).collect(),
        }
    }
}

/// Everything a run produced. The JSON form omits wall-clock timings so
/// that identical runs serialize identically.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PipelineReport {
    pub verb: Option<Verb>,
    pub seed: u64,
    pub stages: Vec<StageStatus>,
    pub ingest: Option<IngestSummary>,
    pub harmonic: Option<HarmonicFit>,
    pub phase_areas: Vec<PhaseArea>,
    pub hurst: Option<HurstReport>,
    pub adf: Option<AdfResult>,
    pub acf: Option<Correlogram>,
    pub ccf: Option<Correlogram>,
    pub skew_yearly: Option<SkewSummary>,
    pub skew_monthly: Option<SkewSummary>,
    pub granger: Vec<GrangerReport>,
    pub dlm: Option<DlmSummary>,
    /// Files written under the output directory, relative names.
    pub files: Vec<String>,
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
    #[serde(skip)]
    pub trajectories: Vec<PhaseTrajectory>,
    #[serde(skip)]
    pub dlm_trace: Option<DlmTrace>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn stage(&self, name: &str) -> Option<&StageStatus> {
        self.stages.iter().find(|s| s.stage == name)
    }

    /// Human-readable `key: value` report, timings included.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        if let Some(v) = self.verb {
            let _ = writeln!(w, "verb: {v}");
        }
        let _ = writeln!(w, "seed: {}", self.seed);
        for s in &self.stages {
            match (&s.state, &s.reason) {
                (StageState::Completed, _) => {
                    let _ = writeln!(w, "stage.{}: completed", s.stage);
                }
                (StageState::Skipped, r) => {
                    let _ = writeln!(w, "stage.{}: skipped ({})", s.stage, r.as_deref().unwrap_or(""));
                }
            }
        }
        for t in &self.timings {
            let _ = writeln!(w, "seconds.{}: {:.3}", t.stage, t.seconds);
        }
        if let Some(i) = &self.ingest {
            let _ = writeln!(w, "\n[ingest]");
            let _ = writeln!(w, "sie.range: {} .. {}", i.sie_range.0, i.sie_range.1);
            let _ = writeln!(w, "sie.rows_read: {}", i.sie.rows_read);
            let _ = writeln!(w, "sie.rows_rejected: {}", i.sie.rows_rejected);
            let _ = writeln!(w, "sie.observed: {}", i.sie_observed);
            let _ = writeln!(w, "sie.alternate_days_filled: {}", i.alternate_days_filled);
            let _ = writeln!(w, "nao.range: {} .. {}", i.nao_range.0, i.nao_range.1);
            let _ = writeln!(w, "nao.rows_read: {}", i.nao.rows_read);
            let _ = writeln!(w, "nao.rows_rejected: {}", i.nao.rows_rejected);
            let _ = writeln!(w, "nao.observed: {}", i.nao_observed);
        }
        if let Some(f) = &self.harmonic {
            let _ = writeln!(w, "\n[harmonic]");
            let _ = writeln!(w, "periods: {:?}", f.spec.periods);
            let _ = writeln!(w, "harmonics: {}", f.spec.harmonics);
            let _ = writeln!(w, "trend: {:.6} {:.6e} {:.6e}", f.trend[0], f.trend[1], f.trend[2]);
            let _ = writeln!(w, "sigma2: {:.6e}", f.sigma2);
            let _ = writeln!(w, "seasonal_range: {:.6}", f.seasonal_range());
            for a in &self.phase_areas {
                let _ = writeln!(w, "area.{}.{}: {:.6e}", a.year, a.kind, a.area);
            }
        }
        if let Some(h) = &self.hurst {
            let _ = writeln!(w, "\n[memory]");
            let _ = writeln!(w, "hurst.simple_rs: {:.4}", h.simple_rs);
            let _ = writeln!(w, "hurst.corrected_rs: {:.4}", h.corrected_rs);
            let _ = writeln!(w, "hurst.empirical: {:.4}", h.empirical);
            let _ = writeln!(w, "hurst.corrected_empirical: {:.4}", h.corrected_empirical);
            let _ = writeln!(w, "hurst.theoretical: {:.4}", h.theoretical);
            let _ = writeln!(w, "hurst.n: {}", h.n);
        }
        if let Some(a) = &self.adf {
            let _ = writeln!(w, "adf.statistic: {:.4}", a.statistic);
            let _ = writeln!(w, "adf.lag_order: {}", a.lag_order);
            let _ = writeln!(w, "adf.p_bracket: {} .. {}", a.p_value_bracket.0, a.p_value_bracket.1);
            let _ = writeln!(w, "adf.reject_unit_root_5pct: {}", a.reject_unit_root_5pct);
        }
        if let Some(c) = &self.ccf {
            let peak = c.points.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
            let _ = writeln!(w, "ccf.max_abs: {peak:.4}");
            let _ = writeln!(w, "ccf.band: {:.4}", c.band);
        }
        for (name, s) in [("yearly", &self.skew_yearly), ("monthly", &self.skew_monthly)] {
            if let Some(s) = s {
                let _ = writeln!(w, "skew.{name}.buckets: {}", s.buckets.len());
                let _ = writeln!(w, "skew.{name}.median_above_mean: {}", s.median_above_mean);
                let _ = writeln!(w, "skew.{name}.skipped: {}", s.notes.len());
            }
        }
        for g in &self.granger {
            let _ = writeln!(w, "\n[granger]");
            w.push_str(&g.to_text());
        }
        if let Some(d) = &self.dlm {
            let _ = writeln!(w, "\n[dlm]");
            let _ = writeln!(w, "discount: {}", d.discount);
            let _ = writeln!(w, "steps: {}", d.steps);
            for (l, b) in d.labels.iter().zip(&d.final_coefficients) {
                let _ = writeln!(w, "final.{l}: {b:.6e}");
            }
        }
        if !self.files.is_empty() {
            let _ = writeln!(w, "\n[files]");
            for f in &self.files {
                let _ = writeln!(w, "{f}");
            }
        }
        out
    }
}
