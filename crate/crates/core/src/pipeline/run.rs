use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::plots::{write_plots, OutputWriter};
use super::report::{DlmSummary, IngestSummary, PhaseArea, PipelineReport, StageState, StageStatus, StageTiming};
use crate::causality::{dlm_filter, run_hypothesis, DerivativeSource, Hypothesis};
use crate::error::{Error, Result};
use crate::harmonic::{
    derivative_series, fit_harmonic, fit_year, phase_trajectory, raw_derivative_series, HarmonicFit, PhaseKind,
};
use crate::ingest::{
    align, alternate_day_era_end, fill_alternate_days, parse_nao, parse_sie, CalendarDate, DailySeries,
};
use crate::memory::{acf, adf_test, ccf, hurst, skew_summary, Bucketing};

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TEXT: &str = "report.txt";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    Ingest,
    Fit,
    Diagnose,
    Granger,
    All,
}

impl Verb {
    fn runs(self, stage: &str) -> bool {
        match stage {
            "ingest" => true,
            "fit" => self != Verb::Ingest,
            "diagnose" => matches!(self, Verb::Diagnose | Verb::All),
            "granger" => matches!(self, Verb::Granger | Verb::All),
            _ => false,
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verb::Ingest => "ingest",
            Verb::Fit => "fit",
            Verb::Diagnose => "diagnose",
            Verb::Granger => "granger",
            Verb::All => "all",
        })
    }
}

impl FromStr for Verb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ingest" => Verb::Ingest,
            "fit" => Verb::Fit,
            "diagnose" => Verb::Diagnose,
            "granger" => Verb::Granger,
            "all" => Verb::All,
            other => return Err(Error::Config(format!("unknown verb `{other}`"))),
        })
    }
}

const STAGES: [&str; 4] = ["ingest", "fit", "diagnose", "granger"];

/// Restrict `s` to `[from, to]`, clamped to the series' own range.
fn clip(s: &DailySeries, from: Option<CalendarDate>, to: Option<CalendarDate>) -> Result<DailySeries> {
    let from = from.map_or(s.start(), |d| d.max(s.start()));
    let to = to.map_or(s.end(), |d| d.min(s.end()));
    if from > to {
        return Err(Error::Range(format!("no data between the configured dates ({} .. {})", s.start(), s.end())));
    }
    Ok(align(s, s, from, to)?.0)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn full_years(s: &DailySeries) -> Vec<i32> {
    let first = if s.start().month() == 1 && s.start().day() == 1 { s.start().year() } else { s.start().year() + 1 };
    let last = if s.end().month() == 12 && s.end().day() == 31 { s.end().year() } else { s.end().year() - 1 };
    match first.cmp(&last) {
        std::cmp::Ordering::Less => vec![first, last],
        std::cmp::Ordering::Equal => vec![first],
        std::cmp::Ordering::Greater => Vec::new(),
    }
}

fn velocity(sie: &DailySeries, fit: &HarmonicFit, source: DerivativeSource) -> Result<DailySeries> {
    match source {
        DerivativeSource::Model => Ok(derivative_series(fit, fit.t0, fit.t_end)?.0),
        DerivativeSource::Raw => Ok(raw_derivative_series(sie)?.0),
    }
}

struct Inputs {
    sie: DailySeries,
    nao: DailySeries,
}

fn ingest_stage(cfg: &PipelineConfig, report: &mut PipelineReport) -> Result<Inputs> {
    let (sie, sie_report) = parse_sie(&read(&cfg.sie_path)?)?;
    let (nao, nao_report) = parse_nao(&read(&cfg.nao_path)?)?;
    let (sie, filled) = if cfg.fill_alternate_days {
        let (s, r) = fill_alternate_days(&sie, alternate_day_era_end());
        (s, r.gaps_filled)
    } else {
        (sie, 0)
    };
    let sie = clip(&sie, cfg.start, cfg.end)?;
    let nao = clip(&nao, cfg.start, cfg.end)?;
    report.ingest = Some(IngestSummary {
        sie: sie_report,
        nao: nao_report,
        alternate_days_filled: filled,
        sie_range: (sie.start(), sie.end()),
        nao_range: (nao.start(), nao.end()),
        sie_observed: sie.observed_count(),
        nao_observed: nao.observed_count(),
    });
    Ok(Inputs { sie, nao })
}

fn fit_stage(cfg: &PipelineConfig, inputs: &Inputs, report: &mut PipelineReport) -> Result<HarmonicFit> {
    let spec = cfg.harmonic_spec()?;
    let fit = fit_harmonic(&inputs.sie, &spec)?;
    let years = if cfg.phase_years.is_empty() { full_years(&inputs.sie) } else { cfg.phase_years.clone() };
    for year in years {
        let yearly = fit_year(&inputs.sie, &spec, year)?;
        for kind in [PhaseKind::PositionVelocity, PhaseKind::VelocityAcceleration] {
            let tr = phase_trajectory(&yearly, year, kind)?;
            report.phase_areas.push(PhaseArea { year, kind, area: tr.area });
            report.trajectories.push(tr);
        }
    }
    report.harmonic = Some(fit.clone());
    Ok(fit)
}

fn diagnose_stage(cfg: &PipelineConfig, inputs: &Inputs, fit: &HarmonicFit, report: &mut PipelineReport) -> Result<()> {
    let nao = &inputs.nao;
    report.hurst = Some(hurst(nao)?);
    report.adf = Some(adf_test(nao, cfg.adf_max_lag)?);
    report.acf = Some(acf(nao, cfg.acf_max_lag)?);
    let vel = velocity(&inputs.sie, fit, cfg.derivatives_h23)?;
    let from = nao.start().max(vel.start());
    let to = nao.end().min(vel.end());
    let (a, b) = align(nao, &vel, from, to)?;
    report.ccf = Some(ccf(&a, &b, cfg.ccf_max_lag)?);
    report.skew_yearly = Some(skew_summary(nao, Bucketing::Yearly)?);
    report.skew_monthly = Some(skew_summary(nao, Bucketing::Monthly)?);
    Ok(())
}

fn granger_stage(cfg: &PipelineConfig, inputs: &Inputs, fit: &HarmonicFit, report: &mut PipelineReport) -> Result<()> {
    for h in Hypothesis::ALL {
        let r = run_hypothesis(h, &inputs.nao, &inputs.sie, fit, &cfg.hypothesis(h.number()))?;
        report.granger.push(r);
    }
    let d = Hypothesis::SieDynamicsToNao.design(&inputs.nao, &inputs.sie, fit, cfg.dlm_lags, cfg.derivatives_h1)?;
    let trace = dlm_filter(&d, cfg.discount)?;
    report.dlm = Some(DlmSummary::from(&trace));
    report.dlm_trace = Some(trace);
    Ok(())
}

fn timed<T>(report: &mut PipelineReport, stage: &'static str, f: impl FnOnce(&mut PipelineReport) -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f(report).map_err(|e| e.in_stage(stage))?;
    report.timings.push(StageTiming { stage: stage.into(), seconds: t.elapsed().as_secs_f64() });
    report.stages.push(StageStatus { stage: stage.into(), state: StageState::Completed, reason: None });
    Ok(out)
}

/// Run the stages `verb` asks for, then write `report.json`, `report.txt`
/// and the plot files under `output_dir`. Nothing is left behind on error.
pub fn run_pipeline(cfg: &PipelineConfig, verb: Verb) -> Result<PipelineReport> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let mut report = PipelineReport { verb: Some(verb), seed: cfg.seed.unwrap_or_default(), ..Default::default() };

    let inputs = timed(&mut report, "ingest", |r| ingest_stage(cfg, r))?;
    let fit = if verb.runs("fit") { Some(timed(&mut report, "fit", |r| fit_stage(cfg, &inputs, r))?) } else { None };
    if let Some(fit) = &fit {
        if verb.runs("diagnose") {
            timed(&mut report, "diagnose", |r| diagnose_stage(cfg, &inputs, fit, r))?;
        }
        if verb.runs("granger") {
            timed(&mut report, "granger", |r| granger_stage(cfg, &inputs, fit, r))?;
        }
    }
    for stage in STAGES {
        if report.stage(stage).is_none() {
            report.stages.push(StageStatus {
                stage: stage.into(),
                state: StageState::Skipped,
                reason: Some(format!("not requested by verb `{verb}`")),
            });
        }
    }

    let mut w = OutputWriter::new(&cfg.output_dir).map_err(|e| e.in_stage("output"))?;
    let written = (|| -> Result<()> {
        write_plots(&report, &mut w)?;
        let mut files: Vec<String> = w
            .written()
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        files.push(REPORT_JSON.into());
        files.push(REPORT_TEXT.into());
        report.files = files;
        w.write(REPORT_JSON, &report.to_json())?;
        w.write(REPORT_TEXT, &report.to_text())?;
        Ok(())
    })();
    if let Err(e) = written {
        w.rollback();
        return Err(e.in_stage("output"));
    }
    Ok(report)
}
