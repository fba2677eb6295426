use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::{block_resample, replicate_seed, BootstrapConfig};
use super::design::{build_lag_design, LagDesign};
use crate::error::{Error, Result};
use crate::harmonic::{derivative_series, raw_derivative_series, HarmonicFit};
use crate::ingest::{align, DailySeries};
use crate::regress::{
    f_test_nested, independent_columns, lambda_grid, lasso_path_cv, ols, DesignMatrix, FTestResult,
    OlsFit,
};

/// A column keeps its place only if more than this fraction of its norm lies
/// outside the span of the columns before it.
pub const ALIAS_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaGrid {
    /// Geometric grid from the smallest penalty that zeroes every column.
    Auto { count: usize, min_ratio: f64 },
    Fixed { values: Vec<f64> },
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid::Auto { count: 50, min_ratio: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    None,
    /// Keep only the cross lags a cross-validated LASSO leaves active.
    Lasso { folds: usize, grid: LambdaGrid },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub n: usize,
    pub p: usize,
    pub rss: f64,
    pub sigma2: f64,
}

impl From<&OlsFit> for FitSummary {
    fn from(f: &OlsFit) -> Self {
        FitSummary { n: f.n, p: f.p, rss: f.rss, sigma2: f.sigma2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrangerReport {
    pub hypothesis: Option<u8>,
    pub k: usize,
    pub rows: usize,
    /// Cross-lag labels in the alternative model.
    pub selected_lags: Vec<String>,
    /// Lags removed because they were linear combinations of earlier columns.
    pub aliased_lags: Vec<String>,
    pub lambda: Option<f64>,
    /// Analytic F test; its p-value ignores the selection step.
    pub f: FTestResult,
    pub bootstrap_p: f64,
    pub bootstrap_reps: usize,
    pub block_len: usize,
    pub seed: u64,
    pub null_fit: FitSummary,
    pub alt_fit: FitSummary,
    pub notes: Vec<String>,
}

impl GrangerReport {
    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v);
            out.push('\n');
        };
        if let Some(h) = self.hypothesis {
            line("hypothesis", h.to_string());
        }
        line("k", self.k.to_string());
        line("rows", self.rows.to_string());
        line("lambda", self.lambda.map_or("none".into(), |l| format!("{l:.6e}")));
        line("selected_lags", self.selected_lags.len().to_string());
        line("selected", self.selected_lags.join(" "));
        line("aliased_lags", self.aliased_lags.join(" "));
        line("f_stat", format!("{:.6}", self.f.f_stat));
        line("df", format!("{} {}", self.f.df_num, self.f.df_den));
        line("analytic_p", format!("{:.6e}", self.f.p_value));
        line("bootstrap_p", format!("{:.6}", self.bootstrap_p));
        line("bootstrap_reps", self.bootstrap_reps.to_string());
        line("block_len", self.block_len.to_string());
        line("seed", self.seed.to_string());
        line("null_rss", format!("{:.6e}", self.null_fit.rss));
        line("alt_rss", format!("{:.6e}", self.alt_fit.rss));
        for n in &self.notes {
            line("note", n.clone());
        }
        out
    }
}

struct Statistic {
    f: FTestResult,
    lambda: Option<f64>,
    /// Alternative design: intercept, own lags, selected cross lags.
    design: DesignMatrix,
    kept_null: Vec<usize>,
    kept_cross: Vec<usize>,
    aliased: Vec<usize>,
    null: OlsFit,
    alt: OlsFit,
}

fn statistic(d: &LagDesign, selection: &Selection) -> Result<Statistic> {
    let k = d.k;
    let ncross = d.cross_lags.ncols();
    let (lambda, selected): (Option<f64>, Vec<usize>) = match selection {
        Selection::None => (None, (0..ncross).collect()),
        Selection::Lasso { folds, grid } => {
            let x = d.own_lags.hstack(&d.cross_lags)?;
            let grid = match grid {
                LambdaGrid::Auto { count, min_ratio } => lambda_grid(&x, &d.response, *count, *min_ratio)?,
                LambdaGrid::Fixed { values } => values.clone(),
            };
            let (lambda, fit) = lasso_path_cv(&x, &d.response, *folds, &grid)?;
            let sel = fit.active_set.iter().filter(|&&j| j >= k).map(|&j| j - k).collect();
            (Some(lambda), sel)
        }
    };

    let design = d.own_lags.with_intercept().hstack(&d.cross_lags.select(&selected))?;
    let order: Vec<usize> = (0..design.ncols()).collect();
    let kept = independent_columns(&design, &order, ALIAS_TOLERANCE);
    let kept_null: Vec<usize> = kept.iter().copied().filter(|&j| j <= k).collect();
    let kept_cross: Vec<usize> = kept.iter().copied().filter(|&j| j > k).collect();
    let aliased: Vec<usize> = order.iter().copied().filter(|j| !kept.contains(j)).collect();

    let m = d.nrows();
    let null = ols(&design.select(&kept_null), &d.response)?;
    let (alt, f) = if kept_cross.is_empty() {
        let f = FTestResult { f_stat: 0.0, df_num: 0, df_den: m - null.p, p_value: 1.0 };
        (null.clone(), f)
    } else {
        let alt = ols(&design.select(&kept), &d.response)?;
        let f = f_test_nested(&null, &alt, m)?;
        (alt, f)
    };
    Ok(Statistic { f, lambda, design, kept_null, kept_cross, aliased, null, alt })
}

/// Response regenerated from the null fit over the design rows with the
/// given innovations; days that are not rows keep their observed values.
fn regenerate(d: &LagDesign, null: &OlsFit, kept_null: &[usize], innovations: &[f64]) -> Vec<f64> {
    let mut y = d.response_series.clone();
    for (r, &t) in d.rows.iter().enumerate() {
        let mut v = innovations[r];
        for (b, &j) in null.coefficients.iter().zip(kept_null) {
            v += if j == 0 { *b } else { b * y[t - j] };
        }
        y[t] = v;
    }
    y
}

/// Nested F test of own lags against own plus cross lags, with a
/// moving-block residual bootstrap that repeats selection in every replicate.
pub fn granger_test(d: &LagDesign, selection: &Selection, bootstrap: &BootstrapConfig) -> Result<GrangerReport> {
    bootstrap.validate()?;
    if d.cross_lags.ncols() == 0 {
        return Err(Error::Contract("design has no cross lags to test".into()));
    }
    let obs = statistic(d, selection)?;
    let labels = obs.design.labels();
    let mut notes = Vec::new();

    let bootstrap_p = if obs.kept_cross.is_empty() {
        notes.push("no cross lags selected; F = 0 and p = 1 without resampling".into());
        1.0
    } else {
        let residuals = &obs.null.residuals;
        let exceed: Vec<bool> = (0..bootstrap.reps)
            .into_par_iter()
            .map(|r| -> Result<bool> {
                let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(bootstrap.seed, r));
                let e = block_resample(residuals, bootstrap.block_len, &mut rng);
                let y = regenerate(d, &obs.null, &obs.kept_null, &e);
                if y.iter().any(|v| v.is_infinite()) {
                    return Err(Error::Diagnostic(format!("bootstrap replicate {r} diverged")));
                }
                let stat = statistic(&d.with_response_series(&y)?, selection)?;
                Ok(stat.f.f_stat >= obs.f.f_stat)
            })
            .collect::<Result<_>>()?;
        let count = exceed.iter().filter(|&&b| b).count();
        (1 + count) as f64 / (1 + bootstrap.reps) as f64
    };
    if !obs.aliased.is_empty() {
        notes.push(format!("{} aliased columns removed", obs.aliased.len()));
    }

    Ok(GrangerReport {
        hypothesis: None,
        k: d.k,
        rows: d.nrows(),
        selected_lags: obs.kept_cross.iter().map(|&j| labels[j].clone()).collect(),
        aliased_lags: obs.aliased.iter().map(|&j| labels[j].clone()).collect(),
        lambda: obs.lambda,
        f: obs.f,
        bootstrap_p,
        bootstrap_reps: bootstrap.reps,
        block_len: bootstrap.block_len,
        seed: bootstrap.seed,
        null_fit: FitSummary::from(&obs.null),
        alt_fit: FitSummary::from(&obs.alt),
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// SIE velocity and acceleration lags explain NAO.
    SieDynamicsToNao,
    /// NAO lags explain SIE velocity.
    NaoToVelocity,
    /// NAO lags explain SIE acceleration.
    NaoToAcceleration,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 3] =
        [Hypothesis::SieDynamicsToNao, Hypothesis::NaoToVelocity, Hypothesis::NaoToAcceleration];

    pub fn number(self) -> u8 {
        match self {
            Hypothesis::SieDynamicsToNao => 1,
            Hypothesis::NaoToVelocity => 2,
            Hypothesis::NaoToAcceleration => 3,
        }
    }

    pub fn from_number(h: u8) -> Result<Self> {
        Hypothesis::ALL
            .into_iter()
            .find(|x| x.number() == h)
            .ok_or_else(|| Error::Contract(format!("hypothesis must be 1, 2 or 3, got {h}")))
    }
}

/// Where SIE velocity and acceleration come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    /// Analytic derivatives of the fitted harmonic model.
    Model,
    /// Central differences of the observed series.
    Raw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConfig {
    pub k: usize,
    pub selection: Selection,
    pub bootstrap: BootstrapConfig,
    pub derivatives: DerivativeSource,
}

impl Hypothesis {
    /// Lag design with this hypothesis' roles: response and cross series
    /// restricted to the days both NAO and the derivatives cover.
    pub fn design(
        self,
        nao: &DailySeries,
        sie: &DailySeries,
        fit: &HarmonicFit,
        k: usize,
        derivatives: DerivativeSource,
    ) -> Result<LagDesign> {
        let (vel, acc) = match derivatives {
            DerivativeSource::Model => {
                let from = nao.start().max(fit.t0);
                let to = nao.end().min(fit.t_end);
                if from > to {
                    return Err(Error::Range("NAO does not overlap the fitted SIE range".into()));
                }
                derivative_series(fit, from, to)?
            }
            DerivativeSource::Raw => raw_derivative_series(sie)?,
        };
        let from = nao.start().max(vel.start());
        let to = nao.end().min(vel.end());
        let (nao, vel) = align(nao, &vel, from, to)?;
        let (_, acc) = align(&nao, &acc, from, to)?;
        match self {
            Hypothesis::SieDynamicsToNao => build_lag_design(&nao, &[("x'", &vel), ("x''", &acc)], k),
            Hypothesis::NaoToVelocity => build_lag_design(&vel, &[("NAO", &nao)], k),
            Hypothesis::NaoToAcceleration => build_lag_design(&acc, &[("NAO", &nao)], k),
        }
    }
}

/// Run one of the three NAO/SIE hypotheses.
pub fn run_hypothesis(
    h: Hypothesis,
    nao: &DailySeries,
    sie: &DailySeries,
    fit: &HarmonicFit,
    cfg: &HypothesisConfig,
) -> Result<GrangerReport> {
    cfg.bootstrap.validate()?;
    let d = h.design(nao, sie, fit, cfg.k, cfg.derivatives)?;
    let mut report = granger_test(&d, &cfg.selection, &cfg.bootstrap)?;
    report.hypothesis = Some(h.number());
    Ok(report)
}
