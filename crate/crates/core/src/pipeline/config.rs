use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::causality::{
    BootstrapConfig, DerivativeSource, HypothesisConfig, LambdaGrid, Selection, DEFAULT_BLOCK_LEN,
    DEFAULT_DISCOUNT, MIN_REPS,
};
use crate::error::{Error, Result};
use crate::harmonic::{HarmonicSpec, TROPICAL_YEAR};
use crate::ingest::CalendarDate;

/// Every tunable of a pipeline run. Read from a flat `key = value` TOML
/// file; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sie_path: PathBuf,
    pub nao_path: PathBuf,
    pub output_dir: PathBuf,
    pub start: Option<CalendarDate>,
    pub end: Option<CalendarDate>,
    /// Interpolate the single missing days of the alternate-day era.
    pub fill_alternate_days: bool,

    pub periods: Vec<f64>,
    pub harmonics: usize,
    /// Years whose phase-plane loops are traced. Empty: first and last full years.
    pub phase_years: Vec<i32>,

    pub acf_max_lag: usize,
    pub ccf_max_lag: usize,
    pub adf_max_lag: usize,

    pub k_h1: usize,
    pub k_h2: usize,
    pub k_h3: usize,
    pub derivatives_h1: DerivativeSource,
    pub derivatives_h23: DerivativeSource,
    pub lasso: bool,
    pub lasso_folds: usize,
    pub lambda_count: usize,
    pub lambda_min_ratio: f64,
    /// Explicit descending grid; overrides `lambda_count`/`lambda_min_ratio`.
    pub lambda_values: Vec<f64>,
    pub reps: usize,
    pub block_len: usize,
    /// Required: there is no implicit seed.
    pub seed: Option<u64>,

    pub dlm_lags: usize,
    pub discount: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sie_path: PathBuf::new(),
            nao_path: PathBuf::new(),
            output_dir: PathBuf::from("out"),
            start: None,
            end: None,
            fill_alternate_days: true,
            periods: vec![TROPICAL_YEAR],
            harmonics: 4,
            phase_years: Vec::new(),
            acf_max_lag: 365,
            ccf_max_lag: 365,
            adf_max_lag: 30,
            k_h1: 365,
            k_h2: 30,
            k_h3: 30,
            derivatives_h1: DerivativeSource::Model,
            derivatives_h23: DerivativeSource::Raw,
            lasso: true,
            lasso_folds: 5,
            lambda_count: 50,
            lambda_min_ratio: 1e-3,
            lambda_values: Vec::new(),
            reps: MIN_REPS,
            block_len: DEFAULT_BLOCK_LEN,
            seed: None,
            dlm_lags: 1,
            discount: DEFAULT_DISCOUNT,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parse a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            for p in [&mut cfg.sie_path, &mut cfg.nao_path, &mut cfg.output_dir] {
                if !p.as_os_str().is_empty() && p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.sie_path.as_os_str().is_empty() || self.nao_path.as_os_str().is_empty() {
            return Err(Error::Config("sie_path and nao_path must be set".into()));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::Config("output_dir must be set".into()));
        }
        if self.seed.is_none() {
            return Err(Error::Config("seed must be set explicitly".into()));
        }
        if let (Some(a), Some(b)) = (self.start, self.end) {
            if a > b {
                return Err(Error::Config(format!("start {a} is after end {b}")));
            }
        }
        let counts = [
            ("harmonics", self.harmonics),
            ("acf_max_lag", self.acf_max_lag),
            ("ccf_max_lag", self.ccf_max_lag),
            ("k_h1", self.k_h1),
            ("k_h2", self.k_h2),
            ("k_h3", self.k_h3),
            ("lasso_folds", self.lasso_folds),
            ("lambda_count", self.lambda_count),
            ("reps", self.reps),
            ("block_len", self.block_len),
            ("dlm_lags", self.dlm_lags),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        self.harmonic_spec()?;
        Ok(())
    }

    pub fn harmonic_spec(&self) -> Result<HarmonicSpec> {
        HarmonicSpec::new(self.periods.clone(), self.harmonics)
    }

    pub fn selection(&self) -> Selection {
        if !self.lasso {
            return Selection::None;
        }
        let grid = if self.lambda_values.is_empty() {
            LambdaGrid::Auto { count: self.lambda_count, min_ratio: self.lambda_min_ratio }
        } else {
            LambdaGrid::Fixed { values: self.lambda_values.clone() }
        };
        Selection::Lasso { folds: self.lasso_folds, grid }
    }

    /// Bootstrap settings; the replicate floor is checked downstream.
    pub fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig { reps: self.reps, block_len: self.block_len, seed: self.seed.unwrap_or_default() }
    }

    pub fn hypothesis(&self, h: u8) -> HypothesisConfig {
        let (k, derivatives) = match h {
            1 => (self.k_h1, self.derivatives_h1),
            2 => (self.k_h2, self.derivatives_h23),
            _ => (self.k_h3, self.derivatives_h23),
        };
        HypothesisConfig { k, selection: self.selection(), bootstrap: self.bootstrap(), derivatives }
    }
}
