use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seaice_core::causality::DerivativeSource;
use seaice_core::ingest::CalendarDate;
use seaice_core::pipeline::{run_pipeline, PipelineConfig, Verb};

/// Sea ice extent and NAO analysis pipeline.
#[derive(Parser, Debug)]
#[command(name = "seaice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse both inputs and report what was read.
    Ingest(RunArgs),
    /// Ingest, then fit the harmonic model and trace phase loops.
    Fit(RunArgs),
    /// Fit, then Hurst, ADF, correlograms and skew summaries.
    Diagnose(RunArgs),
    /// Fit, then the three Granger tests and the coefficient filter.
    Granger(RunArgs),
    /// Every stage.
    All(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    Model,
    Raw,
}

impl From<Source> for DerivativeSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Model => DerivativeSource::Model,
            Source::Raw => DerivativeSource::Raw,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML file of `key = value` settings; flags override it.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    sie: Option<PathBuf>,
    #[arg(long)]
    nao: Option<PathBuf>,
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    start: Option<CalendarDate>,
    #[arg(long)]
    end: Option<CalendarDate>,
    /// Keep single missing days of the alternate-day era masked.
    #[arg(long)]
    no_fill: bool,
    /// Seasonal periods in days, comma separated.
    #[arg(long, value_delimiter = ',')]
    periods: Option<Vec<f64>>,
    #[arg(long)]
    harmonics: Option<usize>,
    /// Phase-plane years, comma separated.
    #[arg(long, value_delimiter = ',')]
    phase_years: Option<Vec<i32>>,
    #[arg(long)]
    acf_max_lag: Option<usize>,
    #[arg(long)]
    ccf_max_lag: Option<usize>,
    #[arg(long)]
    adf_max_lag: Option<usize>,
    #[arg(long)]
    k_h1: Option<usize>,
    #[arg(long)]
    k_h2: Option<usize>,
    #[arg(long)]
    k_h3: Option<usize>,
    #[arg(long, value_enum)]
    derivatives_h1: Option<Source>,
    #[arg(long, value_enum)]
    derivatives_h23: Option<Source>,
    /// Test every cross lag instead of the LASSO-selected ones.
    #[arg(long)]
    no_lasso: bool,
    #[arg(long)]
    lasso_folds: Option<usize>,
    #[arg(long)]
    lambda_count: Option<usize>,
    #[arg(long)]
    lambda_min_ratio: Option<f64>,
    /// Explicit descending penalty grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda_values: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    block_len: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dlm_lags: Option<usize>,
    #[arg(long)]
    discount: Option<f64>,
}

macro_rules! set {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $(if let Some(v) = $args.$field { $cfg.$field = v.into(); })*
    };
}

impl RunArgs {
    fn into_config(self) -> seaice_core::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        let a = self;
        if let Some(p) = a.sie {
            cfg.sie_path = p;
        }
        if let Some(p) = a.nao {
            cfg.nao_path = p;
        }
        if a.start.is_some() {
            cfg.start = a.start;
        }
        if a.end.is_some() {
            cfg.end = a.end;
        }
        if a.seed.is_some() {
            cfg.seed = a.seed;
        }
        if a.no_fill {
            cfg.fill_alternate_days = false;
        }
        if a.no_lasso {
            cfg.lasso = false;
        }
        set!(cfg, a, output_dir, periods, harmonics, phase_years, acf_max_lag, ccf_max_lag, adf_max_lag);
        set!(cfg, a, k_h1, k_h2, k_h3, derivatives_h1, derivatives_h23, lasso_folds, lambda_count);
        set!(cfg, a, lambda_min_ratio, lambda_values, reps, block_len, dlm_lags, discount);
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, args) = match cli.command {
        Command::Ingest(a) => (Verb::Ingest, a),
        Command::Fit(a) => (Verb::Fit, a),
        Command::Diagnose(a) => (Verb::Diagnose, a),
        Command::Granger(a) => (Verb::Granger, a),
        Command::All(a) => (Verb::All, a),
    };
    let result = args.into_config().and_then(|cfg| run_pipeline(&cfg, verb));
    match result {
        Ok(report) => {
            print!("{}", report.to_text());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
