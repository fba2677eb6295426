mod common;

use std::path::PathBuf;

use common::*;
use seaice_core::causality::{
    run_hypothesis, BootstrapConfig, DerivativeSource, Hypothesis, HypothesisConfig, LambdaGrid, Selection,
};
use seaice_core::harmonic::{fit_harmonic, HarmonicSpec};
use seaice_core::ingest::{parse_sie, DailySeries, Units};

fn fixture_sie() -> DailySeries {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/sie_synthetic.csv");
    parse_sie(&std::fs::read_to_string(path).unwrap()).unwrap().0
}

#[test]
fn independent_nao_is_not_significant_for_velocity() {
    let sie = fixture_sie();
    let fit = fit_harmonic(&sie, &HarmonicSpec::default()).unwrap();
    let (mut analytic, mut boot) = (0, 0);
    for seed in 0..100u64 {
        let mut r = rng(30_000 + seed);
        let nao = DailySeries::from_values(sie.start(), ar1(0.6, sie.len(), &mut r), Units::Index).unwrap();
        let cfg = HypothesisConfig {
            k: 10,
            selection: Selection::Lasso { folds: 5, grid: LambdaGrid::default() },
            bootstrap: BootstrapConfig::new(199, 30, seed).unwrap(),
            derivatives: DerivativeSource::Raw,
        };
        let g = run_hypothesis(Hypothesis::NaoToVelocity, &nao, &sie, &fit, &cfg).unwrap();
        analytic += usize::from(g.f.p_value >= 0.01);
        boot += usize::from(g.bootstrap_p >= 0.01);
    }
    assert!(analytic >= 95 && boot >= 95, "analytic {analytic}/100, bootstrap {boot}/100");
}
