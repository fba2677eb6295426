//! Rescaled-range (R/S) family of Hurst exponent estimators.
//!
//! For a block size `s` the series is cut into `⌊n/s⌋` non-overlapping
//! blocks; each block's range of cumulative deviations from its mean is
//! divided by its (population) standard deviation and the ratios are
//! averaged. Every estimator is a least-squares slope on log2–log2 points:
//!
//! | estimate              | block sizes                      | ordinate                                  |
//! |-----------------------|----------------------------------|-------------------------------------------|
//! | `simple_rs`           | 8, 16, 32, … ≤ n/2               | R/S                                       |
//! | `corrected_rs`        | same                             | 0.5 + slope(R/S) − slope(E_AL)            |
//! | `empirical`           | 50 × 1.25^k ≤ n/2 (rounded)      | R/S                                       |
//! | `corrected_empirical` | same                             | R/S − E_ALP + √(πs/2)                     |
//! | `theoretical`         | same                             | E_ALP                                     |
//!
//! `E_AL` is the Anis–Lloyd expected R/S of an independent Gaussian sequence
//! and `E_ALP` adds Peters' `(s − ½)/s` factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::ingest::DailySeries;

const MIN_LENGTH: usize = 256;
const DYADIC_START: usize = 8;
const DENSE_START: f64 = 50.0;
const DENSE_FACTOR: f64 = 1.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurstReport {
    pub simple_rs: f64,
    pub corrected_rs: f64,
    pub empirical: f64,
    pub corrected_empirical: f64,
    pub theoretical: f64,
    /// Length of the contiguous stretch the estimates came from.
    pub n: usize,
    /// Names of estimates that fell outside `(0, 1.5)`.
    pub unreliable: Vec<String>,
}

/// Mean R/S over the non-overlapping blocks of length `size`; blocks with
/// zero spread are skipped. `None` when no block qualifies.
pub fn rescaled_range(x: &[f64], size: usize) -> Option<f64> {
    if size < 2 || size > x.len() {
        return None;
    }
    let (mut total, mut count) = (0.0, 0usize);
    for block in x.chunks_exact(size) {
        let mean = block.iter().sum::<f64>() / size as f64;
        let (mut cum, mut lo, mut hi, mut ss) = (0.0f64, 0.0f64, 0.0f64, 0.0);
        for v in block {
            let d = v - mean;
            cum += d;
            lo = lo.min(cum);
            hi = hi.max(cum);
            ss += d * d;
        }
        let sd = (ss / size as f64).sqrt();
        if sd > 0.0 {
            total += (hi - lo) / sd;
            count += 1;
        }
    }
    (count > 0).then(|| total / count as f64)
}

/// Anis–Lloyd expected R/S for block size `s`, optionally with Peters'
/// small-sample factor.
pub fn expected_rescaled_range(s: usize, peters: bool) -> f64 {
    let sf = s as f64;
    let sum: f64 = (1..s).map(|i| ((sf - i as f64) / i as f64).sqrt()).sum();
    let lead = if s <= 340 {
        (ln_gamma(0.5 * (sf - 1.0)) - ln_gamma(0.5 * sf)).exp() / PI.sqrt()
    } else {
        1.0 / (0.5 * PI * sf).sqrt()
    };
    let base = lead * sum;
    if peters {
        base * (sf - 0.5) / sf
    } else {
        base
    }
}

fn dyadic_sizes(n: usize) -> Vec<usize> {
    std::iter::successors(Some(DYADIC_START), |s| Some(s * 2))
        .take_while(|&s| s <= n / 2)
        .collect()
}

fn dense_sizes(n: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = Vec::new();
    let mut s = DENSE_START;
    while (s.round() as usize) <= n / 2 {
        let v = s.round() as usize;
        if sizes.last() != Some(&v) {
            sizes.push(v);
        }
        s *= DENSE_FACTOR;
    }
    sizes
}

fn log2_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.log2()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.log2()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.log2() - mx;
        sxy += dx * (y.log2() - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Five R/S-family Hurst estimates over the longest observed stretch of `s`.
pub fn hurst(s: &DailySeries) -> Result<HurstReport> {
    let x = s.longest_observed_run();
    let n = x.len();
    if n < MIN_LENGTH {
        return Err(Error::Diagnostic(format!(
            "Hurst estimation needs a contiguous stretch of {MIN_LENGTH} observations, longest is {n}"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    if x.iter().all(|v| (v - mean).abs() == 0.0) {
        return Err(Error::Diagnostic("constant series has no rescaled range".into()));
    }

    let measure = |sizes: &[usize]| -> Vec<(f64, f64)> {
        sizes
            .iter()
            .filter_map(|&sz| rescaled_range(x, sz).map(|rs| (sz as f64, rs)))
            .collect()
    };
    let dyadic = measure(&dyadic_sizes(n));
    let dense = measure(&dense_sizes(n));
    if dyadic.len() < 2 || dense.len() < 2 {
        return Err(Error::Diagnostic("too few usable block sizes".into()));
    }

    let simple_rs = log2_slope(&dyadic);
    let al: Vec<(f64, f64)> = dyadic
        .iter()
        .map(|&(sz, _)| (sz, expected_rescaled_range(sz as usize, false)))
        .collect();
    let corrected_rs = 0.5 + simple_rs - log2_slope(&al);

    let empirical = log2_slope(&dense);
    let alp: Vec<(f64, f64)> = dense
        .iter()
        .map(|&(sz, _)| (sz, expected_rescaled_range(sz as usize, true)))
        .collect();
    let adjusted: Vec<(f64, f64)> = dense
        .iter()
        .zip(&alp)
        .map(|(&(sz, rs), &(_, e))| (sz, rs - e + (0.5 * PI * sz).sqrt()))
        .collect();
    let corrected_empirical = log2_slope(&adjusted);
    let theoretical = log2_slope(&alp);

    let unreliable = [
        ("simple_rs", simple_rs),
        ("corrected_rs", corrected_rs),
        ("empirical", empirical),
        ("corrected_empirical", corrected_empirical),
        ("theoretical", theoretical),
    ]
    .iter()
    .filter(|(_, h)| !(*h > 0.0 && *h < 1.5))
    .map(|(name, _)| name.to_string())
    .collect();

    Ok(HurstReport { simple_rs, corrected_rs, empirical, corrected_empirical, theoretical, n, unreliable })
}
