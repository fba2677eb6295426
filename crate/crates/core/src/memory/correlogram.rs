use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::DailySeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramPoint {
    pub lag: i64,
    pub value: f64,
}

/// Sample correlations by lag plus the 95% white-noise band `±1.96/√n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlogram {
    pub points: Vec<CorrelogramPoint>,
    pub band: f64,
    pub n: usize,
}

impl Correlogram {
    pub fn at(&self, lag: i64) -> Option<f64> {
        self.points.iter().find(|p| p.lag == lag).map(|p| p.value)
    }
}

fn centered(s: &DailySeries) -> Result<(Vec<Option<f64>>, f64)> {
    let n = s.observed_count();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mean = s.observed().map(|(_, v)| v).sum::<f64>() / n as f64;
    let dev: Vec<Option<f64>> = (0..s.len()).map(|i| s.get(i).map(|v| v - mean)).collect();
    let ss: f64 = dev.iter().flatten().map(|d| d * d).sum();
    if !(ss > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((dev, ss))
}

/// `Σ a(t) b(t+lag)` over days where both are observed.
fn lagged_cross(a: &[Option<f64>], b: &[Option<f64>], lag: i64) -> f64 {
    let n = a.len() as i64;
    let (lo, hi) = (0.max(-lag), n.min(n - lag));
    (lo..hi)
        .filter_map(|t| match (a[t as usize], b[(t + lag) as usize]) {
            (Some(x), Some(y)) => Some(x * y),
            _ => None,
        })
        .sum()
}

/// Biased sample autocorrelation for lags `0..=max_lag`; incomplete pairs are
/// dropped, and the normalization uses the full observed sum of squares so
/// every value stays in `[-1, 1]`.
pub fn acf(s: &DailySeries, max_lag: usize) -> Result<Correlogram> {
    let n = s.observed_count();
    if n <= max_lag {
        return Err(Error::InsufficientData { needed: max_lag, available: n });
    }
    let (dev, ss) = centered(s)?;
    let points = (0..=max_lag as i64)
        .map(|lag| CorrelogramPoint {
            lag,
            value: if lag == 0 { 1.0 } else { lagged_cross(&dev, &dev, lag) / ss },
        })
        .collect();
    Ok(Correlogram { points, band: 1.96 / (n as f64).sqrt(), n })
}

/// Cross-correlation of `a(t)` with `b(t + lag)` for `lag` in
/// `-max_lag..=max_lag`. Both series must share a calendar.
pub fn ccf(a: &DailySeries, b: &DailySeries, max_lag: usize) -> Result<Correlogram> {
    if a.start() != b.start() || a.len() != b.len() {
        return Err(Error::Range(format!(
            "series are not aligned ({} + {} days vs {} + {} days)",
            a.start(),
            a.len(),
            b.start(),
            b.len()
        )));
    }
    let n = a
        .mask()
        .iter()
        .zip(b.mask())
        .filter(|(x, y)| **x && **y)
        .count();
    if n <= max_lag {
        return Err(Error::InsufficientData { needed: max_lag, available: n });
    }
    let (da, ssa) = centered(a)?;
    let (db, ssb) = centered(b)?;
    let norm = (ssa * ssb).sqrt();
    let m = max_lag as i64;
    let points = (-m..=m)
        .map(|lag| CorrelogramPoint { lag, value: lagged_cross(&da, &db, lag) / norm })
        .collect();
    Ok(Correlogram { points, band: 1.96 / (n as f64).sqrt(), n })
}
