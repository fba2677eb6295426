use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::DailySeries;
use crate::regress::{ols, DesignMatrix};

/// MacKinnon (2010) response-surface coefficients for the constant-only ADF
/// regression, rows for the 1%, 5% and 10% levels.
const TAU_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lag_order: usize,
    pub nobs: usize,
    /// Critical values at 1%, 5% and 10%.
    pub critical_values: [f64; 3],
    /// Bracket containing the p-value, read off the critical-value table.
    pub p_value_bracket: (f64, f64),
    pub reject_unit_root_5pct: bool,
}

/// Finite-sample critical values at 1%, 5% and 10% for `nobs` observations.
pub fn adf_critical_values(nobs: usize) -> [f64; 3] {
    let t = nobs as f64;
    TAU_CONSTANT.map(|b| b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t))
}

/// Regress `Δy_t` on `[1, y_{t-1}, Δy_{t-1}, …, Δy_{t-p}]` for `t` in `first..n`.
fn adf_regression(y: &[f64], p: usize, first: usize) -> Result<crate::regress::OlsFit> {
    let rows: Vec<usize> = (first..y.len()).collect();
    let dy = |t: usize| y[t] - y[t - 1];
    let mut columns = vec![vec![1.0; rows.len()], rows.iter().map(|&t| y[t - 1]).collect()];
    let mut labels = vec!["const".to_string(), "y(t-1)".to_string()];
    for i in 1..=p {
        columns.push(rows.iter().map(|&t| dy(t - i)).collect());
        labels.push(format!("dy(t-{i})"));
    }
    let design = DesignMatrix::from_columns(&columns, labels)?;
    let response: Vec<f64> = rows.iter().map(|&t| dy(t)).collect();
    ols(&design, &response)
}

/// Augmented Dickey–Fuller test with a constant and no trend. The lag order
/// minimizes AIC over `0..=min(max_lag, ⌊12 (n/100)^¼⌋)` on a common sample;
/// the chosen model is then refit on every usable observation.
pub fn adf_test(s: &DailySeries, max_lag: usize) -> Result<AdfResult> {
    let y = s.longest_observed_run();
    let n = y.len();
    if n <= max_lag + 10 {
        return Err(Error::InsufficientData { needed: max_lag + 10, available: n });
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    if y.iter().all(|v| *v == mean) {
        return Err(Error::ZeroVariance);
    }

    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    let cap = max_lag.min(schwert).min(n.saturating_sub(10) / 2);
    let mut best = (f64::INFINITY, 0usize);
    for p in 0..=cap {
        let fit = adf_regression(y, p, cap + 1)?;
        let nobs = fit.n as f64;
        let aic = nobs * (fit.rss / nobs).ln() + 2.0 * fit.p as f64;
        if aic < best.0 {
            best = (aic, p);
        }
    }
    let lag_order = best.1;
    let fit = adf_regression(y, lag_order, lag_order + 1)?;
    let statistic = fit.coefficients[1] / fit.standard_errors[1];
    if !statistic.is_finite() {
        return Err(Error::ZeroVariance);
    }
    let critical_values = adf_critical_values(fit.n);
    let p_value_bracket = if statistic < critical_values[0] {
        (0.0, 0.01)
    } else if statistic < critical_values[1] {
        (0.01, 0.05)
    } else if statistic < critical_values[2] {
        (0.05, 0.10)
    } else {
        (0.10, 1.0)
    };
    Ok(AdfResult {
        statistic,
        lag_order,
        nobs: fit.n,
        critical_values,
        p_value_bracket,
        reject_unit_root_5pct: statistic < critical_values[1],
    })
}
