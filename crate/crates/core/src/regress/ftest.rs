use serde::{Deserialize, Serialize};
use statrs::function::beta::checked_beta_reg;

use super::OlsFit;
use crate::error::{Error, Result};

/// Nested-model ANOVA F test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    pub f_stat: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
}

/// Upper tail `P(F > f)` of the F distribution with `(d1, d2)` degrees of
/// freedom, via the regularized incomplete beta function.
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if !(f > 0.0) {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    let x = d2 / (d2 + d1 * f);
    checked_beta_reg(0.5 * d2, 0.5 * d1, x)
        .unwrap_or(f64::NAN)
        .clamp(0.0, 1.0)
}

/// Compare a null fit against a full fit whose columns contain the null's.
pub fn f_test_nested(null_fit: &OlsFit, full_fit: &OlsFit, n: usize) -> Result<FTestResult> {
    if full_fit.p <= null_fit.p {
        return Err(Error::Contract(format!(
            "full model has {} columns, null {}; models are not nested",
            full_fit.p, null_fit.p
        )));
    }
    if n <= full_fit.p {
        return Err(Error::InsufficientData { needed: full_fit.p, available: n });
    }
    let df_num = full_fit.p - null_fit.p;
    let df_den = n - full_fit.p;
    let scale = null_fit.rss.max(full_fit.rss).max(f64::MIN_POSITIVE);
    if null_fit.rss < full_fit.rss - 1e-9 * scale {
        return Err(Error::Contract(format!(
            "null rss {} below full rss {}; models are not nested",
            null_fit.rss, full_fit.rss
        )));
    }
    let diff = (null_fit.rss - full_fit.rss).max(0.0);
    let f_stat = if full_fit.rss > 0.0 {
        (diff / df_num as f64) / (full_fit.rss / df_den as f64)
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(FTestResult {
        f_stat,
        df_num,
        df_den,
        p_value: f_upper_tail(f_stat, df_num as f64, df_den as f64),
    })
}
