use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::LagDesign;
use crate::error::{Error, Result};
use crate::ingest::CalendarDate;
use crate::regress::DesignMatrix;

pub const DEFAULT_DISCOUNT: f64 = 0.98;
/// Diffuse prior variance of each coefficient.
const PRIOR_VARIANCE: f64 = 1e6;

/// Filtered coefficient paths of a time-varying regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DlmTrace {
    pub times: Vec<CalendarDate>,
    pub labels: Vec<String>,
    /// `coefficient_paths[j][t]` is regressor `j`'s filtered mean after step `t`.
    pub coefficient_paths: Vec<Vec<f64>>,
    pub state_variances: Vec<Vec<f64>>,
    /// Online estimate of the observation variance.
    pub observation_variance: Vec<f64>,
    pub discount: f64,
}

/// Discount-factor filter for `y_t = F_tᵀ θ_t + v_t` with `θ_t` a random walk
/// whose evolution variance is `(1/δ − 1)` times the current state variance.
/// The observation variance is learned from the one-step forecast errors.
pub fn dlm_regression(times: Vec<CalendarDate>, x: &DesignMatrix, y: &[f64], discount: f64) -> Result<DlmTrace> {
    if !(discount > 0.8 && discount < 1.0) {
        return Err(Error::Contract(format!("discount must lie in (0.8, 1), got {discount}")));
    }
    let (n, p) = (x.nrows(), x.ncols());
    if y.len() != n || times.len() != n || p == 0 {
        return Err(Error::Contract("times, response and design must agree in length".into()));
    }

    let mean = y.iter().sum::<f64>() / n as f64;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let mut s = if var > 0.0 { var } else { 1.0 };
    let mut dof = 1.0;
    let mut m = DVector::<f64>::zeros(p);
    let mut c = DMatrix::<f64>::identity(p, p) * PRIOR_VARIANCE;

    let mut paths = vec![Vec::with_capacity(n); p];
    let mut variances = vec![Vec::with_capacity(n); p];
    let mut obs_var = Vec::with_capacity(n);
    for t in 0..n {
        let f: DVector<f64> = x.matrix().row(t).transpose();
        let r = &c / discount;
        let rf = &r * &f;
        let q = f.dot(&rf) + s;
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::Filter { step: t, message: format!("forecast variance {q}") });
        }
        let e = y[t] - f.dot(&m);
        let a = &rf / q;
        dof += 1.0;
        let s_new = s + (s / dof) * (e * e / q - 1.0);
        m += &a * e;
        c = (r - &a * a.transpose() * q) * (s_new / s);
        c = (&c + c.transpose()) * 0.5;
        s = s_new;
        for j in 0..p {
            paths[j].push(m[j]);
            variances[j].push(c[(j, j)].max(0.0));
        }
        obs_var.push(s);
    }
    Ok(DlmTrace {
        times,
        labels: x.labels().to_vec(),
        coefficient_paths: paths,
        state_variances: variances,
        observation_variance: obs_var,
        discount,
    })
}

/// Filter the design's response on an intercept, its own lags and its cross lags.
pub fn dlm_filter(d: &LagDesign, discount: f64) -> Result<DlmTrace> {
    let x = d.own_lags.with_intercept().hstack(&d.cross_lags)?;
    dlm_regression(d.row_dates().collect(), &x, &d.response, discount)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causality::build_lag_design;
    use crate::ingest::{DailySeries, Units};
    use crate::regress::ols;
    use crate::testutil::normals;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn times(n: usize) -> Vec<CalendarDate> {
        let d0 = CalendarDate::new(1980, 1, 1).unwrap();
        (0..n).map(|i| d0.add_days(i as i64)).collect()
    }

    #[test]
    fn exact_single_regressor() {
        let x: Vec<f64> = (0..50).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v).collect();
        let d = DesignMatrix::from_columns(&[x], vec!["x".into()]).unwrap();
        let tr = dlm_regression(times(50), &d, &y, 0.95).unwrap();
        // the diffuse prior leaves an error of order var(y) / PRIOR_VARIANCE
        for b in &tr.coefficient_paths[0] {
            assert!((b - 2.5).abs() < 1e-5, "{b}");
        }
    }

    #[test]
    fn near_unit_discount_tracks_ols() {
        let n = 4000;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x1, x2, e) = (normals(&mut rng, n), normals(&mut rng, n), normals(&mut rng, n));
        let y: Vec<f64> = (0..n).map(|t| 1.0 + 2.0 * x1[t] - 0.5 * x2[t] + 0.5 * e[t]).collect();
        let d = DesignMatrix::from_columns(&[vec![1.0; n], x1, x2], vec!["c".into(), "a".into(), "b".into()]).unwrap();
        let fit = ols(&d, &y).unwrap();
        let tr = dlm_regression(times(n), &d, &y, 0.9999).unwrap();
        for j in 0..3 {
            let tail = &tr.coefficient_paths[j][3 * n / 4..];
            for b in tail {
                assert!((b - fit.coefficients[j]).abs() < 0.05 * fit.coefficients[j].abs(), "{j} {b}");
            }
        }
        assert!(tr.state_variances.iter().flatten().all(|v| *v >= 0.0));
    }

    #[test]
    fn follows_a_jump() {
        let n = 2000;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, e) = (normals(&mut rng, n), normals(&mut rng, n));
        let y: Vec<f64> = (0..n)
            .map(|t| if t < 1000 { 0.2 } else { 0.8 } * x[t] + 0.3 * e[t])
            .collect();
        let d = DesignMatrix::from_columns(&[x], vec!["x".into()]).unwrap();
        let tr = dlm_regression(times(n), &d, &y, DEFAULT_DISCOUNT).unwrap();
        let path = &tr.coefficient_paths[0];
        assert!(path[999] < 0.5);
        let crossing = (1000..n).find(|&t| path[t] > 0.5).unwrap();
        assert!(crossing - 1000 < 200, "{crossing}");
    }

    #[test]
    fn lag_design_wrapper() {
        let n = 300;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d0 = CalendarDate::new(1980, 1, 1).unwrap();
        let y = DailySeries::from_values(d0, normals(&mut rng, n), Units::Index).unwrap();
        let x = DailySeries::from_values(d0, normals(&mut rng, n), Units::Index).unwrap();
        let d = build_lag_design(&y, &[("x", &x)], 2).unwrap();
        let tr = dlm_filter(&d, DEFAULT_DISCOUNT).unwrap();
        assert_eq!(tr.labels, vec!["intercept", "Y(t-1)", "Y(t-2)", "x(t-1)", "x(t-2)"]);
        assert_eq!(tr.times.len(), d.nrows());
        assert_eq!(tr.times[0], d0.add_days(2));
        assert!(tr.coefficient_paths.iter().all(|p| p.len() == d.nrows()));
        assert!(dlm_filter(&d, 1.0).is_err());
    }

    #[test]
    fn breakdown_reports_step() {
        let x = vec![1.0, f64::MAX, 1.0];
        let d = DesignMatrix::from_columns(&[x], vec!["x".into()]).unwrap();
        match dlm_regression(times(3), &d, &[1.0, 1.0, 1.0], 0.9) {
            Err(Error::Filter { step, .. }) => assert_eq!(step, 1),
            other => panic!("{other:?}"),
        }
    }
}
