use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ingest::{CalendarDate, DailySeries};
use crate::regress::DesignMatrix;

/// Label stem for the response's own lags.
pub const OWN_NAME: &str = "Y";

/// Lagged regression design on a common daily calendar.
///
/// Row `r` explains the response on day `rows[r]` (counted from `start`);
/// its own-lag entries hold the response `1..=k` days earlier and its
/// cross-lag entries the cross series `1..=k` days earlier, series by series.
#[derive(Clone, Debug)]
pub struct LagDesign {
    pub k: usize,
    pub start: CalendarDate,
    pub rows: Vec<usize>,
    pub response: Vec<f64>,
    pub own_lags: DesignMatrix,
    pub cross_lags: DesignMatrix,
    pub cross_names: Vec<String>,
    /// Response on the full calendar, NaN where masked.
    pub response_series: Vec<f64>,
}

impl LagDesign {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn row_dates(&self) -> impl Iterator<Item = CalendarDate> + '_ {
        self.rows.iter().map(|&t| self.start.add_days(t as i64))
    }

    /// Same rows and cross lags, with the response (and so the own lags)
    /// taken from `y`, a full-calendar series.
    pub fn with_response_series(&self, y: &[f64]) -> Result<LagDesign> {
        if y.len() != self.response_series.len() {
            return Err(Error::Contract("replacement response has the wrong length".into()));
        }
        let m = self.rows.len();
        let own = DMatrix::from_fn(m, self.k, |r, i| y[self.rows[r] - i - 1]);
        Ok(LagDesign {
            response: self.rows.iter().map(|&t| y[t]).collect(),
            own_lags: DesignMatrix::new(own, self.own_lags.labels().to_vec())?,
            response_series: y.to_vec(),
            ..self.clone()
        })
    }
}

/// Regress `response(t)` on its own lags `1..=k` and on lags `1..=k` of
/// each named cross series. Every series must share the response's calendar.
/// Rows touching a masked value are dropped.
pub fn build_lag_design(
    response: &DailySeries,
    cross: &[(&str, &DailySeries)],
    k: usize,
) -> Result<LagDesign> {
    if k == 0 {
        return Err(Error::Contract("lag count k must be at least 1".into()));
    }
    for (name, s) in cross {
        if s.start() != response.start() || s.len() != response.len() {
            return Err(Error::Range(format!(
                "cross series {name} ({} .. {}) is not on the response calendar ({} .. {})",
                s.start(),
                s.end(),
                response.start(),
                response.end()
            )));
        }
    }

    let n = response.len();
    let window_ok = |mask: &[bool], t: usize| mask[t - k..t].iter().all(|&m| m);
    let rows: Vec<usize> = (k..n)
        .filter(|&t| {
            response.mask()[t]
                && window_ok(response.mask(), t)
                && cross.iter().all(|(_, s)| window_ok(s.mask(), t))
        })
        .collect();
    let m = rows.len();
    let columns = 1 + k * (1 + cross.len());
    if m <= columns {
        return Err(Error::InsufficientData { needed: columns, available: m });
    }

    let y = response.values();
    let own = DMatrix::from_fn(m, k, |r, i| y[rows[r] - i - 1]);
    let own_labels = (1..=k).map(|i| format!("{OWN_NAME}(t-{i})")).collect();
    let cross_m = DMatrix::from_fn(m, k * cross.len(), |r, j| {
        cross[j / k].1.values()[rows[r] - j % k - 1]
    });
    let cross_labels = cross
        .iter()
        .flat_map(|(name, _)| (1..=k).map(move |i| format!("{name}(t-{i})")))
        .collect();

    Ok(LagDesign {
        k,
        start: response.start(),
        response: rows.iter().map(|&t| y[t]).collect(),
        rows,
        own_lags: DesignMatrix::new(own, own_labels)?,
        cross_lags: DesignMatrix::new(cross_m, cross_labels)?,
        cross_names: cross.iter().map(|(name, _)| name.to_string()).collect(),
        response_series: y.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Units;

    fn day0() -> CalendarDate {
        CalendarDate::new(2001, 3, 1).unwrap()
    }

    fn series(v: &[Option<f64>]) -> DailySeries {
        DailySeries::from_options(day0(), v, Units::Index).unwrap()
    }

    #[test]
    fn hand_built_single_lag() {
        let y = series(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(5.0)]);
        let d = build_lag_design(&y, &[], 1).unwrap();
        assert_eq!(d.rows, vec![1, 2, 3, 4]);
        assert_eq!(d.response, vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(d.own_lags.column(0), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.own_lags.labels(), &["Y(t-1)".to_string()]);
        assert_eq!(d.cross_lags.ncols(), 0);
    }

    #[test]
    fn masked_day_drops_touching_rows() {
        let mut v: Vec<Option<f64>> = (0..20).map(|i| Some(i as f64)).collect();
        v[10] = None;
        let y = series(&v);
        let x = series(&(0..20).map(|i| Some(100.0 + i as f64)).collect::<Vec<_>>());
        let d = build_lag_design(&y, &[("x'", &x)], 3).unwrap();
        // day 10 is a response on row 10 and a lag for 11, 12, 13
        let expected: Vec<usize> = (3..20).filter(|t| !(10..=13).contains(t)).collect();
        assert_eq!(d.rows, expected);
        assert_eq!(d.cross_lags.labels()[2], "x'(t-3)");
        // every entry reconstructs from the raw calendar
        for (r, &t) in d.rows.iter().enumerate() {
            for i in 1..=3 {
                assert_eq!(d.own_lags.matrix()[(r, i - 1)], (t - i) as f64);
                assert_eq!(d.cross_lags.matrix()[(r, i - 1)], 100.0 + (t - i) as f64);
            }
        }
        assert_eq!(d.row_dates().next().unwrap(), day0().add_days(3));
    }

    #[test]
    fn two_cross_series_give_2k_columns() {
        let v: Vec<Option<f64>> = (0..50).map(|i| Some((i as f64).sin())).collect();
        let (a, b, c) = (series(&v), series(&v), series(&v));
        let d = build_lag_design(&a, &[("x'", &b), ("x''", &c)], 4).unwrap();
        assert_eq!(d.cross_lags.ncols(), 8);
        assert_eq!(d.cross_lags.labels()[4], "x''(t-1)");
    }

    #[test]
    fn forty_years_row_count() {
        let n = 14_610;
        let v: Vec<Option<f64>> = (0..n).map(|i| Some(i as f64)).collect();
        let d = build_lag_design(&series(&v), &[], 365).unwrap();
        assert_eq!(d.nrows(), n - 365);
    }

    #[test]
    fn errors() {
        let y = series(&[Some(1.0), Some(2.0), Some(3.0)]);
        assert!(matches!(build_lag_design(&y, &[], 0), Err(Error::Contract(_))));
        assert!(matches!(build_lag_design(&y, &[], 2), Err(Error::InsufficientData { .. })));
        let other = DailySeries::from_values(day0().succ(), vec![1.0; 3], Units::Index).unwrap();
        assert!(matches!(build_lag_design(&y, &[("x", &other)], 1), Err(Error::Range(_))));
    }

    #[test]
    fn replacing_response_rebuilds_own_lags() {
        let y = series(&(0..10).map(|i| Some(i as f64)).collect::<Vec<_>>());
        let d = build_lag_design(&y, &[], 2).unwrap();
        let doubled: Vec<f64> = (0..10).map(|i| 2.0 * i as f64).collect();
        let e = d.with_response_series(&doubled).unwrap();
        assert_eq!(e.response[0], 4.0);
        assert_eq!(e.own_lags.matrix()[(0, 1)], 0.0);
        assert_eq!(e.own_lags.matrix()[(0, 0)], 2.0);
    }
}
