//! Quadratic-trend plus multi-period harmonic model for daily sea-ice extent,
//! its analytic derivatives, and yearly phase-plane loops.
//!
//! ```text
//! x(t) = b0 + b1 t + b2 t^2
//!      + sum_j sum_i [ s_ji sin(i w_j t) + c_ji cos(i w_j t) ],   w_j = 2 pi / P_j
//! ```
//!
//! `t` counts days from the fit's origin (the first observed date). The
//! derivatives carry the chain-rule factor `i w_j` on every harmonic term.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{CalendarDate, DailySeries, Units};
use crate::regress::{ols, DesignMatrix};

/// Mean length of the Gregorian year in days.
pub const TROPICAL_YEAR: f64 = 365.25;

/// Periods and harmonic count of the seasonal part. The trend is always quadratic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpec {
    pub periods: Vec<f64>,
    pub harmonics: usize,
}

impl Default for HarmonicSpec {
    fn default() -> Self {
        HarmonicSpec { periods: vec![TROPICAL_YEAR], harmonics: 4 }
    }
}

impl HarmonicSpec {
    pub fn new(periods: Vec<f64>, harmonics: usize) -> Result<Self> {
        let spec = HarmonicSpec { periods, harmonics };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.harmonics == 0 {
            return Err(Error::Contract("at least one harmonic is required".into()));
        }
        if self.periods.is_empty() {
            return Err(Error::Contract("at least one period is required".into()));
        }
        if self.periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::Contract("periods must be positive and finite".into()));
        }
        for (a, pa) in self.periods.iter().enumerate() {
            if self.periods[..a].iter().any(|pb| pb == pa) {
                return Err(Error::Contract(format!("period {pa} listed twice")));
            }
        }
        Ok(())
    }

    /// Number of regression coefficients: three trend terms plus a sine and a
    /// cosine per harmonic per period.
    pub fn parameter_count(&self) -> usize {
        3 + 2 * self.harmonics * self.periods.len()
    }
}

/// Fitted harmonic model. `sine[j][i - 1]` and `cosine[j][i - 1]` hold the
/// coefficients of harmonic `i` of period `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFit {
    pub spec: HarmonicSpec,
    pub t0: CalendarDate,
    pub t_end: CalendarDate,
    pub trend: [f64; 3],
    pub sine: Vec<Vec<f64>>,
    pub cosine: Vec<Vec<f64>>,
    pub sigma2: f64,
    pub rss: f64,
    pub observations: usize,
}

impl HarmonicFit {
    /// Model with the given coefficients over `[t0, t_end]`.
    pub fn from_coefficients(
        spec: HarmonicSpec,
        t0: CalendarDate,
        t_end: CalendarDate,
        trend: [f64; 3],
        sine: Vec<Vec<f64>>,
        cosine: Vec<Vec<f64>>,
    ) -> Result<Self> {
        spec.validate()?;
        let shape_ok = |a: &Vec<Vec<f64>>| {
            a.len() == spec.periods.len() && a.iter().all(|r| r.len() == spec.harmonics)
        };
        if !shape_ok(&sine) || !shape_ok(&cosine) {
            return Err(Error::Contract("coefficient arrays do not match the spec".into()));
        }
        Ok(HarmonicFit { spec, t0, t_end, trend, sine, cosine, sigma2: 0.0, rss: 0.0, observations: 0 })
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.spec.periods.iter().enumerate().flat_map(move |(j, p)| {
            let w = 2.0 * PI / p;
            (1..=self.spec.harmonics).map(move |i| (i as f64 * w, self.sine[j][i - 1], self.cosine[j][i - 1]))
        })
    }

    /// Model value at `t` days after `t0`.
    pub fn eval(&self, t: f64) -> f64 {
        let [b0, b1, b2] = self.trend;
        let seasonal: f64 = self.terms().map(|(w, s, c)| s * (w * t).sin() + c * (w * t).cos()).sum();
        b0 + b1 * t + b2 * t * t + seasonal
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let [_, b1, b2] = self.trend;
        let seasonal: f64 = self
            .terms()
            .map(|(w, s, c)| w * (s * (w * t).cos() - c * (w * t).sin()))
            .sum();
        b1 + 2.0 * b2 * t + seasonal
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        let b2 = self.trend[2];
        let seasonal: f64 = self
            .terms()
            .map(|(w, s, c)| w * w * (s * (w * t).sin() + c * (w * t).cos()))
            .sum();
        2.0 * b2 - seasonal
    }

    /// Days from `t0` to `date`.
    pub fn t_of(&self, date: CalendarDate) -> f64 {
        self.t0.days_until(date) as f64
    }

    /// Peak-to-trough amplitude of the seasonal part over one longest period.
    pub fn seasonal_range(&self) -> f64 {
        let span = self.spec.periods.iter().cloned().fold(0.0, f64::max);
        let steps = 2000;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..steps {
            let t = span * k as f64 / steps as f64;
            let v: f64 = self.terms().map(|(w, s, c)| s * (w * t).sin() + c * (w * t).cos()).sum();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    }
}

/// Least-squares fit of the harmonic model to the observed days of `s`.
pub fn fit_harmonic(s: &DailySeries, spec: &HarmonicSpec) -> Result<HarmonicFit> {
    spec.validate()?;
    let first = s.first_observed().ok_or(Error::EmptyInput)?;
    let last = s.last_observed().ok_or(Error::EmptyInput)?;
    let obs: Vec<(f64, f64)> = s.observed().map(|(i, v)| ((i - first) as f64, v)).collect();
    let params = spec.parameter_count();
    if obs.len() <= params {
        return Err(Error::InsufficientData { needed: params, available: obs.len() });
    }

    // trend columns use t scaled to [-1, 1] for conditioning
    let mid = 0.5 * (last - first) as f64;
    let half = mid.max(1.0);
    let mut columns: Vec<Vec<f64>> = vec![
        vec![1.0; obs.len()],
        obs.iter().map(|(t, _)| (t - mid) / half).collect(),
        obs.iter().map(|(t, _)| ((t - mid) / half).powi(2)).collect(),
    ];
    let mut labels = vec!["trend0".to_string(), "trend1".to_string(), "trend2".to_string()];
    for (j, p) in spec.periods.iter().enumerate() {
        let w = 2.0 * PI / p;
        for i in 1..=spec.harmonics {
            let wi = w * i as f64;
            columns.push(obs.iter().map(|(t, _)| (wi * t).sin()).collect());
            labels.push(format!("sin(P{j},{i})"));
            columns.push(obs.iter().map(|(t, _)| (wi * t).cos()).collect());
            labels.push(format!("cos(P{j},{i})"));
        }
    }
    let design = DesignMatrix::from_columns(&columns, labels)?;
    let y: Vec<f64> = obs.iter().map(|(_, v)| *v).collect();
    let fit = ols(&design, &y)?;
    let b = &fit.coefficients;

    // map a0 + a1 u + a2 u^2, u = (t - mid)/half, back to powers of t
    let (a0, a1, a2) = (b[0], b[1], b[2]);
    let trend = [
        a0 - a1 * mid / half + a2 * mid * mid / (half * half),
        a1 / half - 2.0 * a2 * mid / (half * half),
        a2 / (half * half),
    ];
    let mut sine = vec![vec![0.0; spec.harmonics]; spec.periods.len()];
    let mut cosine = sine.clone();
    let mut k = 3;
    for j in 0..spec.periods.len() {
        for i in 0..spec.harmonics {
            sine[j][i] = b[k];
            cosine[j][i] = b[k + 1];
            k += 2;
        }
    }

    Ok(HarmonicFit {
        spec: spec.clone(),
        t0: s.date_at(first),
        t_end: s.date_at(last),
        trend,
        sine,
        cosine,
        sigma2: fit.sigma2,
        rss: fit.rss,
        observations: obs.len(),
    })
}

/// Fit restricted to the observed days of one calendar year.
pub fn fit_year(s: &DailySeries, spec: &HarmonicSpec, year: i32) -> Result<HarmonicFit> {
    let from = CalendarDate::first_of_year(year).ok_or_else(|| Error::Range(format!("year {year}")))?;
    let to = CalendarDate::last_of_year(year).ok_or_else(|| Error::Range(format!("year {year}")))?;
    if s.end() < from || s.start() > to {
        return Err(Error::Range(format!("year {year} outside {} .. {}", s.start(), s.end())));
    }
    let values: Vec<Option<f64>> = (0..=from.days_until(to))
        .map(|d| s.get_date(from.add_days(d)))
        .collect();
    let window = DailySeries::from_options(from, &values, s.units())?;
    fit_harmonic(&window, spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    PositionVelocity,
    VelocityAcceleration,
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseKind::PositionVelocity => "position_velocity",
            PhaseKind::VelocityAcceleration => "velocity_acceleration",
        })
    }
}

/// One calendar year of the model traced in a phase plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrajectory {
    pub year: i32,
    pub kind: PhaseKind,
    /// Days since the fit origin, one per calendar day.
    pub t: Vec<f64>,
    pub points: Vec<(f64, f64)>,
    pub area: f64,
}

/// Absolute shoelace area of the polygon through `points`, closed by joining
/// the last point to the first.
pub fn shoelace_area(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let (cx, cy) = points[0];
    let twice: f64 = points
        .iter()
        .zip(points.iter().cycle().skip(1))
        .map(|(&(x1, y1), &(x2, y2))| (x1 - cx) * (y2 - cy) - (x2 - cx) * (y1 - cy))
        .sum();
    0.5 * twice.abs()
}

/// Daily phase-plane trajectory of the fitted model across `year`.
pub fn phase_trajectory(f: &HarmonicFit, year: i32, kind: PhaseKind) -> Result<PhaseTrajectory> {
    if year < f.t0.year() || year > f.t_end.year() {
        return Err(Error::Range(format!(
            "year {year} outside fitted range {} .. {}",
            f.t0, f.t_end
        )));
    }
    let from = CalendarDate::first_of_year(year).ok_or_else(|| Error::Range(format!("year {year}")))?;
    let to = CalendarDate::last_of_year(year).ok_or_else(|| Error::Range(format!("year {year}")))?;
    let t: Vec<f64> = (0..=from.days_until(to)).map(|d| f.t_of(from) + d as f64).collect();
    let points: Vec<(f64, f64)> = t
        .iter()
        .map(|&t| match kind {
            PhaseKind::PositionVelocity => (f.eval(t), f.velocity(t)),
            PhaseKind::VelocityAcceleration => (f.velocity(t), f.acceleration(t)),
        })
        .collect();
    let area = shoelace_area(&points);
    Ok(PhaseTrajectory { year, kind, t, points, area })
}

/// Daily model velocity and acceleration over `[from, to]`.
pub fn derivative_series(
    f: &HarmonicFit,
    from: CalendarDate,
    to: CalendarDate,
) -> Result<(DailySeries, DailySeries)> {
    if from > to || from < f.t0 || to > f.t_end {
        return Err(Error::Range(format!(
            "{from} .. {to} not within fitted range {} .. {}",
            f.t0, f.t_end
        )));
    }
    let days = from.days_until(to) as usize + 1;
    let t: Vec<f64> = (0..days).map(|d| f.t_of(from) + d as f64).collect();
    let vel = t.iter().map(|&t| f.velocity(t)).collect();
    let acc = t.iter().map(|&t| f.acceleration(t)).collect();
    Ok((
        DailySeries::from_values(from, vel, Units::MillionSqKmPerDay)?,
        DailySeries::from_values(from, acc, Units::MillionSqKmPerDaySquared)?,
    ))
}

/// Central-difference velocity and acceleration of the observed series.
/// A day is masked unless both neighbours (and itself, for acceleration)
/// are observed.
pub fn raw_derivative_series(s: &DailySeries) -> Result<(DailySeries, DailySeries)> {
    let n = s.len();
    let mut vel = vec![None; n];
    let mut acc = vec![None; n];
    for i in 1..n.saturating_sub(1) {
        if let (Some(a), Some(b)) = (s.get(i - 1), s.get(i + 1)) {
            vel[i] = Some(0.5 * (b - a));
            if let Some(c) = s.get(i) {
                acc[i] = Some(a - 2.0 * c + b);
            }
        }
    }
    Ok((
        DailySeries::from_options(s.start(), &vel, Units::MillionSqKmPerDay)?,
        DailySeries::from_options(s.start(), &acc, Units::MillionSqKmPerDaySquared)?,
    ))
}
