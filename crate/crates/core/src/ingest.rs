//! Daily series ingestion for the NSIDC sea-ice-extent CSV and the NOAA
//! daily NAO ASCII file.
//!
//! Both parsers produce a [`DailySeries`]: a contiguous calendar grid with an
//! explicit observation mask. Days the source file does not mention, and rows
//! carrying the NSIDC missing sentinel, are masked out. Masked slots hold
//! `NaN` so an accidental read is loud rather than silently wrong.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value the NSIDC daily product writes when the extent is unavailable.
pub const SIE_MISSING_SENTINEL: f64 = -9999.0;

/// Last day of the alternate-day SIE era; daily coverage starts the day after.
pub fn alternate_day_era_end() -> CalendarDate {
    CalendarDate::new(1987, 8, 20).expect("valid date")
}

/// A Gregorian calendar day.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CalendarDate(NaiveDate);

impl CalendarDate {
    pub fn new(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(CalendarDate)
    }

    pub fn year(self) -> i32 {
        self.0.year()
    }

    pub fn month(self) -> u32 {
        self.0.month()
    }

    pub fn day(self) -> u32 {
        self.0.day()
    }

    /// Signed number of days from `self` to `other`.
    pub fn days_until(self, other: CalendarDate) -> i64 {
        (other.0 - self.0).num_days()
    }

    pub fn add_days(self, days: i64) -> CalendarDate {
        CalendarDate(self.0 + chrono::Duration::days(days))
    }

    pub fn succ(self) -> CalendarDate {
        self.add_days(1)
    }

    pub fn first_of_year(year: i32) -> Option<Self> {
        Self::new(year, 1, 1)
    }

    pub fn last_of_year(year: i32) -> Option<Self> {
        Self::new(year, 12, 31)
    }
}

impl fmt::Display for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year(), self.month(), self.day())
    }
}

impl fmt::Debug for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CalendarDate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map(CalendarDate)
            .map_err(|e| Error::Config(format!("invalid date `{s}`: {e}")))
    }
}

impl Serialize for CalendarDate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CalendarDate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Physical units attached to a daily series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    MillionSqKm,
    MillionSqKmPerDay,
    MillionSqKmPerDaySquared,
    Index,
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::MillionSqKm => "10^6 sq km",
            Units::MillionSqKmPerDay => "10^6 sq km / day",
            Units::MillionSqKmPerDaySquared => "10^6 sq km / day^2",
            Units::Index => "index",
        })
    }
}

/// Calendar-indexed daily values with an observation mask.
///
/// Index `i` corresponds to `start + i` days. Masked entries hold `NaN`.
#[derive(Clone, Debug)]
pub struct DailySeries {
    start: CalendarDate,
    values: Vec<f64>,
    mask: Vec<bool>,
    units: Units,
}

impl DailySeries {
    pub fn new(start: CalendarDate, values: Vec<f64>, mask: Vec<bool>, units: Units) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() != mask.len() {
            return Err(Error::Contract(format!(
                "values ({}) and mask ({}) differ in length",
                values.len(),
                mask.len()
            )));
        }
        if let Some(i) = values.iter().zip(&mask).position(|(v, &m)| m && !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite observed value at index {i}")));
        }
        let values = values
            .into_iter()
            .zip(&mask)
            .map(|(v, &m)| if m { v } else { f64::NAN })
            .collect();
        Ok(DailySeries { start, values, mask, units })
    }

    /// Fully observed series.
    pub fn from_values(start: CalendarDate, values: Vec<f64>, units: Units) -> Result<Self> {
        let mask = vec![true; values.len()];
        Self::new(start, values, mask, units)
    }

    /// Series from optional observations (`None` = masked).
    pub fn from_options(start: CalendarDate, values: &[Option<f64>], units: Units) -> Result<Self> {
        let mask = values.iter().map(Option::is_some).collect();
        let vals = values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        Self::new(start, vals, mask, units)
    }

    pub fn start(&self) -> CalendarDate {
        self.start
    }

    pub fn end(&self) -> CalendarDate {
        self.start.add_days(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn date_at(&self, index: usize) -> CalendarDate {
        self.start.add_days(index as i64)
    }

    pub fn index_of(&self, date: CalendarDate) -> Option<usize> {
        let offset = self.start.days_until(date);
        (offset >= 0 && (offset as usize) < self.len()).then_some(offset as usize)
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        match self.mask.get(index) {
            Some(true) => Some(self.values[index]),
            _ => None,
        }
    }

    pub fn get_date(&self, date: CalendarDate) -> Option<f64> {
        self.index_of(date).and_then(|i| self.get(i))
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// `(index, value)` for every observed day.
    pub fn observed(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(i, _)| (i, self.values[i]))
    }

    pub fn first_observed(&self) -> Option<usize> {
        self.mask.iter().position(|&m| m)
    }

    pub fn last_observed(&self) -> Option<usize> {
        self.mask.iter().rposition(|&m| m)
    }

    /// Longest run of consecutive observed days, earliest on ties.
    pub fn longest_observed_run(&self) -> &[f64] {
        let (mut best_start, mut best_len) = (0, 0);
        let mut run_start = 0;
        for (i, &m) in self.mask.iter().enumerate() {
            if !m {
                run_start = i + 1;
                continue;
            }
            let len = i + 1 - run_start;
            if len > best_len {
                best_start = run_start;
                best_len = len;
            }
        }
        &self.values[best_start..best_start + best_len]
    }

    /// Copy with a different unit label.
    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }
}

impl PartialEq for DailySeries {
    /// Equal when start, units and mask agree and observed values are bit-identical.
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start
            && self.units == other.units
            && self.mask == other.mask
            && self
                .observed()
                .all(|(i, v)| v.to_bits() == other.values[i].to_bits())
    }
}

/// Bookkeeping returned next to every ingested or repaired series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_rejected: usize,
    pub gaps_filled: usize,
    pub date_range: (CalendarDate, CalendarDate),
}

fn parse_field<T: FromStr>(field: &str, line: usize, name: &str) -> Result<T> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: cannot parse `{}`", field.trim()),
    })
}

fn parse_date(year: &str, month: &str, day: &str, line: usize) -> Result<CalendarDate> {
    let y: i32 = parse_field(year, line, "year")?;
    let m: u32 = parse_field(month, line, "month")?;
    let d: u32 = parse_field(day, line, "day")?;
    CalendarDate::new(y, m, d).ok_or_else(|| Error::Parse {
        line,
        message: format!("invalid date {y:04}-{m:02}-{d:02}"),
    })
}

fn series_from_map(map: &BTreeMap<CalendarDate, Option<f64>>, units: Units) -> Result<DailySeries> {
    let (&first, _) = map.iter().next().ok_or(Error::EmptyInput)?;
    let (&last, _) = map.iter().next_back().ok_or(Error::EmptyInput)?;
    let len = first.days_until(last) as usize + 1;
    let mut values = vec![None; len];
    for (&date, &v) in map {
        values[first.days_until(date) as usize] = v;
    }
    DailySeries::from_options(first, &values, units)
}

/// Parse the NSIDC daily sea-ice-extent CSV (v3.0 layout).
///
/// The first two non-blank lines are headers. Rows whose date does not
/// advance past the previously accepted row are rejected.
pub fn parse_sie(content: &str) -> Result<(DailySeries, IngestReport)> {
    let mut headers = 0;
    let mut rows_read = 0;
    let mut rows_rejected = 0;
    let mut last: Option<CalendarDate> = None;
    let mut map = BTreeMap::new();

    for (idx, raw) in content.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if headers < 2 {
            headers += 1;
            continue;
        }
        rows_read += 1;
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() < 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected at least 4 comma-separated fields, found {}", fields.len()),
            });
        }
        let date = parse_date(fields[0], fields[1], fields[2], line)?;
        let extent: f64 = parse_field(fields[3], line, "extent")?;
        if let Some(missing) = fields.get(4) {
            let _: f64 = parse_field(missing, line, "missing")?;
        }
        if last.is_some_and(|prev| date <= prev) {
            rows_rejected += 1;
            continue;
        }
        last = Some(date);
        let value = if (extent - SIE_MISSING_SENTINEL).abs() < 1e-6 {
            None
        } else if extent.is_finite() {
            Some(extent)
        } else {
            return Err(Error::Parse { line, message: "non-finite extent".into() });
        };
        map.insert(date, value);
    }

    let series = series_from_map(&map, Units::MillionSqKm)?;
    let report = IngestReport {
        rows_read,
        rows_rejected,
        gaps_filled: 0,
        date_range: (series.start(), series.end()),
    };
    Ok((series, report))
}

/// Parse the NOAA daily NAO ASCII file (`year month day value`).
///
/// Duplicate dates keep the last row; each superseded row counts as rejected.
pub fn parse_nao(content: &str) -> Result<(DailySeries, IngestReport)> {
    let mut rows_read = 0;
    let mut rows_rejected = 0;
    let mut map = BTreeMap::new();

    for (idx, raw) in content.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        rows_read += 1;
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 whitespace-separated fields, found {}", fields.len()),
            });
        }
        let date = parse_date(fields[0], fields[1], fields[2], line)?;
        let value: f64 = parse_field(fields[3], line, "value")?;
        if !value.is_finite() {
            return Err(Error::Parse { line, message: "non-finite value".into() });
        }
        if map.insert(date, Some(value)).is_some() {
            rows_rejected += 1;
        }
    }

    let series = series_from_map(&map, Units::Index)?;
    let report = IngestReport {
        rows_read,
        rows_rejected,
        gaps_filled: 0,
        date_range: (series.start(), series.end()),
    };
    Ok((series, report))
}

/// Serialize in the NSIDC layout; masked days become sentinel rows.
pub fn write_sie(series: &DailySeries) -> String {
    let mut out = String::new();
    out.push_str(" Year, Month, Day,     Extent,    Missing, Source Data\n");
    out.push_str("  YYYY,    MM,  DD, 10^6 sq km, 10^6 sq km, Source data product web sites\n");
    for i in 0..series.len() {
        let date = series.date_at(i);
        let extent = series.get(i).unwrap_or(SIE_MISSING_SENTINEL);
        let _ = writeln!(
            out,
            "{:5}, {:5}, {:3}, {:>10}, {:>10}, ['generated']",
            date.year(),
            date.month(),
            date.day(),
            extent,
            "0.000"
        );
    }
    out
}

/// Serialize in the NOAA layout; masked days are omitted.
pub fn write_nao(series: &DailySeries) -> String {
    let mut out = String::new();
    for (i, v) in series.observed() {
        let date = series.date_at(i);
        let _ = writeln!(out, "{} {:2} {:2} {}", date.year(), date.month(), date.day(), v);
    }
    out
}

/// Re-grid two series onto the common calendar `[from, to]`.
pub fn align(
    a: &DailySeries,
    b: &DailySeries,
    from: CalendarDate,
    to: CalendarDate,
) -> Result<(DailySeries, DailySeries)> {
    if from > to {
        return Err(Error::Range(format!("start {from} is after end {to}")));
    }
    let regrid = |s: &DailySeries, name: &str| -> Result<DailySeries> {
        if s.end() < from || s.start() > to {
            return Err(Error::Range(format!(
                "{name} series ({} .. {}) does not overlap {from} .. {to}",
                s.start(),
                s.end()
            )));
        }
        let len = from.days_until(to) as usize + 1;
        let values: Vec<Option<f64>> = (0..len)
            .map(|i| s.get_date(from.add_days(i as i64)))
            .collect();
        DailySeries::from_options(from, &values, s.units())
    };
    Ok((regrid(a, "first")?, regrid(b, "second")?))
}

/// Interpolate isolated single-day gaps strictly before `until` with the mean
/// of their two observed neighbours.
pub fn fill_alternate_days(s: &DailySeries, until: CalendarDate) -> (DailySeries, IngestReport) {
    let mut values = s.values.clone();
    let mut mask = s.mask.clone();
    let mut filled = 0;
    for i in 1..s.len().saturating_sub(1) {
        if s.mask[i] || !s.mask[i - 1] || !s.mask[i + 1] || s.date_at(i) >= until {
            continue;
        }
        values[i] = 0.5 * (s.values[i - 1] + s.values[i + 1]);
        mask[i] = true;
        filled += 1;
    }
    let series = DailySeries { start: s.start, values, mask, units: s.units };
    let report = IngestReport {
        rows_read: s.len(),
        rows_rejected: 0,
        gaps_filled: filled,
        date_range: (s.start(), s.end()),
    };
    (series, report)
}
