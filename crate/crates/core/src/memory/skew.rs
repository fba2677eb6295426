use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::DailySeries;

/// Buckets with fewer observations are skipped.
pub const MIN_BUCKET_SIZE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucketing {
    Yearly,
    Monthly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketId {
    Yearly(i32),
    Monthly(i32, u32),
}

impl fmt::Display for BucketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BucketId::Yearly(y) => write!(f, "{y}"),
            BucketId::Monthly(y, m) => write!(f, "{y}-{m:02}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub bucket: BucketId,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub mean_minus_median: f64,
    /// Standard error of the mean, `sd / √count`.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewSummary {
    pub bucketing: Bucketing,
    pub buckets: Vec<BucketSummary>,
    /// Human-readable notes for buckets that were skipped.
    pub notes: Vec<String>,
    pub median_above_mean: usize,
    pub median_below_mean: usize,
}

impl SkewSummary {
    /// Fraction of reported buckets whose median exceeds their mean.
    pub fn median_above_fraction(&self) -> f64 {
        if self.buckets.is_empty() {
            return 0.0;
        }
        self.median_above_mean as f64 / self.buckets.len() as f64
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Mean, median and their difference per calendar bucket.
pub fn skew_summary(s: &DailySeries, bucketing: Bucketing) -> Result<SkewSummary> {
    if s.observed_count() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut groups: BTreeMap<BucketId, Vec<f64>> = BTreeMap::new();
    for (i, v) in s.observed() {
        let d = s.date_at(i);
        let id = match bucketing {
            Bucketing::Yearly => BucketId::Yearly(d.year()),
            Bucketing::Monthly => BucketId::Monthly(d.year(), d.month()),
        };
        groups.entry(id).or_default().push(v);
    }

    let mut buckets = Vec::new();
    let mut notes = Vec::new();
    for (bucket, mut values) in groups {
        let count = values.len();
        if count < MIN_BUCKET_SIZE {
            notes.push(format!("bucket {bucket} skipped: {count} observations"));
            continue;
        }
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let median = median(&values);
        buckets.push(BucketSummary {
            bucket,
            count,
            mean,
            median,
            mean_minus_median: mean - median,
            std_error: (var / count as f64).sqrt(),
        });
    }
    let median_above_mean = buckets.iter().filter(|b| b.median > b.mean).count();
    let median_below_mean = buckets.iter().filter(|b| b.median < b.mean).count();
    Ok(SkewSummary { bucketing, buckets, notes, median_above_mean, median_below_mean })
}
