//! Long-memory, stationarity and skewness diagnostics for daily series.

mod adf;
mod correlogram;
mod hurst;
mod skew;

pub use adf::{adf_critical_values, adf_test, AdfResult};
pub use correlogram::{acf, ccf, Correlogram, CorrelogramPoint};
pub use hurst::{expected_rescaled_range, hurst, rescaled_range, HurstReport};
pub use skew::{skew_summary, BucketId, BucketSummary, Bucketing, SkewSummary, MIN_BUCKET_SIZE};
