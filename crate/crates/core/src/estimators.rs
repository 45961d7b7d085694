//! Receiver-side aggregation rules.
//!
//! Three estimators are supported: plain averaging, rejection averaging
//! (drop the `level` smallest and `level` largest reports, then average), and
//! the median. [`trim_level_for_median`] gives the rejection level at which
//! the trimmed estimator coincides with the median.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Receiver aggregation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum EstimatorSpec {
    /// Arithmetic mean of all reports.
    Mean,
    /// Discard the `level` smallest and `level` largest reports, average the rest.
    Trimmed { level: usize },
    /// Middle order statistic; mean of the two middle ones for even counts.
    Median,
}

impl EstimatorSpec {
    /// Applies the rule to a report list.
    pub fn estimate(&self, reports: &[f64]) -> Result<f64> {
        match *self {
            EstimatorSpec::Mean => mean_estimate(reports),
            EstimatorSpec::Trimmed { level } => trimmed_estimate(reports, level),
            EstimatorSpec::Median => median_estimate(reports),
        }
    }

    /// Checks that `report_count` reports are enough for this rule.
    pub fn validate_for(&self, report_count: usize) -> Result<()> {
        match *self {
            EstimatorSpec::Trimmed { level } if report_count < 2 * level + 1 => {
                Err(Error::TrimLevelTooHigh {
                    reports: report_count,
                    level,
                })
            }
            _ if report_count == 0 => Err(Error::EmptyReports),
            _ => Ok(()),
        }
    }

    /// Short lowercase tag, used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorSpec::Mean => "mean",
            EstimatorSpec::Trimmed { .. } => "trimmed",
            EstimatorSpec::Median => "median",
        }
    }
}

/// Rejects empty or NaN-bearing input and returns an ascending copy.
/// Infinities are legal report values and sort to the extremes.
fn checked_sorted(reports: &[f64]) -> Result<Vec<f64>> {
    if reports.is_empty() {
        return Err(Error::EmptyReports);
    }
    if let Some(index) = reports.iter().position(|v| v.is_nan()) {
        return Err(Error::NanReport { index });
    }
    let mut sorted = reports.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(sorted)
}

/// Mean of an ascending slice, summed in ascending order. Unanimous inputs
/// short-circuit to the common value so they are reproduced without rounding.
fn mean_of_sorted(sorted: &[f64]) -> f64 {
    let first = sorted[0];
    if first == sorted[sorted.len() - 1] {
        return first;
    }
    let mut sum = 0.0;
    for &v in sorted {
        sum += v;
    }
    sum / sorted.len() as f64
}

/// Arithmetic mean of all reports.
pub fn mean_estimate(reports: &[f64]) -> Result<f64> {
    Ok(mean_of_sorted(&checked_sorted(reports)?))
}

/// Mean of the reports that survive dropping the `level` smallest and the
/// `level` largest. `level = 0` agrees with [`mean_estimate`] exactly.
pub fn trimmed_estimate(reports: &[f64], level: usize) -> Result<f64> {
    let sorted = checked_sorted(reports)?;
    let m = sorted.len();
    if m < 2 * level + 1 {
        return Err(Error::TrimLevelTooHigh { reports: m, level });
    }
    Ok(mean_of_sorted(&sorted[level..m - level]))
}

/// Middle order statistic for odd counts; mean of the two middle order
/// statistics for even counts.
pub fn median_estimate(reports: &[f64]) -> Result<f64> {
    let sorted = checked_sorted(reports)?;
    let m = sorted.len();
    if m % 2 == 1 {
        Ok(sorted[m / 2])
    } else {
        let lo = sorted[m / 2 - 1];
        let hi = sorted[m / 2];
        if lo == hi {
            Ok(lo)
        } else {
            Ok((lo + hi) / 2.0)
        }
    }
}

/// Rejection level at which the trimmed estimator equals the median for
/// `count` reports: `(count - 2) / 2` for even counts, `(count - 1) / 2` for
/// odd ones — `(count - 1) / 2` in integer arithmetic either way.
pub fn trim_level_for_median(count: usize) -> Result<usize> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "median/trimmed equivalence needs at least 2 reports, got {count}"
        )));
    }
    Ok((count - 1) / 2)
}
