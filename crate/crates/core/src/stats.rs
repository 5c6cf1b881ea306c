//! Rank statistics and classification metrics for the benchmark tests.

use serde::Serialize;

use crate::error::{Error, Result};

/// Cliff's delta: the signed proportion of cross-group comparisons in which
/// an `x` value exceeds a `y` value, in [-1, 1].
///
/// Computed by sorting `y` once and counting, per `x`, how many `y` values
/// lie strictly below and strictly above via binary search. The counts are
/// integers, so the result equals the quadratic all-pairs definition exactly,
/// ties included.
pub fn cliffs_delta(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut sorted_y = y.to_vec();
    sorted_y.sort_by(f64::total_cmp);

    let mut signed: i64 = 0;
    for &v in x {
        let below = sorted_y.partition_point(|&w| w < v) as i64;
        let not_above = sorted_y.partition_point(|&w| w <= v) as i64;
        let above = y.len() as i64 - not_above;
        signed += below - above;
    }
    Ok(signed as f64 / (x.len() as f64 * y.len() as f64))
}

/// Binary classification counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted_positive: bool, actually_positive: bool) {
        match (predicted_positive, actually_positive) {
            (true, true) => self.true_positives += 1,
            (true, false) => self.false_positives += 1,
            (false, false) => self.true_negatives += 1,
            (false, true) => self.false_negatives += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.true_negatives += other.true_negatives;
        self.false_negatives += other.false_negatives;
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    /// tp / (tp + fp); 0 when the denominator is 0.
    pub fn precision(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_positives)
    }

    /// tp / (tp + fn); 0 when the denominator is 0.
    pub fn recall(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_negatives)
    }

    /// Matthews correlation coefficient; 0 when any marginal is empty.
    pub fn mcc(&self) -> f64 {
        let tp = self.true_positives as f64;
        let fp = self.false_positives as f64;
        let tn = self.true_negatives as f64;
        let fned = self.false_negatives as f64;
        let denom = (tp + fp) * (tp + fned) * (tn + fp) * (tn + fned);
        if denom == 0.0 {
            return 0.0;
        }
        (tp * tn - fp * fned) / denom.sqrt()
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Convenience tuple of the three report metrics.
pub fn precision_recall_mcc(cm: &ConfusionMatrix) -> (f64, f64, f64) {
    (cm.precision(), cm.recall(), cm.mcc())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    /// count / (total · bin width); integrates to the in-range fraction.
    pub density: f64,
}

/// Uniform-bin density histogram with a single overflow bucket for values
/// outside the range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub overflow: u64,
    pub total: u64,
}

impl Histogram {
    /// Fraction of values that fell outside [lo, hi].
    pub fn overflow_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.overflow as f64 / self.total as f64
        }
    }
}

/// Bins `values` into `bin_count` uniform bins over [lo, hi]. The final bin
/// is closed at `hi`; values below `lo` or above `hi` land in the overflow
/// bucket.
pub fn density_histogram(
    values: &[f64],
    bin_count: usize,
    lo: f64,
    hi: f64,
) -> Result<Histogram> {
    if bin_count == 0 {
        return Err(Error::ZeroBins);
    }
    // Also rejects NaN bounds, which no comparison orders before `hi`.
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidRange { lo, hi });
    }
    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0u64; bin_count];
    let mut overflow = 0u64;
    for &v in values {
        if v < lo || v > hi {
            overflow += 1;
            continue;
        }
        let mut k = ((v - lo) / width) as usize;
        if k >= bin_count {
            k = bin_count - 1;
        }
        counts[k] += 1;
    }
    let total = values.len() as u64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(k, &count)| HistogramBin {
            lo: lo + k as f64 * width,
            hi: lo + (k + 1) as f64 * width,
            count,
            density: if total == 0 {
                0.0
            } else {
                count as f64 / (total as f64 * width)
            },
        })
        .collect();
    Ok(Histogram {
        bins,
        overflow,
        total,
    })
}
