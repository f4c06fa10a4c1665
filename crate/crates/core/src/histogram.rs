//! Fixed-width histograms used for corpus summaries and prediction
//! distributions.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A fixed-width histogram over real values.
///
/// Bin `i` covers `[i * bin_width, (i + 1) * bin_width)`. Bins are keyed by
/// their integer index so empty bins take no space; iteration order is
/// ascending by bin start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// bin index -> count; the bin covers `[index * bin_width, (index + 1) * bin_width)`.
    pub bins: BTreeMap<i64, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new(bin_width: f64) -> Self {
        assert!(bin_width > 0.0, "bin_width must be positive");
        Histogram {
            bin_width,
            bins: BTreeMap::new(),
            total: 0,
        }
    }

    /// Build a histogram from an iterator of values.
    pub fn from_values<I: IntoIterator<Item = f64>>(bin_width: f64, values: I) -> Self {
        let mut h = Histogram::new(bin_width);
        for v in values {
            h.add(v);
        }
        h
    }

    pub fn add(&mut self, value: f64) {
        let idx = (value / self.bin_width).floor() as i64;
        *self.bins.entry(idx).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn count(&self, bin_index: i64) -> u64 {
        self.bins.get(&bin_index).copied().unwrap_or(0)
    }

    /// Count for the bin containing `value`.
    pub fn count_at(&self, value: f64) -> u64 {
        self.count((value / self.bin_width).floor() as i64)
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Bins as `(lo, hi, count)` rows in ascending order.
    pub fn rows(&self) -> Vec<(f64, f64, u64)> {
        self.bins
            .iter()
            .map(|(&idx, &count)| {
                let lo = idx as f64 * self.bin_width;
                (lo, lo + self.bin_width, count)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_by_floor_of_value_over_width() {
        let h = Histogram::from_values(100.0, vec![120.0, 150.0, 410.0]);
        assert_eq!(h.count(1), 2); // [100, 200)
        assert_eq!(h.count(4), 1); // [400, 500)
        assert_eq!(h.total, 3);
    }

    #[test]
    fn unit_width_mos_example() {
        let h = Histogram::from_values(1.0, vec![1.0, 1.4, 6.9]);
        assert_eq!(h.count(1), 2); // [1, 2)
        assert_eq!(h.count(6), 1); // [6, 7)
        assert_eq!(h.total, 3);
    }

    #[test]
    fn empty_histogram() {
        let h = Histogram::from_values(0.5, std::iter::empty());
        assert!(h.is_empty());
        assert!(h.rows().is_empty());
    }

    #[test]
    fn counts_sum_to_total() {
        let values: Vec<f64> = (0..37).map(|i| i as f64 * 0.37).collect();
        let h = Histogram::from_values(0.5, values);
        assert_eq!(h.bins.values().sum::<u64>(), 37);
        assert_eq!(h.total, 37);
    }
}
