use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(Π v)^(1/n)`, computed in log space. Any zero makes the result zero.
pub fn geometric_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("geometric mean of an empty list"));
    }
    if values.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::Domain("geometric mean of a negative value"));
    }
    if values.contains(&0.0) {
        return Ok(0.0);
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Ok(first);
    }
    let log_sum: f64 = values.iter().map(|&v| libm::log(v)).sum();
    Ok(libm::exp(log_sum / values.len() as f64))
}

/// Distribution summary of a per-organization quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    /// Bin index → count, with bin `k` covering `[k * width, (k + 1) * width)`.
    pub histogram: BTreeMap<u64, u64>,
}

impl Summary {
    pub fn of(values: &[f64], bin_width: f64) -> Self {
        if values.is_empty() {
            return Self {
                mean: 0.0,
                median: 0.0,
                max: 0.0,
                histogram: BTreeMap::new(),
            };
        }
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        let mut histogram = BTreeMap::new();
        for &v in values {
            let bin = libm::floor(v / bin_width) as u64;
            *histogram.entry(bin).or_insert(0) += 1;
        }
        Self {
            mean: values.iter().sum::<f64>() / n as f64,
            median,
            max: sorted[n - 1],
            histogram,
        }
    }

    pub fn histogram_total(&self) -> u64 {
        self.histogram.values().sum()
    }
}
