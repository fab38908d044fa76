use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Arithmetic mean; NaN for an empty slice. Accumulates deviations from the
/// first value, so a constant slice returns that constant exactly.
pub fn mean<T: Scalar>(values: &[T]) -> T {
    let Some(&first) = values.first() else {
        return T::nan();
    };
    first + values.iter().map(|v| *v - first).sum::<T>() / T::from_count(values.len())
}

/// Sample (n - 1) standard deviation; zero for fewer than two values.
pub fn sample_stdev<T: Scalar>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let m = mean(values);
    let ss: T = values.iter().map(|v| (*v - m) * (*v - m)).sum();
    (ss / T::from_count(values.len() - 1)).sqrt()
}

/// Linear-interpolation quantile (R type 7) of ascending `sorted`.
pub fn quantile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = T::lit(h - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn median_sorted<T: Scalar>(sorted: &[T]) -> T {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::lit(2.0)
    }
}

pub(crate) fn sorted_copy<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptive<T> {
    pub count: usize,
    /// Percentage (0-100) of values exactly zero.
    pub pct_zero: T,
    pub mean: T,
    pub median: T,
    pub max: T,
    pub stdev: T,
    /// Q3 - Q1 with linear-interpolation quartiles.
    pub iqr: T,
}

pub fn descriptive_stats<T: Scalar>(sample: &[T]) -> Result<Descriptive<T>> {
    if sample.is_empty() {
        return Err(Error::InvalidInput(
            "descriptive statistics of an empty sample".into(),
        ));
    }
    let sorted = sorted_copy(sample);
    let zeros = sample.iter().filter(|v| **v == T::zero()).count();
    Ok(Descriptive {
        count: sample.len(),
        pct_zero: T::lit(100.0) * T::from_count(zeros) / T::from_count(sample.len()),
        mean: mean(sample),
        median: median_sorted(&sorted),
        max: sorted[sorted.len() - 1],
        stdev: sample_stdev(sample),
        iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_sample() {
        let d = descriptive_stats(&[0.0, 0.0, 2.0, 4.0]).unwrap();
        assert_eq!(
            (d.count, d.pct_zero, d.mean, d.median, d.max),
            (4, 50.0, 1.5, 1.0, 4.0)
        );
    }

    #[test]
    fn constant_sample_has_no_spread() {
        let d = descriptive_stats(&[3.0f64; 7]).unwrap();
        assert_eq!((d.stdev, d.iqr), (0.0, 0.0));
    }

    #[test]
    fn fixture_matches_reference() {
        // numpy: mean, median, std(ddof=1), percentile(75) - percentile(25) (linear)
        let xs = [0.3, 0.0, 1.7, 0.25, 4.9, 0.0, 0.8, 2.2, 0.05];
        let d = descriptive_stats(&xs).unwrap();
        assert_abs_diff_eq!(d.mean, 1.1333333333333335, epsilon = 1e-9);
        assert_abs_diff_eq!(d.median, 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(d.stdev, 1.6192204914711275, epsilon = 1e-9);
        assert_abs_diff_eq!(d.iqr, 1.65, epsilon = 1e-9);
        assert_abs_diff_eq!(d.pct_zero, 100.0 * 2.0 / 9.0, epsilon = 1e-9);
        assert_eq!(d.max, 4.9);
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert!(descriptive_stats::<f64>(&[]).is_err());
    }
}
