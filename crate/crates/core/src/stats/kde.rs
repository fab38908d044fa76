use serde::Serialize;

use super::descriptive::{quantile_sorted, sample_stdev, sorted_copy};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Density of log values evaluated on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve<T> {
    pub grid: Vec<T>,
    pub density: Vec<T>,
    pub bandwidth: T,
}

/// `K(u) = 0.75 (1 - u^2)` on `|u| <= 1`, zero elsewhere.
pub fn epanechnikov<T: Scalar>(u: T) -> T {
    if u.abs() <= T::one() {
        T::lit(0.75) * (T::one() - u * u)
    } else {
        T::zero()
    }
}

/// Silverman's rule of thumb, `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`,
/// falling back to `sd` when the IQR is zero. Zero when the data has no spread.
pub fn silverman_bandwidth<T: Scalar>(data: &[T]) -> T {
    if data.len() < 2 {
        return T::zero();
    }
    let sorted = sorted_copy(data);
    let sd = sample_stdev(data);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > T::zero() {
        sd.min(iqr / T::lit(1.34))
    } else {
        sd
    };
    T::lit(0.9) * spread * T::from_count(data.len()).powf(T::lit(-0.2))
}

/// Epanechnikov kernel density estimate of `ln(values)`.
///
/// The grid has `grid_points` equally spaced points from `min - h` to
/// `max + h`, so it covers the whole support. Values must be strictly
/// positive; zeros are expected to be removed by the caller.
pub fn epanechnikov_kde<T: Scalar>(
    values: &[T],
    grid_points: usize,
    bandwidth: Option<T>,
) -> Result<DensityCurve<T>> {
    if values.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "KDE needs at least 2 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !(*v > T::zero() && v.is_finite())) {
        return Err(Error::InvalidInput(
            "KDE values must be finite and strictly positive".into(),
        ));
    }
    if grid_points < 2 {
        return Err(Error::Config(format!(
            "KDE grid needs at least 2 points, got {grid_points}"
        )));
    }
    let logs: Vec<T> = values.iter().map(|v| v.ln()).collect();
    let h = match bandwidth {
        Some(h) if h > T::zero() && h.is_finite() => h,
        Some(h) => {
            return Err(Error::Config(format!(
                "KDE bandwidth must be positive, got {h}"
            )))
        }
        None => {
            let h = silverman_bandwidth(&logs);
            if !(h > T::zero()) {
                return Err(Error::Degenerate(
                    "all KDE values are equal; supply a bandwidth".into(),
                ));
            }
            h
        }
    };

    let lo = logs.iter().copied().fold(T::infinity(), T::min) - h;
    let hi = logs.iter().copied().fold(T::neg_infinity(), T::max) + h;
    let steps = T::from_count(grid_points - 1);
    let scale = T::one() / (T::from_count(logs.len()) * h);
    let grid: Vec<T> = (0..grid_points)
        .map(|i| {
            let t = T::from_count(i) / steps;
            lo * (T::one() - t) + hi * t
        })
        .collect();
    let density = grid
        .iter()
        .map(|&x| logs.iter().map(|&xi| epanechnikov((x - xi) / h)).sum::<T>() * scale)
        .collect();
    Ok(DensityCurve {
        grid,
        density,
        bandwidth: h,
    })
}
