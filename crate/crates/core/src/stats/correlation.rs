use serde::Serialize;

use super::descriptive::{mean, sample_stdev};
use super::dist::student_t_two_sided;
use crate::corpus::Gender;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointBiserialResult<T> {
    /// Positive when the male mean exceeds the female mean.
    pub r_pb: T,
    pub n_m: usize,
    pub n_f: usize,
    pub n: usize,
    /// `r * sqrt((N - 2) / (1 - r^2))` on `N - 2` degrees of freedom.
    pub t_stat: T,
    /// Two-sided.
    pub p_value: T,
}

/// Point-biserial correlation between FSS and gender (male = 1):
///
/// `r_pb = (mean_M - mean_F) / SD * sqrt(n_M * n_F / (N * (N - 1)))`
///
/// with `SD` the sample standard deviation of all values, which makes `r_pb`
/// identical to the Pearson correlation with a 0/1 male indicator.
pub fn point_biserial<T: Scalar>(fss: &[T], gender: &[Gender]) -> Result<PointBiserialResult<T>> {
    if fss.len() != gender.len() {
        return Err(Error::InvalidInput(format!(
            "{} values but {} genders",
            fss.len(),
            gender.len()
        )));
    }
    let male: Vec<T> = fss
        .iter()
        .zip(gender)
        .filter(|(_, g)| **g == Gender::M)
        .map(|(v, _)| *v)
        .collect();
    let female: Vec<T> = fss
        .iter()
        .zip(gender)
        .filter(|(_, g)| **g == Gender::F)
        .map(|(v, _)| *v)
        .collect();
    let (n_m, n_f, n) = (male.len(), female.len(), fss.len());
    if n_m < 2 || n_f < 2 {
        return Err(Error::Degenerate(format!(
            "point-biserial needs 2+ of each gender, got {n_m} M and {n_f} F"
        )));
    }
    let sd = sample_stdev(fss);
    if !(sd > T::zero()) {
        return Err(Error::Degenerate(
            "FSS has zero spread; point-biserial undefined".into(),
        ));
    }
    let weight = (T::from_count(n_m) * T::from_count(n_f)
        / (T::from_count(n) * T::from_count(n - 1)))
    .sqrt();
    let r = ((mean(&male) - mean(&female)) / sd * weight)
        .max(-T::one())
        .min(T::one());

    let df = n - 2;
    let one_minus = T::one() - r * r;
    let t_stat = if one_minus > T::zero() {
        r * (T::from_count(df) / one_minus).sqrt()
    } else {
        r.signum() * T::infinity()
    };
    let p_value = T::lit(student_t_two_sided(t_stat.as_f64(), df as f64));
    Ok(PointBiserialResult {
        r_pb: r,
        n_m,
        n_f,
        n,
        t_stat,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn equal_means_give_zero() {
        let fss = [1.0, 3.0, 1.0, 3.0];
        let g = [Gender::F, Gender::F, Gender::M, Gender::M];
        assert_eq!(point_biserial(&fss, &g).unwrap().r_pb, 0.0);
    }

    #[test]
    fn matches_pearson_on_mixed_sample() {
        let fss = [0.0, 0.4, 1.3, 0.2, 2.5, 0.9, 0.0, 3.1];
        let g = [
            Gender::F,
            Gender::M,
            Gender::M,
            Gender::F,
            Gender::M,
            Gender::F,
            Gender::F,
            Gender::M,
        ];
        let indicator: Vec<f64> = g
            .iter()
            .map(|g| if *g == Gender::M { 1.0 } else { 0.0 })
            .collect();
        let r = point_biserial(&fss, &g).unwrap();
        assert!((r.r_pb - pearson(&fss, &indicator)).abs() < 1e-12);
        assert_eq!((r.n_m, r.n_f, r.n), (4, 4, 8));
    }

    #[test]
    fn males_above_females_is_positive() {
        let fss = [0.1, 0.2, 0.3, 1.1, 1.2, 1.3];
        let g = [
            Gender::F,
            Gender::F,
            Gender::F,
            Gender::M,
            Gender::M,
            Gender::M,
        ];
        let r = point_biserial(&fss, &g).unwrap();
        assert!(r.r_pb > 0.0 && r.t_stat > 0.0);
        assert!(r.p_value < 0.05);
    }

    #[test]
    fn degenerate_inputs() {
        let g = [Gender::F, Gender::F, Gender::M, Gender::M];
        assert!(matches!(
            point_biserial(&[1.0; 4], &g),
            Err(Error::Degenerate(_))
        ));
        let one_gender = [Gender::F; 4];
        assert!(matches!(
            point_biserial(&[1.0, 2.0, 3.0, 4.0], &one_gender),
            Err(Error::Degenerate(_))
        ));
        assert!(point_biserial(&[1.0], &g).is_err());
    }
}
