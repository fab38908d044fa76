use serde::Serialize;

use super::descriptive::{mean, sample_stdev};
use super::dist::{normal_two_sided, student_t_two_sided};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestKind {
    ZProportions,
    TIndependent,
    MannWhitney,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::ZProportions => "z_proportions",
            TestKind::TIndependent => "t_independent",
            TestKind::MannWhitney => "mann_whitney",
        }
    }
}

/// A test statistic with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult<T> {
    pub statistic: T,
    pub p_value: T,
    pub kind: TestKind,
}

/// Two-proportion z-test with pooled variance. Positive when `k1/n1 > k2/n2`.
pub fn z_test_proportions<T: Scalar>(k1: u64, n1: u64, k2: u64, n2: u64) -> Result<TestResult<T>> {
    if n1 == 0 || n2 == 0 || k1 > n1 || k2 > n2 {
        return Err(Error::InvalidInput(format!(
            "invalid proportions {k1}/{n1} vs {k2}/{n2}"
        )));
    }
    let (k1, n1, k2, n2) = (k1 as f64, n1 as f64, k2 as f64, n2 as f64);
    let pooled = (k1 + k2) / (n1 + n2);
    if pooled == 0.0 || pooled == 1.0 {
        return Err(Error::Degenerate(format!(
            "pooled proportion is {pooled}; z undefined"
        )));
    }
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    let z = (k1 / n1 - k2 / n2) / se;
    Ok(TestResult {
        statistic: T::lit(z),
        p_value: T::lit(normal_two_sided(z)),
        kind: TestKind::ZProportions,
    })
}

/// Student's t-test for independent samples with pooled variance,
/// `nA + nB - 2` degrees of freedom. Positive when `mean(a) > mean(b)`.
pub fn t_test_independent<T: Scalar>(a: &[T], b: &[T]) -> Result<TestResult<T>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (
        sample_stdev(a).as_f64().powi(2),
        sample_stdev(b).as_f64().powi(2),
    );
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
    if !(pooled > 0.0) {
        return Err(Error::Degenerate(
            "pooled variance is zero; t undefined".into(),
        ));
    }
    let diff = mean(a).as_f64() - mean(b).as_f64();
    let t = diff / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(TestResult {
        statistic: T::lit(t),
        p_value: T::lit(student_t_two_sided(t, df)),
        kind: TestKind::TIndependent,
    })
}

/// Mann-Whitney U test, normal approximation with tie and continuity
/// corrections. The statistic is U for sample `a`.
pub fn mann_whitney_u<T: Scalar>(a: &[T], b: &[T]) -> Result<TestResult<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "Mann-Whitney U needs two nonempty samples".into(),
        ));
    }
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|v| (v.as_f64(), true))
        .chain(b.iter().map(|v| (v.as_f64(), false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();
    let (n1, n2) = (a.len() as f64, b.len() as f64);

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        let ties = (j - i + 1) as f64;
        tie_term += ties * ties * ties - ties;
        rank_sum_a += midrank * pooled[i..=j].iter().filter(|(_, in_a)| *in_a).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let nf = n as f64;
    let variance = n1 * n2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if !(variance > 0.0) {
        return Err(Error::Degenerate(
            "all values tied; Mann-Whitney U undefined".into(),
        ));
    }
    let centered = u - n1 * n2 / 2.0;
    let z = (centered.abs() - 0.5).max(0.0) / variance.sqrt();
    Ok(TestResult {
        statistic: T::lit(u),
        p_value: T::lit(normal_two_sided(z)),
        kind: TestKind::MannWhitney,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn equal_proportions() {
        let r = z_test_proportions::<f64>(10, 40, 5, 20).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn z_reference() {
        // pooled p = 0.25, se = sqrt(0.25 * 0.75 * 0.02), z = 0.1 / se
        let r = z_test_proportions::<f64>(30, 100, 20, 100).unwrap();
        let hand = 0.1 / (0.25f64 * 0.75 * 0.02).sqrt();
        assert_abs_diff_eq!(r.statistic, hand, epsilon = 1e-12);
        assert_abs_diff_eq!(r.statistic, 1.633, epsilon = 1e-3);
        assert_abs_diff_eq!(r.p_value, 0.10247043485974941, epsilon = 1e-10);
    }

    #[test]
    fn z_degenerate_pool() {
        assert!(matches!(
            z_test_proportions::<f64>(0, 10, 0, 12),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            z_test_proportions::<f64>(10, 10, 12, 12),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            z_test_proportions::<f64>(11, 10, 1, 12),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn identical_samples() {
        let r = t_test_independent(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn separated_samples_are_significant() {
        let r = t_test_independent(&[1.0, 2.0, 3.0], &[11.0, 12.0, 13.0]).unwrap();
        assert!(r.statistic < -10.0 && r.p_value < 0.01);
    }

    #[test]
    fn t_reference() {
        let a = [1.2, 3.4, 2.2, 5.0, 0.7, 2.9];
        let b = [2.5, 4.1, 3.3, 6.0, 4.4];
        let r = t_test_independent(&a, &b).unwrap();
        assert_abs_diff_eq!(r.statistic, -1.692641517468241, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 0.12477418005592864, epsilon = 1e-10);
    }

    #[test]
    fn t_degenerate_variance() {
        assert!(matches!(
            t_test_independent(&[2.0, 2.0], &[2.0, 2.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(t_test_independent(&[2.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn mann_whitney_reference() {
        let a = [1.2, 3.4, 2.2, 5.0, 0.7, 2.9];
        let b = [2.5, 4.1, 3.3, 6.0, 4.4];
        let r = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(r.statistic, 7.0);
        assert_abs_diff_eq!(r.p_value, 0.17090352023079747, epsilon = 1e-10);
    }

    /// Textbook formula: t = (ma - mb) / sqrt(((SSa + SSb) / df) * (1/na + 1/nb)).
    fn textbook_t(a: &[f64], b: &[f64]) -> f64 {
        let m = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let ss = |x: &[f64]| {
            let sum: f64 = x.iter().sum();
            let sq: f64 = x.iter().map(|v| v * v).sum();
            sq - sum * sum / x.len() as f64
        };
        let (na, nb) = (a.len() as f64, b.len() as f64);
        (m(a) - m(b)) / (((ss(a) + ss(b)) / (na + nb - 2.0)) * (1.0 / na + 1.0 / nb)).sqrt()
    }

    proptest! {
        #[test]
        fn t_matches_textbook(a in prop::collection::vec(0.0f64..10.0, 2..30), b in prop::collection::vec(0.0f64..10.0, 2..30)) {
            let r = t_test_independent(&a, &b).unwrap();
            prop_assert!((r.statistic - textbook_t(&a, &b)).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }

        #[test]
        fn t_shift_direction(a in prop::collection::vec(0.0f64..10.0, 3..20), shift in 0.5f64..5.0) {
            let b: Vec<f64> = a.iter().map(|v| v + shift).collect();
            prop_assume!(sample_stdev(&a) > 1e-6);
            let r = t_test_independent(&a, &b).unwrap();
            prop_assert!(r.statistic < 0.0);
            let wider: Vec<f64> = a.iter().map(|v| v + 2.0 * shift).collect();
            let r2 = t_test_independent(&a, &wider).unwrap();
            prop_assert!(r2.p_value <= r.p_value);
        }

        #[test]
        fn z_antisymmetric(n1 in 1u64..200, n2 in 1u64..200, f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
            let k1 = (f1 * n1 as f64) as u64;
            let k2 = (f2 * n2 as f64) as u64;
            if let Ok(ab) = z_test_proportions::<f64>(k1, n1, k2, n2) {
                let ba = z_test_proportions::<f64>(k2, n2, k1, n1).unwrap();
                prop_assert_eq!(ab.statistic, -ba.statistic);
                prop_assert_eq!(ab.p_value, ba.p_value);
                prop_assert!((0.0..=1.0).contains(&ab.p_value));
            }
        }
    }
}
