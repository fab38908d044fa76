//! Two-sided tail probabilities of the standard normal and Student t
//! distributions, via the regularized incomplete gamma and beta functions.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma_ur;

/// `P(|Z| >= |z|)` for a standard normal `Z`.
pub fn normal_two_sided(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == 0.0 {
        return 1.0;
    }
    if z.is_infinite() {
        return 0.0;
    }
    // erfc(|z| / sqrt 2) == Q(1/2, z^2 / 2)
    gamma_ur(0.5, z * z / 2.0).clamp(0.0, 1.0)
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() || !(df > 0.0) {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}
