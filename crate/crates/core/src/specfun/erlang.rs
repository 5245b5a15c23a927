//! Gamma distribution with integer shape (Erlang), parameterized by scale.

use super::gamma::ln_factorial;

/// `P[X ≤ t]` for `X ~ Gamma(shape, scale)`. Accurate in both tails: the
/// lower tail is summed directly instead of being formed as `1 - survival`.
pub fn erlang_cdf(shape: u32, scale: f64, t: f64) -> f64 {
    debug_assert!(shape >= 1 && scale > 0.0);
    if t <= 0.0 {
        return 0.0;
    }
    let z = t / scale;
    if z.is_infinite() {
        return 1.0;
    }
    if z < f64::from(shape) {
        lower_series(shape, z)
    } else {
        1.0 - upper_sum(shape, z)
    }
}

/// `P[X > t]`, the complement of [`erlang_cdf`].
pub fn erlang_sf(shape: u32, scale: f64, t: f64) -> f64 {
    debug_assert!(shape >= 1 && scale > 0.0);
    if t <= 0.0 {
        return 1.0;
    }
    let z = t / scale;
    if z.is_infinite() {
        return 0.0;
    }
    if z < f64::from(shape) {
        1.0 - lower_series(shape, z)
    } else {
        upper_sum(shape, z)
    }
}

/// Density `t^{k-1} e^{-t/θ} / (Γ(k) θ^k)`.
pub fn erlang_pdf(shape: u32, scale: f64, t: f64) -> f64 {
    debug_assert!(shape >= 1 && scale > 0.0);
    if t < 0.0 {
        return 0.0;
    }
    if t == 0.0 {
        return if shape == 1 { 1.0 / scale } else { 0.0 };
    }
    let k = f64::from(shape);
    ((k - 1.0) * t.ln() - t / scale - ln_factorial(shape - 1) - k * scale.ln()).exp()
}

// e^{-z} Σ_{j≥k} z^j / j!
fn lower_series(k: u32, z: f64) -> f64 {
    let lead = (f64::from(k) * z.ln() - z - ln_factorial(k)).exp();
    if lead == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = f64::from(k);
    loop {
        j += 1.0;
        term *= z / j;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    lead * sum
}

// e^{-z} Σ_{j<k} z^j / j!
fn upper_sum(k: u32, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k {
        term *= z / f64::from(j);
        sum += term;
    }
    // exp(-z) can underflow while the product does not
    (sum.ln() - z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_interval, integrate_semi_infinite, QuadratureSpec};

    #[test]
    fn exponential_case() {
        for t in [0.1, 1.0, 3.7, 40.0] {
            let want = -(-t / 2.5f64).exp_m1();
            assert!((erlang_cdf(1, 2.5, t) - want).abs() < 1e-15);
        }
        assert_eq!(erlang_cdf(4, 1.0, 0.0), 0.0);
        assert_eq!(erlang_cdf(4, 1.0, -2.0), 0.0);
    }

    #[test]
    fn shape_two_by_hand_and_by_quadrature() {
        let want = 1.0 - (-3f64).exp() * 4.0;
        assert!((erlang_cdf(2, 1.0, 3.0) - want).abs() < 1e-15);
        let spec = QuadratureSpec::new(1e-13, 1e-13, 200).unwrap();
        let integral = integrate_interval(|x| x * (-x).exp(), 0.0, 3.0, &spec).unwrap();
        assert!((integral - want).abs() < 1e-12);
    }

    #[test]
    fn pdf_special_cases_and_normalization() {
        for t in [0.2, 1.0, 5.0] {
            assert!((erlang_pdf(1, 1.0, t) - (-t).exp()).abs() < 1e-15);
        }
        let spec = QuadratureSpec::default();
        for (k, theta) in [(1, 0.5), (2, 1.0), (6, 3.0), (24, 0.1)] {
            let total = integrate_semi_infinite(|t| erlang_pdf(k, theta, t), &spec).unwrap();
            assert!((total - 1.0).abs() < 1e-9, "k = {k}: {total}");
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        for (k, theta, t) in [(1, 1.0, 0.7), (3, 2.0, 4.5), (8, 0.5, 3.9), (2, 10.0, 0.3)] {
            let h = 1e-5 * t;
            let fd = (erlang_cdf(k, theta, t + h) - erlang_cdf(k, theta, t - h)) / (2.0 * h);
            assert!((fd - erlang_pdf(k, theta, t)).abs() < 1e-6);
        }
    }

    #[test]
    fn lower_tail_has_full_relative_precision() {
        // P[Gamma(4,1) ≤ 1e-6] ≈ 1e-24 / 24
        let p = erlang_cdf(4, 1.0, 1e-6);
        assert!((p / (1e-24 / 24.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn branches_meet() {
        for k in [1u32, 3, 10, 64] {
            let z = f64::from(k);
            let below = erlang_cdf(k, 1.0, z * (1.0 - 1e-13));
            let at = erlang_cdf(k, 1.0, z);
            assert!((below - at).abs() < 1e-11);
        }
    }

    #[test]
    fn complement_identity() {
        for k in [1u32, 2, 5, 12, 64] {
            for t in [1e-3, 0.5, 2.0, 11.0, 70.0, 300.0] {
                let s = erlang_cdf(k, 1.5, t) + erlang_sf(k, 1.5, t);
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }
}
