//! Modified Bessel functions of the second kind, integer order.
//!
//! `K_0` and `K_1` come from their power series for `x ≤ 2` and from the
//! trapezoidal rule applied to `K_ν(x) = ∫₀^∞ exp(-x cosh t) cosh(νt) dt`
//! for `x > 2`. The trapezoidal rule converges geometrically on this
//! integrand, so a fixed step reaches full double precision. Higher orders
//! use the upward recurrence, which is stable for `K`. Values are carried as
//! logarithms so that `K_64(1e-8)` and `K_0(800)` stay representable.

use super::EULER_GAMMA;
use crate::{Error, Result};

const SERIES_LIMIT: f64 = 2.0;

/// `K_n(x)`. Underflows silently to zero for large `x`.
pub fn bessel_k(n: u32, x: f64) -> Result<f64> {
    Ok(ln_bessel_k(n, x)?.exp())
}

/// `ln K_n(x)`.
pub fn ln_bessel_k(n: u32, x: f64) -> Result<f64> {
    let all = ln_bessel_k_orders(n as usize, x)?;
    Ok(all[n as usize])
}

/// `ln K_j(x)` for `j = 0..=max_order`.
pub fn ln_bessel_k_orders(max_order: usize, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "K_n(x) requires finite x > 0, got {x}"
        )));
    }
    let (ln_k0, ln_k1) = if x <= SERIES_LIMIT {
        let (k0, k1) = k01_series(x);
        (k0.ln(), k1.ln())
    } else {
        ln_k01_trapezoid(x)
    };
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(ln_k0);
    if max_order == 0 {
        return Ok(out);
    }
    out.push(ln_k1);
    // ratio[n] = K_{n+1}/K_n obeys ratio[n] = 1/ratio[n-1] + 2n/x
    let mut ratio = (ln_k1 - ln_k0).exp();
    for n in 1..max_order {
        ratio = 1.0 / ratio + 2.0 * n as f64 / x;
        let next = out[n] + ratio.ln();
        out.push(next);
    }
    Ok(out)
}

fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();

    // K0 = -(ln(x/2) + γ) I0 + Σ_{k≥1} H_k q^k / (k!)^2
    // K1 = 1/x + ln(x/2) I1 - (x/4) Σ_{k≥0} (ψ(k+1) + ψ(k+2)) q^k / (k!(k+1)!)
    let mut i0 = 1.0;
    let mut k0_tail = 0.0;
    let mut i1_sum = 1.0;
    let mut k1_tail = 1.0 - 2.0 * EULER_GAMMA; // k = 0: ψ(1) + ψ(2)
    let mut t0 = 1.0; // q^k / (k!)^2
    let mut t1 = 1.0; // q^k / (k!(k+1)!)
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let h_next = harmonic + 1.0 / (kf + 1.0);
        i0 += t0;
        k0_tail += harmonic * t0;
        i1_sum += t1;
        k1_tail += (harmonic + h_next - 2.0 * EULER_GAMMA) * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1_sum {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + k0_tail;
    let i1 = 0.5 * x * i1_sum;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * k1_tail;
    (k0, k1)
}

fn ln_k01_trapezoid(x: f64) -> (f64, f64) {
    // K_ν(x) = e^{-x} ∫₀^∞ exp(-x (cosh t - 1)) cosh(νt) dt
    let h = (0.6 / x.sqrt()).min(0.1);
    let mut j0 = 0.5;
    let mut j1 = 0.5;
    let mut step = 1u32;
    loop {
        let t = step as f64 * h;
        let half_sinh = (0.5 * t).sinh();
        let w = (-2.0 * x * half_sinh * half_sinh).exp();
        j0 += w;
        j1 += w * t.cosh();
        if w * t.cosh() < 1e-18 * j1 {
            break;
        }
        step += 1;
    }
    ((h * j0).ln() - x, (h * j1).ln() - x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_values() {
        // mpmath.besselk, 40 digits
        let cases: [(u32, f64, f64); 17] = [
            (0, 1e-6, 13.931_442_073_626_42),
            (1, 1e-6, 999_999.999_992_784_3),
            (0, 0.2, 1.752_703_855_528_145_8),
            (1, 0.2, 4.775_972_543_220_472),
            (0, 1.999, 0.114_033_830_589_232_91),
            (0, 2.001, 0.113_754_098_736_684_63),
            (1, 2.5, 0.073_890_816_347_747_06),
            (0, 10.0, 1.778_006_231_616_765_2e-5),
            (1, 30.0, 2.167_732_001_891_549_4e-14),
            (2, 0.5, 7.550_183_551_240_869),
            (5, 3.0, 0.937_773_602_386_808),
            (10, 0.01, 1.857_940_439_048_063_6e28),
            (20, 7.5, 97_332.707_426_239_19),
            (64, 1e-3, 1.828_633_402_377_222_4e298),
            (64, 40.0, 12.519_859_924_613_808),
            (3, 50.0, 3.727_936_773_826_211e-23),
            (0, 50.0, 3.410_167_749_789_495_5e-23),
        ];
        for (n, x, want) in cases {
            let got = bessel_k(n, x).unwrap();
            assert!(rel(got, want) < 1e-10, "K_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn large_argument_asymptote() {
        let x: f64 = 30.0;
        let asym = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        let got = bessel_k(0, x).unwrap();
        // K_0 ~ asym (1 - 1/(8x) + 9/(128x²) - ...)
        assert!(rel(got, asym * (1.0 - 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x))) < 1e-5);
        assert!(rel(got, asym) < 1.0 / (8.0 * x) + 1e-6);
    }

    #[test]
    fn small_argument_limit() {
        let x = 0.02;
        let k1 = bessel_k(1, x).unwrap();
        assert!((x * k1 - 1.0).abs() < 2e-3);
    }

    #[test]
    fn recurrence_from_independent_seeds() {
        // K_0, K_1 at x = 2 from mpmath, then upward recurrence by hand.
        let x = 2.0;
        let k0 = 0.113_893_872_749_533_44;
        let k1 = 0.139_865_881_816_522_43;
        let k2 = k0 + (2.0 / x) * k1;
        let k3 = k1 + (4.0 / x) * k2;
        assert!(rel(bessel_k(3, x).unwrap(), k3) < 1e-12);
        assert!(rel(bessel_k(3, x).unwrap(), 0.647_385_390_948_634_2) < 1e-12);
    }

    #[test]
    fn recurrence_residual_on_grid() {
        let mut x = 0.1;
        while x <= 20.0 {
            let k = ln_bessel_k_orders(30, x).unwrap();
            for n in 1..30 {
                let (km, kn, kp) = (k[n - 1].exp(), k[n].exp(), k[n + 1].exp());
                let resid = (kp - km - 2.0 * n as f64 / x * kn).abs() / kp;
                assert!(resid <= 1e-8, "n = {n}, x = {x}: {resid}");
            }
            x += 0.1;
        }
    }

    #[test]
    fn continuous_across_branch() {
        let below = bessel_k(0, SERIES_LIMIT).unwrap();
        let above = bessel_k(0, SERIES_LIMIT * (1.0 + 1e-12)).unwrap();
        assert!(rel(below, above) < 1e-11);
        let below = bessel_k(1, SERIES_LIMIT).unwrap();
        let above = bessel_k(1, SERIES_LIMIT * (1.0 + 1e-12)).unwrap();
        assert!(rel(below, above) < 1e-11);
    }

    #[test]
    fn underflow_is_silent() {
        assert_eq!(bessel_k(2, 1e4).unwrap(), 0.0);
        assert!(ln_bessel_k(2, 1e4).unwrap().is_finite());
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -1.0).is_err());
        assert!(bessel_k(1, f64::NAN).is_err());
    }
}
