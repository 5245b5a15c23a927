//! Multiprecision pieces for sums whose terms cancel to many digits.
//!
//! Only the small-argument regime (`x ≤ 2`) is covered: that is where the
//! outage probability becomes tiny and the f64 evaluation runs out of
//! digits.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::UBig;

pub(crate) type Big = FBig<HalfEven, 2>;

const EULER_DIGITS: &str = "57721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144725";

/// Highest working precision that the stored constants support.
pub(crate) const MAX_BITS: usize = 352;

pub(crate) fn big(x: f64, bits: usize) -> Big {
    Big::try_from(x)
        .expect("finite input")
        .with_precision(bits)
        .value()
}

pub(crate) fn big_int(n: u64, bits: usize) -> Big {
    Big::from(UBig::from(n)).with_precision(bits).value()
}

pub(crate) fn big_factorial(n: u32, bits: usize) -> Big {
    let f: UBig = (1..=u64::from(n)).map(UBig::from).product();
    Big::from(f).with_precision(bits).value()
}

pub(crate) fn euler_gamma(bits: usize) -> Big {
    let digits = EULER_DIGITS.len();
    let num: UBig = EULER_DIGITS.parse().expect("constant digits");
    let den = UBig::from(10u8).pow(digits);
    Big::from(num).with_precision(bits).value() / Big::from(den).with_precision(bits).value()
}

/// `(x/2)^n K_n(x)` for `n = 0..=max_order`, where `q = x²/4 ≤ 1`.
///
/// The scaling removes the `(2/x)^n` growth, so the recurrence becomes
/// `K̃_{n+1} = q K̃_{n-1} + n K̃_n` with all terms positive.
pub(crate) fn scaled_bessel_k_orders(q: &Big, max_order: usize, bits: usize) -> Vec<Big> {
    let one = big(1.0, bits);
    let half = big(0.5, bits);
    let gamma = euler_gamma(bits);
    let ln_half_x = q.ln() * &half;
    let eps = big(2f64.powi(-(bits as i32) - 8), bits);

    // K0 = -(ln(x/2) + γ) I0 + Σ_{k≥1} H_k q^k/(k!)^2
    // (x/2) K1 = 1/2 + ln(x/2) Σ_{k≥0} q^{k+1}/(k!(k+1)!)
    //            - 1/2 Σ_{k≥0} (H_k + H_{k+1} - 2γ) q^{k+1}/(k!(k+1)!)
    let mut i0 = one.clone();
    let mut k0_tail = big(0.0, bits);
    let mut t1 = q.clone(); // q^{k+1}/(k!(k+1)!)
    let mut i1 = t1.clone();
    let mut k1_tail = (&one - &gamma - &gamma) * &t1;
    let mut t0 = one.clone(); // q^k/(k!)^2
    let mut harmonic = big(0.0, bits);
    for k in 1u64..2000 {
        let kb = big_int(k, bits);
        let kp1 = big_int(k + 1, bits);
        t0 = t0 * q / (&kb * &kb);
        t1 = t1 * q / (&kb * &kp1);
        harmonic += &one / &kb;
        let h_next = &harmonic + &one / &kp1;
        i0 += &t0;
        k0_tail += &harmonic * &t0;
        i1 += &t1;
        k1_tail += (&harmonic + &h_next - &gamma - &gamma) * &t1;
        if t0 < &eps * &i0 && t1 < &eps * &i1 {
            break;
        }
    }
    let k0 = k0_tail - (&ln_half_x + &gamma) * i0;
    let k1 = &half + &ln_half_x * i1 - &half * k1_tail;

    let mut out = Vec::with_capacity(max_order + 1);
    out.push(k0);
    if max_order >= 1 {
        out.push(k1);
    }
    for n in 1..max_order {
        let next = q * &out[n - 1] + big_int(n as u64, bits) * &out[n];
        out.push(next);
    }
    out
}
