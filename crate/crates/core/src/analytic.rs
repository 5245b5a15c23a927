//! Closed-form secrecy outage probability (SOP), the distribution of the
//! destination SINR under the optimal split, average secrecy rate (ASR)
//! and the high-SNR outage bounds.
//!
//! The outage expressions are of the form `1 - Σ (positive terms)`. Each
//! term is assembled in log space (log-factorials, powers and `ln K_n`)
//! before exponentiation. When the result drops below
//! [`PRECISE_THRESHOLD`] the f64 sum has cancelled most of its digits, and
//! the single-link SOP is re-evaluated in multiprecision arithmetic with
//! the working precision raised until enough significant bits survive.

use serde::{Deserialize, Serialize};

use crate::channel::{mean_path_loss, Endpoint, LinkBudget, Scenario};
use crate::specfun::precise::{self, big, big_factorial, Big, MAX_BITS};
use crate::specfun::{
    integrate_semi_infinite_scaled, ln_bessel_k_orders, ln_binomial, ln_factorial, QuadratureSpec,
};
use crate::{Error, Result};

/// Below this value the f64 outage sum is replaced by the multiprecision one.
pub const PRECISE_THRESHOLD: f64 = 1e-6;

/// Largest supported `N·m`.
pub const MAX_SHAPE: u32 = 64;

const LN_2: f64 = std::f64::consts::LN_2;

fn check_shapes(m: u32, n: u32) -> Result<u32> {
    if m == 0 {
        return Err(Error::invalid("m", "must be ≥ 1"));
    }
    if n == 0 {
        return Err(Error::invalid("n_antennas", "must be ≥ 1"));
    }
    let nm = m
        .checked_mul(n)
        .filter(|&v| v <= MAX_SHAPE)
        .ok_or_else(|| Error::invalid("n_antennas", format!("N·m must not exceed {MAX_SHAPE}")))?;
    Ok(nm)
}

/// How the network SOP combines the per-relay outage probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SopMode {
    /// Product over the actual per-relay SOPs (independent fading).
    Exact,
    /// First relay's SOP raised to `R` (relays with similar path loss).
    Approximate,
}

/// Outage probability `P[Γ_D < 1 + 1/Γ_S]` of one relay path under the
/// optimal power split.
pub fn sop_single_link(budget: &LinkBudget, m: u32, n: u32) -> Result<f64> {
    let nm = check_shapes(m, n)?;
    let coarse = sop_single_link_f64(budget, m, nm)?;
    if coarse >= PRECISE_THRESHOLD {
        return Ok(coarse.min(1.0));
    }
    // The multiprecision kernel covers x = 2/√(γ̄_S γ̄_D) ≤ 2, which is the
    // only regime where the outage probability can get this small.
    if budget.gbar_s * budget.gbar_d < 1.0 {
        return Ok(coarse.clamp(0.0, 1.0));
    }
    Ok(sop_single_link_precise(budget, m, nm))
}

fn sop_single_link_f64(budget: &LinkBudget, m: u32, nm: u32) -> Result<f64> {
    let (gs, gd) = (budget.gbar_s, budget.gbar_d);
    let x = 2.0 / (gs * gd).sqrt();
    if !x.is_finite() {
        return Ok(1.0);
    }
    let max_order = m.max(nm.saturating_sub(1 + m)) as usize;
    let ln_k = ln_bessel_k_orders(max_order, x)?;
    let (ln_gs, ln_gd) = (gs.ln(), gd.ln());
    let prefix = LN_2 - 1.0 / gd - ln_factorial(m - 1);
    let mf = f64::from(m);
    let mut sum = 0.0;
    for k in 0..nm {
        for l in 0..=k {
            let order = (i64::from(m) - i64::from(k) + i64::from(l)).unsigned_abs() as usize;
            let (kf, lf) = (f64::from(k), f64::from(l));
            let ln_term = prefix + 0.5 * (lf - kf - mf) * ln_gs - 0.5 * (lf + kf + mf) * ln_gd
                + ln_k[order]
                - ln_factorial(k - l)
                - ln_factorial(l);
            if ln_term.is_nan() || ln_term == f64::INFINITY {
                return Err(Error::NonFinite("single-link SOP term"));
            }
            sum += ln_term.exp();
        }
    }
    Ok(1.0 - sum)
}

fn sop_single_link_precise(budget: &LinkBudget, m: u32, nm: u32) -> f64 {
    let mut bits = 128;
    loop {
        let value = sop_precise_at(budget, m, nm, bits);
        let floor = Big::ONE.with_precision(bits).value() / big(2f64.powi(bits as i32 - 64), bits);
        if value > floor || bits >= MAX_BITS {
            return value.to_f64().value().clamp(0.0, 1.0);
        }
        bits = (bits + 112).min(MAX_BITS);
    }
}

fn sop_precise_at(budget: &LinkBudget, m: u32, nm: u32, bits: usize) -> Big {
    let one = big(1.0, bits);
    let gs = big(budget.gbar_s, bits);
    let gd = big(budget.gbar_d, bits);
    let inv_gs = &one / &gs;
    let inv_gd = &one / &gd;
    let q = &inv_gs * &inv_gd;
    let max_order = m.max(nm.saturating_sub(1 + m)) as usize;
    let scaled_k = precise::scaled_bessel_k_orders(&q, max_order, bits);

    let pow_table = |base: &Big, len: u32| {
        let mut out = vec![one.clone()];
        for j in 1..=len as usize {
            let next = &out[j - 1] * base;
            out.push(next);
        }
        out
    };
    let gs_pow = pow_table(&inv_gs, nm + m);
    let gd_pow = pow_table(&inv_gd, nm + m);
    let inv_fact: Vec<Big> = (0..nm).map(|j| &one / big_factorial(j, bits)).collect();

    // With K_ν(x) = K̃_ν (2/x)^ν and 2/x = √(γ̄_S γ̄_D), every power is integral.
    let mut sum = big(0.0, bits);
    for k in 0..nm {
        for l in 0..=k {
            let nu = i64::from(m) - i64::from(k) + i64::from(l);
            let weight = &inv_fact[(k - l) as usize] * &inv_fact[l as usize];
            let term = if nu >= 0 {
                &scaled_k[nu as usize] * &gs_pow[(k - l) as usize] * &gd_pow[k as usize]
            } else {
                &scaled_k[(-nu) as usize] * &gs_pow[m as usize] * &gd_pow[(l + m) as usize]
            };
            sum += term * weight;
        }
    }
    let two = big(2.0, bits);
    let prefix = two * (-inv_gd).exp() / big_factorial(m - 1, bits);
    one - prefix * sum
}

/// Outage probability of the whole network for best-relay selection.
pub fn sop_network(budgets: &[LinkBudget], m: u32, n: u32, mode: SopMode) -> Result<f64> {
    let first = budgets
        .first()
        .ok_or(Error::Empty("sop_network needs at least one budget"))?;
    match mode {
        SopMode::Exact => budgets
            .iter()
            .try_fold(1.0, |acc, b| Ok(acc * sop_single_link(b, m, n)?)),
        SopMode::Approximate => {
            let single = sop_single_link(first, m, n)?;
            Ok(single.powi(budgets.len() as i32))
        }
    }
}

/// `P[Γ̃*_D ≤ t]`, where idle realizations contribute an atom at zero.
pub fn cdf_optimal_dest_sinr(budget: &LinkBudget, m: u32, n: u32, t: f64) -> Result<f64> {
    Ok((1.0 - sf_optimal_dest_sinr(budget, m, n, t)?).clamp(0.0, 1.0))
}

/// `P[Γ̃*_D > t]`, computed directly so that the upper tail keeps its
/// relative precision.
pub fn sf_optimal_dest_sinr(budget: &LinkBudget, m: u32, n: u32, t: f64) -> Result<f64> {
    let nm = check_shapes(m, n)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "CDF argument must be finite and ≥ 0, got {t}"
        )));
    }
    let (gs, gd) = (budget.gbar_s, budget.gbar_d);
    let c = 2.0 * t + 1.0;
    let x = 2.0 * c / (gs * gd).sqrt();
    if !x.is_finite() {
        return Ok(0.0);
    }
    let max_order = m.max(nm.saturating_sub(2)) as usize;
    let ln_k = ln_bessel_k_orders(max_order, x)?;
    let (ln_gs, ln_gd) = (gs.ln(), gd.ln());
    let (ln_c, ln_2t) = (c.ln(), (2.0 * t).ln());
    let prefix = LN_2 - 1.0 / gd - 2.0 * t * (1.0 / gs + 1.0 / gd) - ln_factorial(m - 1);
    let mut sum = 0.0;
    for k in 0..nm {
        let kf = f64::from(k);
        for l in 0..=k {
            for r in 0..m {
                // (2t)^{m-1-r} vanishes at t = 0 unless r = m - 1
                let pow_2t = m - 1 - r;
                if t == 0.0 && pow_2t > 0 {
                    continue;
                }
                let nu = i64::from(r) - i64::from(l) + 1;
                let nuf = nu as f64;
                let mut ln_term = prefix
                    + (kf + f64::from(r) + 1.0) * ln_c
                    + ln_binomial(k, l)
                    + ln_binomial(m - 1, r)
                    + ln_k[nu.unsigned_abs() as usize]
                    - ln_factorial(k)
                    - (kf + 0.5 * nuf) * ln_gd
                    - (f64::from(m) - 0.5 * nuf) * ln_gs;
                if pow_2t > 0 {
                    ln_term += f64::from(pow_2t) * ln_2t;
                }
                if ln_term.is_nan() || ln_term == f64::INFINITY {
                    return Err(Error::NonFinite("destination SINR CDF term"));
                }
                sum += ln_term.exp();
            }
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}

fn asr_mapping_scale(budgets: &[LinkBudget], m: u32) -> f64 {
    let typical = budgets
        .iter()
        .map(|b| b.gbar_s.min(b.gbar_d))
        .fold(0.0, f64::max);
    (0.25 * f64::from(m) * typical).max(1.0)
}

/// `∫_0^∞ (1 - Π_i F_i(y + √(y² + y))) / (1 + y) dy`, where `F_i` is the
/// CDF of `Γ̃*_D` on relay `i`.
fn asr_integral<F>(tail_of_max: F, scale: f64, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = std::cell::Cell::new(None);
    let value = integrate_semi_infinite_scaled(
        |y| {
            let w = y + (y * y + y).sqrt();
            match tail_of_max(w) {
                Ok(tail) => tail / (1.0 + y),
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        scale,
        quad,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value.max(0.0)),
    }
}

/// Average secrecy rate (nats) of a single relay path.
pub fn asr_single(budget: &LinkBudget, m: u32, n: u32, quad: &QuadratureSpec) -> Result<f64> {
    asr_network(budget, 1, m, n, quad)
}

/// Average secrecy rate (nats) with best selection among `r` relays that
/// share the same budget.
pub fn asr_network(
    budget: &LinkBudget,
    r: u32,
    m: u32,
    n: u32,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::invalid("num_uavs", "must be ≥ 1"));
    }
    check_shapes(m, n)?;
    let rf = f64::from(r);
    asr_integral(
        |w| {
            let sf = sf_optimal_dest_sinr(budget, m, n, w)?;
            // 1 - (1 - sf)^R without cancellation
            Ok(-(rf * (-sf).ln_1p()).exp_m1())
        },
        asr_mapping_scale(std::slice::from_ref(budget), m),
        quad,
    )
}

/// Average secrecy rate (nats) with best selection among relays with
/// individual budgets; the maximum's CDF is the product of the per-relay
/// CDFs.
pub fn asr_network_heterogeneous(
    budgets: &[LinkBudget],
    m: u32,
    n: u32,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if budgets.is_empty() {
        return Err(Error::Empty(
            "asr_network_heterogeneous needs at least one budget",
        ));
    }
    check_shapes(m, n)?;
    asr_integral(
        |w| {
            let mut ln_cdf = 0.0;
            for b in budgets {
                ln_cdf += (-sf_optimal_dest_sinr(b, m, n, w)?).ln_1p();
            }
            Ok(-ln_cdf.exp_m1())
        },
        asr_mapping_scale(budgets, m),
        quad,
    )
}

/// Path-loss geometry entering the high-SNR analysis, where the transmit
/// SNRs are tied as `γ̄ = P_s/σ_u² = δ P_u/σ_d²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighSnrGeometry {
    pub loss_source: f64,
    pub loss_dest: f64,
    pub inr: f64,
    pub sigma2_s: f64,
    pub sigma2_d: f64,
}

impl HighSnrGeometry {
    /// Unit path losses and fading scales: `γ̄_S = γ̄/(1 + Γ_I)`, `γ̄_D = γ̄/δ`.
    pub fn normalized(inr: f64) -> Self {
        Self {
            loss_source: 1.0,
            loss_dest: 1.0,
            inr,
            sigma2_s: 1.0,
            sigma2_d: 1.0,
        }
    }

    pub fn from_scenario(scn: &Scenario, i: usize) -> Result<Self> {
        let node = scn.uavs.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: scn.uavs.len(),
        })?;
        Ok(Self {
            loss_source: mean_path_loss(&scn.env, node, Endpoint::Source),
            loss_dest: mean_path_loss(&scn.env, node, Endpoint::Dest),
            inr: scn.inr,
            sigma2_s: scn.sigma2_s,
            sigma2_d: scn.sigma2_d,
        })
    }

    /// Link budget at transmit SNR `gbar` (linear).
    pub fn budget(&self, gbar: f64, delta: f64) -> Result<LinkBudget> {
        LinkBudget::new(
            gbar * self.sigma2_s / (self.loss_source * (1.0 + self.inr)),
            gbar * self.sigma2_d / (delta * self.loss_dest),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighSnrConfig {
    pub delta: f64,
    /// Transmit SNRs `γ̄` (linear), strictly increasing.
    pub gbar_grid: Vec<f64>,
}

impl HighSnrConfig {
    pub fn new(delta: f64, gbar_grid: Vec<f64>) -> Result<Self> {
        let cfg = Self { delta, gbar_grid };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `count` points evenly spaced in dB over `[from_db, to_db]`.
    pub fn db_range(delta: f64, from_db: f64, to_db: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid("gbar_grid", "needs at least two points"));
        }
        let step = (to_db - from_db) / (count - 1) as f64;
        let grid = (0..count)
            .map(|i| 10f64.powf((from_db + step * i as f64) / 10.0))
            .collect();
        Self::new(delta, grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta", "must be finite and > 0"));
        }
        if self.gbar_grid.len() < 2 {
            return Err(Error::invalid("gbar_grid", "needs at least two points"));
        }
        if self.gbar_grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::invalid("gbar_grid", "values must be finite and > 0"));
        }
        if self.gbar_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("gbar_grid", "must be strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SopBounds {
    pub gbar: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Leading-order bounds `(lower, upper)` on the single-link SOP of one
/// budget, valid for `N ≥ 2` at high SNR.
///
/// With `u = 1/γ̄_D` and `v = 1/(γ̄_S γ̄_D)`:
/// lower `max{u^{Nm}/(Nm)!, v^m Γ((N-1)m)/(m!(Nm-1)!)}`, upper the sum of
/// the same two terms with `u, v` doubled.
pub fn sop_bounds_for_budget(budget: &LinkBudget, m: u32, n: u32) -> Result<(f64, f64)> {
    let nm = check_shapes(m, n)?;
    if n < 2 {
        return Err(Error::UnsupportedRegime(
            "the SOP bounds need N ≥ 2; for N = 1 use sop_high_snr_single_antenna".into(),
        ));
    }
    let (mf, nmf) = (f64::from(m), f64::from(nm));
    let ln_coeff_v = ln_factorial((n - 1) * m - 1) - ln_factorial(m) - ln_factorial(nm - 1);
    let ln_coeff_u = -ln_factorial(nm);
    let ln_u = -budget.gbar_d.ln();
    let ln_v = -(budget.gbar_s.ln() + budget.gbar_d.ln());
    let dest_term = |c: f64| (ln_coeff_u + nmf * (c.ln() + ln_u)).exp();
    let product_term = |c: f64| (ln_coeff_v + mf * (c.ln() + ln_v)).exp();
    Ok((
        dest_term(1.0).max(product_term(1.0)),
        dest_term(2.0) + product_term(2.0),
    ))
}

/// [`sop_bounds_for_budget`] along the transmit-SNR grid of `cfg`.
pub fn sop_high_snr_bounds(
    geometry: &HighSnrGeometry,
    cfg: &HighSnrConfig,
    m: u32,
    n: u32,
) -> Result<Vec<SopBounds>> {
    cfg.validate()?;
    cfg.gbar_grid
        .iter()
        .map(|&gbar| {
            let (lower, upper) = sop_bounds_for_budget(&geometry.budget(gbar, cfg.delta)?, m, n)?;
            Ok(SopBounds { gbar, lower, upper })
        })
        .collect()
}

/// High-SNR network SOP for `m = N = 1`: `(1 - e^{-1/γ̄_D})^R`.
pub fn sop_high_snr_single_antenna(budget: &LinkBudget, r: u32) -> f64 {
    (-(-1.0 / budget.gbar_d).exp_m1()).powi(r as i32)
}

/// Network SOP along a transmit-SNR sweep, as `(γ̄, SOP)` pairs ready for
/// [`diversity_slope`]. All `r` relays share `geometry`.
pub fn sop_network_curve(
    geometry: &HighSnrGeometry,
    cfg: &HighSnrConfig,
    r: u32,
    m: u32,
    n: u32,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    cfg.gbar_grid
        .iter()
        .map(|&gbar| {
            let b = geometry.budget(gbar, cfg.delta)?;
            let single = sop_single_link(&b, m, n)?;
            Ok((gbar, single.powi(r as i32)))
        })
        .collect()
}

/// Diversity order estimate: minus the least-squares slope of
/// `log10 SOP` against `log10 γ̄`, over points with `SOP ∈ (0, 0.1]` that
/// fall within the last decade of `γ̄`.
pub fn diversity_slope(points: &[(f64, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(g, p)| g > 0.0 && g.is_finite() && p > 0.0 && p <= 0.1)
        .collect();
    let top = usable.iter().map(|p| p.0).fold(0.0, f64::max);
    let fit: Vec<(f64, f64)> = usable
        .into_iter()
        .filter(|&(g, _)| g >= top / 10.0 * (1.0 - 1e-12))
        .map(|(g, p)| (g.log10(), p.log10()))
        .collect();
    if fit.len() < 3 {
        return Err(Error::invalid(
            "points",
            format!(
                "need at least 3 points with SOP in (0, 0.1] in the last decade, got {}",
                fit.len()
            ),
        ));
    }
    let n = fit.len() as f64;
    let mean_x = fit.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = fit.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = fit.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = fit.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("points", "γ̄ values are all equal"));
    }
    Ok(-sxy / sxx)
}
