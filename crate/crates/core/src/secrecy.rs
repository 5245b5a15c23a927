//! Per-realization quantities: SINRs, the optimal source power split,
//! secrecy rate and best-relay selection.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Instantaneous SNRs `(Γ_S, Γ_D)` of one relay path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRealization {
    pub gamma_s: f64,
    pub gamma_d: f64,
}

impl LinkRealization {
    pub fn new(gamma_s: f64, gamma_d: f64) -> Result<Self> {
        if !(gamma_s >= 0.0 && gamma_s.is_finite()) {
            return Err(Error::invalid(
                "gamma_s",
                format!("must be finite and ≥ 0, got {gamma_s}"),
            ));
        }
        if !(gamma_d >= 0.0 && gamma_d.is_finite()) {
            return Err(Error::invalid(
                "gamma_d",
                format!("must be finite and ≥ 0, got {gamma_d}"),
            ));
        }
        Ok(Self { gamma_s, gamma_d })
    }

    /// True when no split yields a positive secrecy rate, i.e.
    /// `Γ_D ≤ 1 + 1/Γ_S`. The boundary counts as idle.
    pub fn is_idle(&self) -> bool {
        let (s, d) = (self.gamma_s, self.gamma_d);
        s == 0.0 || s * d <= s + 1.0
    }
}

/// Fraction of the source power carried by the confidential signal; the
/// remainder feeds the jamming signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit(f64);

impl PowerSplit {
    pub fn new(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::invalid(
                "a",
                format!("power split must lie in [0, 1], got {a}"),
            ));
        }
        Ok(Self(a))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Outcome of the power-allocation rule for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitDecision {
    /// The source stays silent; every split gives zero secrecy rate.
    Idle,
    Transmit(PowerSplit),
}

/// `Γ̃_i(a) = aΓ_S / ((1-a)Γ_S + 1)`, the SINR at the untrusted relay.
pub fn sinr_uav(link: &LinkRealization, split: PowerSplit) -> f64 {
    let a = split.value();
    a * link.gamma_s / ((1.0 - a) * link.gamma_s + 1.0)
}

/// `Γ̃_D(a) = aΓ_SΓ_D / (Γ_S + Γ_D + 1)`, the SINR at the destination after
/// jamming cancellation.
pub fn sinr_dest(link: &LinkRealization, split: PowerSplit) -> f64 {
    let a = split.value();
    a * link.gamma_s * link.gamma_d / (link.gamma_s + link.gamma_d + 1.0)
}

/// `a* = (1 - (1 + Γ_S)/(Γ_S Γ_D)) / 2`, or idle when `Γ_D ≤ 1 + 1/Γ_S`.
pub fn optimal_split(link: &LinkRealization) -> SplitDecision {
    if link.is_idle() {
        return SplitDecision::Idle;
    }
    let (s, d) = (link.gamma_s, link.gamma_d);
    let a = 0.5 * (1.0 - (1.0 + s) / (s * d));
    SplitDecision::Transmit(PowerSplit(a))
}

/// SINRs at the relay and the destination under `a*`, in closed form.
pub fn optimal_sinrs(link: &LinkRealization) -> Result<(f64, f64)> {
    if link.is_idle() {
        return Err(Error::IdleLink);
    }
    let (s, d) = (link.gamma_s, link.gamma_d);
    let numer = s * (d - 1.0) - 1.0;
    let at_uav = numer / ((s + 2.0) * d + s + 1.0);
    let at_dest = numer / (2.0 * (d + s + 1.0));
    Ok((at_uav, at_dest))
}

/// `[ln(1 + Γ̃_D(a)) - ln(1 + Γ̃_i(a))]⁺` in nats.
pub fn secrecy_rate(link: &LinkRealization, split: PowerSplit) -> f64 {
    let rate = sinr_dest(link, split).ln_1p() - sinr_uav(link, split).ln_1p();
    rate.max(0.0)
}

/// Secrecy rate under the optimal split; zero for idle links.
///
/// Uses `(1 + Γ̃*_D)/(1 + Γ̃*_i) = 1 + (Γ̃*_D)²/(2Γ̃*_D + 1)`.
pub fn optimal_rate(link: &LinkRealization) -> f64 {
    match optimal_sinrs(link) {
        Ok((_, at_dest)) => (at_dest * at_dest / (2.0 * at_dest + 1.0)).ln_1p(),
        Err(_) => 0.0,
    }
}

/// Chosen relay and its secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub rate: f64,
    /// Every link was idle; `index` is 0 and `rate` is 0.
    pub all_idle: bool,
}

/// Relay with the largest secrecy rate under its own optimal split; ties go
/// to the lowest index.
pub fn select_uav(links: &[LinkRealization]) -> Result<Selection> {
    if links.is_empty() {
        return Err(Error::Empty("select_uav needs at least one link"));
    }
    let mut best = Selection {
        index: 0,
        rate: 0.0,
        all_idle: true,
    };
    for (i, link) in links.iter().enumerate() {
        if link.is_idle() {
            continue;
        }
        let rate = optimal_rate(link);
        if best.all_idle || rate > best.rate {
            best = Selection {
                index: i,
                rate,
                all_idle: false,
            };
        }
    }
    Ok(best)
}
