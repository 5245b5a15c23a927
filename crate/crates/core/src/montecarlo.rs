//! Seeded Monte Carlo simulation of the relay network.
//!
//! Trials are grouped in blocks of [`BLOCK_LEN`]. Block `b` draws from a
//! ChaCha8 generator seeded with the configured seed and switched to stream
//! `b`, so every block is reproducible on its own. Blocks run in parallel
//! and their statistics are merged in block order, which makes the result
//! independent of thread scheduling.
//!
//! Per trial the generator is consumed in a fixed order: for each relay the
//! first-hop SNR, then the second-hop SNR, then one uniform used by the
//! random-selection baseline. The uniform is drawn for every policy so that
//! policies compared under the same seed see the same fading.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{LinkBudget, Scenario};
use crate::secrecy::{
    optimal_sinrs, optimal_split, secrecy_rate, LinkRealization, PowerSplit, SplitDecision,
};
use crate::{Error, Result};

pub const BLOCK_LEN: u64 = 65_536;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    Best,
    Random,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerPolicy {
    Optimal,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntennaSampling {
    /// One Gamma(Nm) draw per second hop.
    Aggregate,
    /// Sum of N independent Gamma(m) draws, one per receive antenna.
    PerAntenna,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub samples: u64,
    pub seed: u64,
    pub selection: SelectionPolicy,
    pub power_policy: PowerPolicy,
    pub antenna_sampling: AntennaSampling,
}

impl SimConfig {
    /// Best selection, optimal split, aggregate sampling.
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            selection: SelectionPolicy::Best,
            power_policy: PowerPolicy::Optimal,
            antenna_sampling: AntennaSampling::Aggregate,
        }
    }

    pub fn with_selection(mut self, selection: SelectionPolicy) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_power_policy(mut self, power_policy: PowerPolicy) -> Self {
        self.power_policy = power_policy;
        self
    }

    pub fn with_antenna_sampling(mut self, antenna_sampling: AntennaSampling) -> Self {
        self.antenna_sampling = antenna_sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("samples", "must be ≥ 1"));
        }
        if let PowerPolicy::Fixed(a) = self.power_policy {
            PowerSplit::new(a)?;
        }
        Ok(())
    }

    fn block_count(&self) -> u64 {
        self.samples.div_ceil(BLOCK_LEN)
    }

    fn block_len(&self, block: u64) -> u64 {
        (self.samples - block * BLOCK_LEN).min(BLOCK_LEN)
    }
}

/// Sample mean with its standard error and a normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl EstimateWithCI {
    pub fn new(mean: f64, std_error: f64, samples: u64) -> Self {
        Self {
            mean,
            std_error,
            samples,
            ci95_low: mean - Z95 * std_error,
            ci95_high: mean + Z95 * std_error,
        }
    }

    /// Proportion `hits / samples` with the binomial standard error.
    pub fn proportion(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self::new(p, (p * (1.0 - p) / samples as f64).sqrt(), samples)
    }

    /// `|mean - value| ≤ k·std_error`, with an exact match accepted when
    /// the standard error is zero.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }

    /// Standard error of a proportion under the hypothesis `p = p0`.
    pub fn null_std_error(p0: f64, samples: u64) -> f64 {
        (p0 * (1.0 - p0) / samples as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    /// Fraction of trials whose selected relay has zero secrecy rate.
    pub sop: EstimateWithCI,
    /// Mean secrecy rate of the selected relay, in nats.
    pub asr: EstimateWithCI,
}

/// Running statistics of a set of trials; merging is exact for the outage
/// count and uses the pairwise update for mean and variance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialStats {
    pub trials: u64,
    pub outages: u64,
    pub rate_mean: f64,
    pub rate_m2: f64,
}

impl TrialStats {
    fn push(&mut self, rate: f64) {
        self.trials += 1;
        if rate <= 0.0 {
            self.outages += 1;
        }
        let delta = rate - self.rate_mean;
        self.rate_mean += delta / self.trials as f64;
        self.rate_m2 += delta * (rate - self.rate_mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.trials == 0 {
            return other;
        }
        if other.trials == 0 {
            return self;
        }
        let n = self.trials + other.trials;
        let (na, nb) = (self.trials as f64, other.trials as f64);
        let delta = other.rate_mean - self.rate_mean;
        Self {
            trials: n,
            outages: self.outages + other.outages,
            rate_mean: self.rate_mean + delta * nb / n as f64,
            rate_m2: self.rate_m2 + other.rate_m2 + delta * delta * na * nb / n as f64,
        }
    }

    pub fn outcome(&self) -> Result<SimOutcome> {
        if self.trials == 0 {
            return Err(Error::Empty("no trials to summarize"));
        }
        let n = self.trials;
        let var = if n > 1 {
            self.rate_m2 / (n - 1) as f64
        } else {
            0.0
        };
        Ok(SimOutcome {
            sop: EstimateWithCI::proportion(self.outages, n),
            asr: EstimateWithCI::new(self.rate_mean, (var / n as f64).sqrt(), n),
        })
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Gamma variate with integer shape as a sum of exponentials.
fn gamma_draw<R: Rng>(rng: &mut R, shape: u32, scale: f64) -> f64 {
    let mut acc = 0.0;
    for _ in 0..shape {
        // 1 - U lies in (0, 1], so the logarithm is finite
        acc -= (1.0 - rng.gen::<f64>()).ln();
    }
    scale * acc
}

/// One fading realization of a relay path.
pub fn sample_link<R: Rng>(
    budget: &LinkBudget,
    m: u32,
    n: u32,
    sampling: AntennaSampling,
    rng: &mut R,
) -> LinkRealization {
    let gamma_s = gamma_draw(rng, m, budget.gbar_s);
    let gamma_d = match sampling {
        AntennaSampling::Aggregate => gamma_draw(rng, n * m, budget.gbar_d),
        AntennaSampling::PerAntenna => (0..n).map(|_| gamma_draw(rng, m, budget.gbar_d)).sum(),
    };
    LinkRealization { gamma_s, gamma_d }
}

fn link_rate(link: &LinkRealization, policy: PowerPolicy) -> f64 {
    match policy {
        PowerPolicy::Optimal => match optimal_split(link) {
            SplitDecision::Idle => 0.0,
            SplitDecision::Transmit(a) => secrecy_rate(link, a),
        },
        PowerPolicy::Fixed(a) => PowerSplit::new(a).map_or(0.0, |a| secrecy_rate(link, a)),
    }
}

fn check_inputs(budgets: &[LinkBudget], m: u32, n: u32, cfg: &SimConfig) -> Result<()> {
    if budgets.is_empty() {
        return Err(Error::Empty("simulation needs at least one relay"));
    }
    if m == 0 || n == 0 {
        return Err(Error::invalid("m", "shape parameters must be ≥ 1"));
    }
    if let SelectionPolicy::Fixed(index) = cfg.selection {
        if index >= budgets.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: budgets.len(),
            });
        }
    }
    cfg.validate()
}

fn run_block(budgets: &[LinkBudget], m: u32, n: u32, cfg: &SimConfig, block: u64) -> TrialStats {
    let mut rng = block_rng(cfg.seed, block);
    let mut stats = TrialStats::default();
    let relays = budgets.len();
    let mut rates = vec![0.0; relays];
    for _ in 0..cfg.block_len(block) {
        for (rate, b) in rates.iter_mut().zip(budgets) {
            let link = sample_link(b, m, n, cfg.antenna_sampling, &mut rng);
            *rate = link_rate(&link, cfg.power_policy);
        }
        let u: f64 = rng.gen();
        let chosen = match cfg.selection {
            SelectionPolicy::Best => rates.iter().copied().fold(0.0, f64::max),
            SelectionPolicy::Random => rates[((u * relays as f64) as usize).min(relays - 1)],
            SelectionPolicy::Fixed(i) => rates[i],
        };
        stats.push(chosen);
    }
    stats
}

/// Statistics of the trials in `blocks` (block indices, each of
/// [`BLOCK_LEN`] trials except possibly the last one).
pub fn simulate_blocks(
    budgets: &[LinkBudget],
    m: u32,
    n: u32,
    cfg: &SimConfig,
    blocks: Range<u64>,
) -> Result<TrialStats> {
    check_inputs(budgets, m, n, cfg)?;
    let end = blocks.end.min(cfg.block_count());
    let per_block: Vec<TrialStats> = (blocks.start..end)
        .into_par_iter()
        .map(|b| run_block(budgets, m, n, cfg, b))
        .collect();
    Ok(per_block
        .into_iter()
        .fold(TrialStats::default(), TrialStats::merge))
}

/// Simulates relays with explicit budgets.
pub fn simulate_budgets(
    budgets: &[LinkBudget],
    m: u32,
    n: u32,
    cfg: &SimConfig,
) -> Result<SimOutcome> {
    simulate_blocks(budgets, m, n, cfg, 0..cfg.block_count())?.outcome()
}

pub fn simulate(scn: &Scenario, cfg: &SimConfig) -> Result<SimOutcome> {
    scn.validate()?;
    simulate_budgets(&scn.link_budgets()?, scn.m, scn.n_antennas, cfg)
}

pub fn estimate_sop(scn: &Scenario, cfg: &SimConfig) -> Result<EstimateWithCI> {
    Ok(simulate(scn, cfg)?.sop)
}

pub fn estimate_asr(scn: &Scenario, cfg: &SimConfig) -> Result<EstimateWithCI> {
    Ok(simulate(scn, cfg)?.asr)
}

/// Empirical `P[Γ̃*_D ≤ t]` at each grid point for one relay path; idle
/// realizations count as `Γ̃*_D = 0`. Only `samples`, `seed` and
/// `antenna_sampling` of `cfg` are used.
pub fn empirical_cdf_optimal_dest_sinr(
    budget: &LinkBudget,
    m: u32,
    n: u32,
    cfg: &SimConfig,
    t_grid: &[f64],
) -> Result<Vec<EstimateWithCI>> {
    check_inputs(std::slice::from_ref(budget), m, n, cfg)?;
    if t_grid.iter().any(|t| t.is_nan()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("t_grid", "must be non-decreasing"));
    }
    let counts: Vec<Vec<u64>> = (0..cfg.block_count())
        .into_par_iter()
        .map(|block| {
            let mut rng = block_rng(cfg.seed, block);
            // first grid index whose value is ≥ the sample
            let mut first_hit = vec![0u64; t_grid.len() + 1];
            for _ in 0..cfg.block_len(block) {
                let link = sample_link(budget, m, n, cfg.antenna_sampling, &mut rng);
                let _selection: f64 = rng.gen();
                let dest = optimal_sinrs(&link).map_or(0.0, |(_, d)| d);
                first_hit[t_grid.partition_point(|&t| t < dest)] += 1;
            }
            first_hit
        })
        .collect();
    let mut first_hit = vec![0u64; t_grid.len() + 1];
    for block in counts {
        for (acc, c) in first_hit.iter_mut().zip(block) {
            *acc += c;
        }
    }
    let mut cumulative = 0;
    Ok(first_hit[..t_grid.len()]
        .iter()
        .map(|&c| {
            cumulative += c;
            EstimateWithCI::proportion(cumulative, cfg.samples)
        })
        .collect())
}
