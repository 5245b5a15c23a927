//! Air-to-ground geometry, mean path loss and average link SNRs.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Speed of light used by the free-space term, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Propagation constants of the LoS/NLoS mixture model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    /// S-curve parameter of the LoS probability.
    pub omega: f64,
    /// S-curve steepness, 1/degree.
    pub beta: f64,
    /// Excess loss of a LoS link, dB.
    pub eta_los_db: f64,
    /// Excess loss of an NLoS link, dB.
    pub eta_nlos_db: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    pub carrier_hz: f64,
}

impl EnvironmentParams {
    /// Urban constants `(ω, β, η_L, η_N) = (9.61, 0.16, 1 dB, 20 dB)` at
    /// 2 GHz with free-space exponent 2.
    pub fn urban() -> Self {
        Self {
            omega: 9.61,
            beta: 0.16,
            eta_los_db: 1.0,
            eta_nlos_db: 20.0,
            alpha: 2.0,
            carrier_hz: 2.0e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega,
            self.beta,
            self.eta_los_db,
            self.eta_nlos_db,
            self.alpha,
            self.carrier_hz,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid(
                "environment",
                "all parameters must be finite",
            ));
        }
        if !(self.beta > 0.0) {
            return Err(Error::invalid("beta", "must be > 0"));
        }
        if !(self.alpha >= 2.0) {
            return Err(Error::invalid("alpha", "must be ≥ 2"));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(Error::invalid("carrier_hz", "must be > 0"));
        }
        if !(self.eta_los_db >= 0.0) {
            return Err(Error::invalid("eta_los_db", "must be ≥ 0"));
        }
        if !(self.eta_nlos_db >= self.eta_los_db) {
            return Err(Error::invalid("eta_nlos_db", "must be ≥ eta_los_db"));
        }
        Ok(())
    }
}

impl Default for EnvironmentParams {
    fn default() -> Self {
        Self::urban()
    }
}

/// Which ground terminal a UAV link connects to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Source,
    Dest,
}

/// Position of one relay: altitude and ground distances from the source
/// and destination to its ground projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavNode {
    pub altitude_m: f64,
    pub d_source_m: f64,
    pub d_dest_m: f64,
}

impl UavNode {
    pub fn new(altitude_m: f64, d_source_m: f64, d_dest_m: f64) -> Result<Self> {
        let node = Self {
            altitude_m,
            d_source_m,
            d_dest_m,
        };
        node.validate()?;
        Ok(node)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_m > 0.0 && self.altitude_m.is_finite()) {
            return Err(Error::invalid("altitude_m", "must be finite and > 0"));
        }
        if !(self.d_source_m >= 0.0 && self.d_source_m.is_finite()) {
            return Err(Error::invalid("d_source_m", "must be finite and ≥ 0"));
        }
        if !(self.d_dest_m >= 0.0 && self.d_dest_m.is_finite()) {
            return Err(Error::invalid("d_dest_m", "must be finite and ≥ 0"));
        }
        Ok(())
    }

    pub fn ground_distance(&self, endpoint: Endpoint) -> f64 {
        match endpoint {
            Endpoint::Source => self.d_source_m,
            Endpoint::Dest => self.d_dest_m,
        }
    }

    pub fn slant_range(&self, endpoint: Endpoint) -> f64 {
        self.altitude_m.hypot(self.ground_distance(endpoint))
    }
}

/// Elevation angle in degrees seen from the ground terminal; 90° overhead.
pub fn elevation_deg(node: &UavNode, endpoint: Endpoint) -> f64 {
    let d = node.ground_distance(endpoint);
    if d == 0.0 {
        return 90.0;
    }
    (node.altitude_m / d).atan().to_degrees()
}

/// Logistic LoS probability `1 / (1 + ω exp(-β(θ - ω)))`.
pub fn los_probability(env: &EnvironmentParams, theta_deg: f64) -> f64 {
    1.0 / (1.0 + env.omega * (-env.beta * (theta_deg - env.omega)).exp())
}

/// Mean path loss (linear, ≥ 1 in practice) of the link between `node`
/// and `endpoint`: `r^α (4πf/c)² (η_L p_L + η_N (1 - p_L))`.
pub fn mean_path_loss(env: &EnvironmentParams, node: &UavNode, endpoint: Endpoint) -> f64 {
    let r = node.slant_range(endpoint);
    let theta = elevation_deg(node, endpoint);
    path_loss_at(env, r, theta)
}

pub(crate) fn path_loss_at(env: &EnvironmentParams, r: f64, theta_deg: f64) -> f64 {
    let p_los = los_probability(env, theta_deg);
    let excess =
        db_to_linear(env.eta_los_db) * p_los + db_to_linear(env.eta_nlos_db) * (1.0 - p_los);
    let free_space = 4.0 * std::f64::consts::PI * env.carrier_hz / SPEED_OF_LIGHT;
    r.powf(env.alpha) * free_space * free_space * excess
}

/// Average SNRs of the source→UAV and UAV→destination links; these are
/// the Gamma scale parameters of the instantaneous SNRs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub gbar_s: f64,
    pub gbar_d: f64,
}

impl LinkBudget {
    pub fn new(gbar_s: f64, gbar_d: f64) -> Result<Self> {
        if !(gbar_s > 0.0 && gbar_s.is_finite()) {
            return Err(Error::invalid(
                "gbar_s",
                format!("must be finite and > 0, got {gbar_s}"),
            ));
        }
        if !(gbar_d > 0.0 && gbar_d.is_finite()) {
            return Err(Error::invalid(
                "gbar_d",
                format!("must be finite and > 0, got {gbar_d}"),
            ));
        }
        Ok(Self { gbar_s, gbar_d })
    }

    /// Both averages multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.gbar_s * factor, self.gbar_d * factor)
    }
}

/// Complete network description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub uavs: Vec<UavNode>,
    pub p_source_dbm: f64,
    pub p_uav_dbm: f64,
    pub noise_uav_dbm: f64,
    pub noise_dest_dbm: f64,
    /// Residual self-interference power over noise power at the relay.
    pub inr: f64,
    /// Nakagami shape.
    pub m: u32,
    /// Receive antennas at the destination.
    pub n_antennas: u32,
    pub sigma2_s: f64,
    pub sigma2_d: f64,
    pub env: EnvironmentParams,
}

impl Default for Scenario {
    /// Urban environment, two co-located relays 100 m up, midway along a
    /// 600 m source–destination line; `P_s = P_u = 10 dBm`, `Γ_I = 1`,
    /// `m = N = 2`.
    fn default() -> Self {
        Self {
            uavs: vec![UavNode::new(100.0, 300.0, 300.0).expect("valid"); 2],
            p_source_dbm: 10.0,
            p_uav_dbm: 10.0,
            noise_uav_dbm: -100.0,
            noise_dest_dbm: -100.0,
            inr: 1.0,
            m: 2,
            n_antennas: 2,
            sigma2_s: 1.0,
            sigma2_d: 1.0,
            env: EnvironmentParams::urban(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.uavs.is_empty() {
            return Err(Error::invalid("uavs", "at least one UAV is required"));
        }
        for uav in &self.uavs {
            uav.validate()?;
        }
        for (name, v) in [
            ("p_source_dbm", self.p_source_dbm),
            ("p_uav_dbm", self.p_uav_dbm),
            ("noise_uav_dbm", self.noise_uav_dbm),
            ("noise_dest_dbm", self.noise_dest_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(self.inr >= 0.0 && self.inr.is_finite()) {
            return Err(Error::invalid("inr", "must be finite and ≥ 0"));
        }
        if self.m == 0 {
            return Err(Error::invalid("m", "must be ≥ 1"));
        }
        if self.n_antennas == 0 {
            return Err(Error::invalid("n_antennas", "must be ≥ 1"));
        }
        if !(self.sigma2_s > 0.0 && self.sigma2_s.is_finite()) {
            return Err(Error::invalid("sigma2_s", "must be finite and > 0"));
        }
        if !(self.sigma2_d > 0.0 && self.sigma2_d.is_finite()) {
            return Err(Error::invalid("sigma2_d", "must be finite and > 0"));
        }
        self.env.validate()
    }

    pub fn num_uavs(&self) -> usize {
        self.uavs.len()
    }

    /// Source transmit SNR `P_s/σ_u²` (linear).
    pub fn source_snr(&self) -> f64 {
        dbm_to_watts(self.p_source_dbm) / dbm_to_watts(self.noise_uav_dbm)
    }

    /// Relay transmit SNR `P_u/σ_d²` (linear).
    pub fn uav_snr(&self) -> f64 {
        dbm_to_watts(self.p_uav_dbm) / dbm_to_watts(self.noise_dest_dbm)
    }

    pub fn link_budgets(&self) -> Result<Vec<LinkBudget>> {
        (0..self.uavs.len()).map(|i| link_budget(self, i)).collect()
    }
}

/// `γ̄_S = P_s σ_S² / (σ_u² l̄_S (Γ_I + 1))`, `γ̄_D = P_u σ_D² / (σ_d² l̄_D)`.
pub fn link_budget(scn: &Scenario, i: usize) -> Result<LinkBudget> {
    let node = scn.uavs.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: scn.uavs.len(),
    })?;
    let loss_s = mean_path_loss(&scn.env, node, Endpoint::Source);
    let loss_d = mean_path_loss(&scn.env, node, Endpoint::Dest);
    let gbar_s = scn.source_snr() * scn.sigma2_s / (loss_s * (scn.inr + 1.0));
    let gbar_d = scn.uav_snr() * scn.sigma2_d / loss_d;
    LinkBudget::new(gbar_s, gbar_d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(h: f64, ds: f64, dd: f64) -> UavNode {
        UavNode::new(h, ds, dd).unwrap()
    }

    #[test]
    fn elevation_examples() {
        assert!((elevation_deg(&node(100.0, 100.0, 0.0), Endpoint::Source) - 45.0).abs() < 1e-12);
        assert_eq!(
            elevation_deg(&node(100.0, 100.0, 0.0), Endpoint::Dest),
            90.0
        );
        let th = elevation_deg(&node(100.0, 100.0 * 3f64.sqrt(), 1.0), Endpoint::Source);
        assert!((th - 30.0).abs() < 1e-12);
    }

    #[test]
    fn los_probability_examples() {
        let env = EnvironmentParams::urban();
        let at_omega = los_probability(&env, env.omega);
        assert!((at_omega - 1.0 / (1.0 + env.omega)).abs() < 1e-15);
        // 1/(1 + 9.61 e^{-0.16 (90 - 9.61)}) = 0.99742...
        let overhead = los_probability(&env, 90.0);
        assert!((0.99..1.0).contains(&overhead));
        assert!((overhead - 1.0 / (1.0 + 9.61 * (-0.16f64 * 80.39).exp())).abs() < 1e-15);
        assert!(los_probability(&env, 60.0) > los_probability(&env, 30.0));
    }

    #[test]
    fn los_probability_is_increasing() {
        let env = EnvironmentParams::urban();
        let mut prev = 0.0;
        for i in 1..=900 {
            let p = los_probability(&env, i as f64 / 10.0);
            assert!(p > prev && p < 1.0);
            prev = p;
        }
    }

    #[test]
    fn path_loss_power_law_in_range() {
        let env = EnvironmentParams::urban();
        let near = mean_path_loss(&env, &node(50.0, 80.0, 0.0), Endpoint::Source);
        let far = mean_path_loss(&env, &node(100.0, 160.0, 0.0), Endpoint::Source);
        assert!((far / near - 2f64.powf(env.alpha)).abs() < 1e-12);
        let env3 = EnvironmentParams { alpha: 3.0, ..env };
        let near = mean_path_loss(&env3, &node(50.0, 80.0, 0.0), Endpoint::Source);
        let far = mean_path_loss(&env3, &node(100.0, 160.0, 0.0), Endpoint::Source);
        assert!((far / near - 8.0).abs() < 1e-11);
    }

    #[test]
    fn pure_los_limit() {
        // ω → 0 drives p_L → 1 for every θ
        let env = EnvironmentParams {
            omega: 1e-300,
            ..EnvironmentParams::urban()
        };
        let n = node(100.0, 100.0, 0.0);
        let r2 = 20_000.0;
        let fs = (4.0 * std::f64::consts::PI * 2.0e9 / 3.0e8).powi(2);
        let want = r2 * fs * 10f64.powf(0.1);
        assert!((mean_path_loss(&env, &n, Endpoint::Source) / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn urban_hand_computation() {
        // H = 100 m, d = 100 m, f = 2 GHz, α = 2, evaluated term by term:
        // r² = 2e4, θ = 45°, p_L = 1/(1 + 9.61 e^{-0.16·35.39}) = 0.967692...
        // (4πf/c)² = 7018.38535..., η_L = 1.258925..., η_N = 100
        let env = EnvironmentParams::urban();
        let p_l = 1.0 / (1.0 + 9.61 * (-0.16f64 * (45.0 - 9.61)).exp());
        assert!((p_l - 0.967_692).abs() < 1e-6);
        let fs = 7_018.385_352;
        let want = 2.0e4 * fs * (1.258_925_4 * p_l + 100.0 * (1.0 - p_l));
        let got = mean_path_loss(&env, &node(100.0, 100.0, 0.0), Endpoint::Source);
        assert!((got / want - 1.0).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn path_loss_continuous_overhead() {
        let env = EnvironmentParams::urban();
        let a = mean_path_loss(&env, &node(120.0, 0.0, 0.0), Endpoint::Source);
        let b = mean_path_loss(&env, &node(120.0, 1e-9, 0.0), Endpoint::Source);
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_scaling_rules() {
        let mut scn = Scenario {
            inr: 0.0,
            ..Scenario::default()
        };
        let base = link_budget(&scn, 0).unwrap();
        scn.inr = 1.0;
        let with_si = link_budget(&scn, 0).unwrap();
        assert!((with_si.gbar_s / base.gbar_s - 0.5).abs() < 1e-14);
        assert_eq!(with_si.gbar_d, base.gbar_d);
        scn.p_source_dbm += 10.0;
        let louder = link_budget(&scn, 0).unwrap();
        assert!((louder.gbar_s / with_si.gbar_s - 10.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_node_has_equal_budgets() {
        let scn = Scenario {
            uavs: vec![node(80.0, 150.0, 150.0)],
            inr: 0.0,
            ..Scenario::default()
        };
        let b = link_budget(&scn, 0).unwrap();
        assert!((b.gbar_s / b.gbar_d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn index_out_of_range() {
        let scn = Scenario::default();
        assert_eq!(
            link_budget(&scn, 5),
            Err(Error::IndexOutOfRange { index: 5, len: 2 })
        );
    }

    #[test]
    fn validation() {
        assert!(UavNode::new(-1.0, 0.0, 0.0).is_err());
        assert!(UavNode::new(1.0, -1.0, 0.0).is_err());
        let bad_env = EnvironmentParams {
            eta_nlos_db: 0.5,
            ..EnvironmentParams::urban()
        };
        assert!(bad_env.validate().is_err());
        let bad = Scenario {
            m: 0,
            ..Scenario::default()
        };
        assert!(bad.validate().is_err());
        assert!(Scenario::default().validate().is_ok());
    }
}
