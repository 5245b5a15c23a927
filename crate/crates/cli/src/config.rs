//! TOML scenario files.
//!
//! Every key is optional; an empty file yields [`Scenario::default`].
//! Relays come either from explicit `[[uav]]` tables or from a
//! `[placement]` table, never both.
//!
//! ```toml
//! p_source_dbm = 10.0      # dBm
//! p_uav_dbm = 10.0         # dBm, defaults to p_source_dbm
//! noise_uav_dbm = -100.0   # dBm
//! noise_dest_dbm = -100.0  # dBm
//! inr = 1.0                # linear
//! m = 2
//! n_antennas = 2
//! sigma2_s = 1.0
//! sigma2_d = 1.0
//!
//! [environment]
//! omega = 9.61
//! beta = 0.16
//! eta_los_db = 1.0
//! eta_nlos_db = 20.0
//! alpha = 2.0
//! carrier_hz = 2.0e9
//!
//! [[uav]]
//! altitude_m = 100.0
//! d_source_m = 300.0
//! d_dest_m = 300.0
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use uavsec_core::{EnvironmentParams, Scenario, UavNode};

use crate::placement::{placement_geometry, PlacementScheme};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    p_source_dbm: Option<f64>,
    p_uav_dbm: Option<f64>,
    noise_uav_dbm: Option<f64>,
    noise_dest_dbm: Option<f64>,
    inr: Option<f64>,
    m: Option<u32>,
    n_antennas: Option<u32>,
    sigma2_s: Option<f64>,
    sigma2_d: Option<f64>,
    environment: Option<EnvironmentFile>,
    uav: Option<Vec<UavFile>>,
    placement: Option<PlacementFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentFile {
    omega: Option<f64>,
    beta: Option<f64>,
    eta_los_db: Option<f64>,
    eta_nlos_db: Option<f64>,
    alpha: Option<f64>,
    carrier_hz: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UavFile {
    altitude_m: f64,
    d_source_m: f64,
    d_dest_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementFile {
    scheme: PlacementScheme,
    num_uavs: usize,
    sd_distance_m: f64,
    base_altitude_m: f64,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("in scenario {}", path.display()))
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text)?;
    let mut scn = Scenario::default();
    if let Some(p) = file.p_source_dbm {
        scn.p_source_dbm = p;
        scn.p_uav_dbm = p;
    }
    let fields = [
        (file.p_uav_dbm, &mut scn.p_uav_dbm),
        (file.noise_uav_dbm, &mut scn.noise_uav_dbm),
        (file.noise_dest_dbm, &mut scn.noise_dest_dbm),
        (file.inr, &mut scn.inr),
        (file.sigma2_s, &mut scn.sigma2_s),
        (file.sigma2_d, &mut scn.sigma2_d),
    ];
    for (value, slot) in fields {
        if let Some(v) = value {
            *slot = v;
        }
    }
    scn.m = file.m.unwrap_or(scn.m);
    scn.n_antennas = file.n_antennas.unwrap_or(scn.n_antennas);
    if let Some(env) = file.environment {
        let e = &mut scn.env;
        e.omega = env.omega.unwrap_or(e.omega);
        e.beta = env.beta.unwrap_or(e.beta);
        e.eta_los_db = env.eta_los_db.unwrap_or(e.eta_los_db);
        e.eta_nlos_db = env.eta_nlos_db.unwrap_or(e.eta_nlos_db);
        e.alpha = env.alpha.unwrap_or(e.alpha);
        e.carrier_hz = env.carrier_hz.unwrap_or(e.carrier_hz);
    }
    match (file.uav, file.placement) {
        (Some(_), Some(_)) => bail!("`uav` and `placement` are mutually exclusive"),
        (Some(uavs), None) => {
            scn.uavs = uavs
                .into_iter()
                .enumerate()
                .map(|(i, u)| {
                    UavNode::new(u.altitude_m, u.d_source_m, u.d_dest_m)
                        .with_context(|| format!("uav[{i}]"))
                })
                .collect::<Result<_>>()?;
        }
        (None, Some(p)) => {
            scn.uavs = placement_geometry(p.sd_distance_m, p.num_uavs, p.scheme, p.base_altitude_m)
                .context("placement")?;
        }
        (None, None) => {}
    }
    scn.validate()?;
    Ok(scn)
}

#[derive(Serialize)]
struct ScenarioOut<'a> {
    p_source_dbm: f64,
    p_uav_dbm: f64,
    noise_uav_dbm: f64,
    noise_dest_dbm: f64,
    inr: f64,
    m: u32,
    n_antennas: u32,
    sigma2_s: f64,
    sigma2_d: f64,
    environment: &'a EnvironmentParams,
    uav: &'a [UavNode],
}

/// The scenario as a file that [`parse_scenario`] reads back unchanged.
pub fn scenario_to_toml(scn: &Scenario) -> Result<String> {
    Ok(toml::to_string(&ScenarioOut {
        p_source_dbm: scn.p_source_dbm,
        p_uav_dbm: scn.p_uav_dbm,
        noise_uav_dbm: scn.noise_uav_dbm,
        noise_dest_dbm: scn.noise_dest_dbm,
        inr: scn.inr,
        m: scn.m,
        n_antennas: scn.n_antennas,
        sigma2_s: scn.sigma2_s,
        sigma2_d: scn.sigma2_d,
        environment: &scn.env,
        uav: &scn.uavs,
    })?)
}
