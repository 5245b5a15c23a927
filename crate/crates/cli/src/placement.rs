//! Relay layouts along the source–destination line.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use uavsec_core::UavNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementScheme {
    /// Common altitude; ground projections split the line into `R + 1`
    /// equal parts (Placement 1).
    EqualDivision,
    /// All projections at the midpoint; relay `k` flies at `k` times the
    /// base altitude (Placement 2).
    MidpointStacked,
    /// Relays exactly as listed in the scenario.
    Explicit,
}

/// Relays for a source–destination distance `l` (m).
pub fn placement_geometry(
    l: f64,
    r: usize,
    scheme: PlacementScheme,
    base_altitude_m: f64,
) -> Result<Vec<UavNode>> {
    if !(l > 0.0 && l.is_finite()) {
        bail!("sd_distance_m must be finite and > 0, got {l}");
    }
    if r == 0 {
        bail!("num_uavs must be ≥ 1");
    }
    let nodes = match scheme {
        PlacementScheme::EqualDivision => (1..=r)
            .map(|k| {
                let x = l * k as f64 / (r + 1) as f64;
                UavNode::new(base_altitude_m, x, l - x)
            })
            .collect::<Result<Vec<_>, _>>()?,
        PlacementScheme::MidpointStacked => (1..=r)
            .map(|k| UavNode::new(base_altitude_m * k as f64, 0.5 * l, 0.5 * l))
            .collect::<Result<Vec<_>, _>>()?,
        PlacementScheme::Explicit => bail!("explicit placement takes its relays from the scenario"),
    };
    Ok(nodes)
}
