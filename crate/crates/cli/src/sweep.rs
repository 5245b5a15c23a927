//! One-dimensional parameter sweeps producing long-format CSV.
//!
//! ```toml
//! variable = "p_source_dbm"
//! values = [-10.0, -5.0, 0.0, 5.0, 10.0]
//! outputs = ["sop_analytic_approx", "sop_mc"]
//! # optional
//! placement = "equal_division"   # or "midpoint_stacked", "explicit" (default)
//! sd_distance_m = 600.0          # defaults to the first relay's d_S + d_D
//! base_altitude_m = 100.0        # defaults to the first relay's altitude
//! num_uavs = 3                   # defaults to the scenario's relay count
//! couple_uav_power = true        # p_source_dbm sweeps also set p_uav_dbm
//! ```

use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde::{Deserialize, Serialize};
use uavsec_core::analytic::{
    asr_network, asr_network_heterogeneous, sop_bounds_for_budget, sop_network,
};
use uavsec_core::montecarlo::simulate;
use uavsec_core::{
    LinkBudget, PowerPolicy, QuadratureSpec, Scenario, SelectionPolicy, SimConfig, SimOutcome,
    SopMode,
};

use crate::output::{render_csv, write_run, CsvRow, RunManifest};
use crate::placement::{placement_geometry, PlacementScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PSourceDbm,
    AltitudeM,
    SdDistanceM,
    NumUavs,
    NumAntennas,
    PowerSplitA,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::PSourceDbm => "p_source_dbm",
            Self::AltitudeM => "altitude_m",
            Self::SdDistanceM => "sd_distance_m",
            Self::NumUavs => "num_uavs",
            Self::NumAntennas => "num_antennas",
            Self::PowerSplitA => "power_split_a",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, Self::NumUavs | Self::NumAntennas)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    SopAnalyticExact,
    SopAnalyticApprox,
    SopMc,
    SopBounds,
    AsrAnalytic,
    AsrMc,
}

impl OutputKind {
    fn is_analytic(self) -> bool {
        !matches!(self, Self::SopMc | Self::AsrMc)
    }
}

fn default_placement() -> PlacementScheme {
    PlacementScheme::Explicit
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub outputs: Vec<OutputKind>,
    #[serde(default = "default_placement")]
    pub placement: PlacementScheme,
    #[serde(default)]
    pub sd_distance_m: Option<f64>,
    #[serde(default)]
    pub base_altitude_m: Option<f64>,
    #[serde(default)]
    pub num_uavs: Option<usize>,
    #[serde(default = "yes")]
    pub couple_uav_power: bool,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>, outputs: Vec<OutputKind>) -> Self {
        Self {
            variable,
            values,
            outputs,
            placement: PlacementScheme::Explicit,
            sd_distance_m: None,
            base_altitude_m: None,
            num_uavs: None,
            couple_uav_power: true,
        }
    }

    pub fn with_placement(mut self, placement: PlacementScheme) -> Self {
        self.placement = placement;
        self
    }

    /// Checks the sweep definition on its own and against the simulation policies.
    pub fn validate(&self, sim: &SimConfig) -> Result<()> {
        ensure!(!self.values.is_empty(), "sweep `values` must not be empty");
        ensure!(
            !self.outputs.is_empty(),
            "sweep `outputs` must not be empty"
        );
        let name = self.variable.name();
        for &v in &self.values {
            ensure!(v.is_finite(), "{name} value {v} is not finite");
            if self.variable.is_integer() {
                ensure!(
                    v >= 1.0 && v.fract() == 0.0,
                    "{name} values must be integers ≥ 1, got {v}"
                );
            }
        }
        match self.variable {
            SweepVariable::PowerSplitA => {
                ensure!(
                    matches!(sim.power_policy, PowerPolicy::Fixed(_)),
                    "sweeping power_split_a needs a fixed power policy (pass --power-policy fixed:<a>)"
                );
                for &a in &self.values {
                    ensure!(
                        (0.0..=1.0).contains(&a),
                        "power_split_a values must lie in [0, 1], got {a}"
                    );
                }
            }
            SweepVariable::SdDistanceM => ensure!(
                self.placement != PlacementScheme::Explicit,
                "sweeping sd_distance_m needs placement `equal_division` or `midpoint_stacked`"
            ),
            _ => {}
        }
        let analytic_ok =
            sim.power_policy == PowerPolicy::Optimal && sim.selection == SelectionPolicy::Best;
        if let Some(o) = self.outputs.iter().find(|o| o.is_analytic()) {
            ensure!(
                analytic_ok,
                "analytic output {o:?} assumes the optimal split with best selection; drop it or use the default policies"
            );
        }
        Ok(())
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    Ok(toml::from_str(text)?)
}

pub fn load_sweep(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading sweep {}", path.display()))?;
    parse_sweep(&text).with_context(|| format!("in sweep {}", path.display()))
}

/// Scenario and simulation settings at one sweep value.
pub fn sweep_point(
    base: &Scenario,
    spec: &SweepSpec,
    sim: &SimConfig,
    value: f64,
) -> Result<(Scenario, SimConfig)> {
    let mut scn = base.clone();
    let mut sim = *sim;
    let first = base.uavs.first().context("scenario has no relays")?;
    let mut distance = spec
        .sd_distance_m
        .unwrap_or(first.d_source_m + first.d_dest_m);
    let mut altitude = spec.base_altitude_m.unwrap_or(first.altitude_m);
    let mut relays = spec.num_uavs.unwrap_or(base.uavs.len());
    match spec.variable {
        SweepVariable::PSourceDbm => {
            scn.p_source_dbm = value;
            if spec.couple_uav_power {
                scn.p_uav_dbm = value;
            }
        }
        SweepVariable::AltitudeM => altitude = value,
        SweepVariable::SdDistanceM => distance = value,
        SweepVariable::NumUavs => relays = value as usize,
        SweepVariable::NumAntennas => scn.n_antennas = value as u32,
        SweepVariable::PowerSplitA => sim.power_policy = PowerPolicy::Fixed(value),
    }
    if spec.placement == PlacementScheme::Explicit {
        match spec.variable {
            SweepVariable::AltitudeM => scn.uavs.iter_mut().for_each(|u| u.altitude_m = value),
            SweepVariable::NumUavs => scn.uavs = vec![*first; relays],
            _ => {}
        }
        if spec.num_uavs.is_some() && spec.variable != SweepVariable::NumUavs {
            scn.uavs = vec![*first; relays];
        }
    } else {
        scn.uavs = placement_geometry(distance, relays, spec.placement, altitude)?;
    }
    scn.validate()?;
    Ok((scn, sim))
}

/// Nats to bits.
pub fn bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

fn network_bounds(budgets: &[LinkBudget], m: u32, n: u32, exact: bool) -> Result<(f64, f64)> {
    if exact {
        budgets.iter().try_fold((1.0, 1.0), |(lo, hi), b| {
            let (l, h) = sop_bounds_for_budget(b, m, n)?;
            Ok((lo * l, hi * h))
        })
    } else {
        let (l, h) = sop_bounds_for_budget(&budgets[0], m, n)?;
        let r = budgets.len() as i32;
        Ok((l.powi(r), h.powi(r)))
    }
}

/// Analytic ASR of the scenario: product-of-CDFs over the actual budgets,
/// or the first relay's budget shared by all `R` relays.
pub fn asr_analytic(
    budgets: &[LinkBudget],
    m: u32,
    n: u32,
    exact: bool,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(if exact {
        asr_network_heterogeneous(budgets, m, n, quad)?
    } else {
        asr_network(&budgets[0], budgets.len() as u32, m, n, quad)?
    })
}

/// Named values at one sweep point, in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: &'static str,
    pub estimate: f64,
    pub ci: Option<(f64, f64)>,
    pub std_error: Option<f64>,
    pub samples: Option<u64>,
}

impl Metric {
    fn analytic(name: &'static str, estimate: f64) -> Self {
        Self {
            name,
            estimate,
            ci: None,
            std_error: None,
            samples: None,
        }
    }
}

pub fn evaluate_point(
    scn: &Scenario,
    spec_outputs: &[OutputKind],
    sim: &SimConfig,
    exact_product: bool,
    quad: &QuadratureSpec,
) -> Result<Vec<Metric>> {
    let budgets = scn.link_budgets()?;
    let (m, n) = (scn.m, scn.n_antennas);
    let mc: Option<SimOutcome> = if spec_outputs.iter().any(|o| !o.is_analytic()) {
        Some(simulate(scn, sim)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for &kind in spec_outputs {
        match kind {
            OutputKind::SopAnalyticExact => out.push(Metric::analytic(
                "sop_analytic_exact",
                sop_network(&budgets, m, n, SopMode::Exact)?,
            )),
            OutputKind::SopAnalyticApprox => out.push(Metric::analytic(
                "sop_analytic_approx",
                sop_network(&budgets, m, n, SopMode::Approximate)?,
            )),
            OutputKind::SopBounds => {
                let (lo, hi) = network_bounds(&budgets, m, n, exact_product)?;
                out.push(Metric::analytic("sop_bound_lower", lo));
                out.push(Metric::analytic("sop_bound_upper", hi));
            }
            OutputKind::AsrAnalytic => {
                let nats = asr_analytic(&budgets, m, n, exact_product, quad)
                    .with_context(|| format!("ASR quadrature for {budgets:?}"))?;
                out.push(Metric::analytic("asr_analytic_nats", nats));
                out.push(Metric::analytic("asr_analytic_bits", bits(nats)));
            }
            OutputKind::SopMc => {
                let e = mc.expect("simulated").sop;
                out.push(Metric {
                    name: "sop_mc",
                    estimate: e.mean,
                    ci: Some((e.ci95_low, e.ci95_high)),
                    std_error: Some(e.std_error),
                    samples: Some(e.samples),
                });
            }
            OutputKind::AsrMc => {
                let e = mc.expect("simulated").asr;
                for (name, scale) in [("asr_mc_nats", 1.0), ("asr_mc_bits", bits(1.0))] {
                    out.push(Metric {
                        name,
                        estimate: e.mean * scale,
                        ci: Some((e.ci95_low * scale, e.ci95_high * scale)),
                        std_error: Some(e.std_error * scale),
                        samples: Some(e.samples),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: Vec<Metric>,
}

impl SweepRow {
    pub fn get(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub manifest: RunManifest,
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

impl SweepRun {
    /// Column `name` across all sweep values.
    pub fn series(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.get(name).map(|m| m.estimate))
            .collect()
    }
}

/// Runs every sweep point in order and, when `out_dir` is given, writes
/// `sweep.csv` and `sweep.manifest.json` there.
pub fn run_sweep(
    scn: &Scenario,
    spec: &SweepSpec,
    sim: &SimConfig,
    exact_product: bool,
    quad: &QuadratureSpec,
    out_dir: Option<&Path>,
) -> Result<SweepRun> {
    scn.validate()?;
    sim.validate()?;
    spec.validate(sim)?;
    let manifest = RunManifest::new("sweep", scn, Some(spec), sim, exact_product, quad);
    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let (point, point_sim) = sweep_point(scn, spec, sim, value)
            .with_context(|| format!("{} = {value}", spec.variable.name()))?;
        let metrics = evaluate_point(&point, &spec.outputs, &point_sim, exact_product, quad)
            .with_context(|| format!("{} = {value}", spec.variable.name()))?;
        rows.push(SweepRow { value, metrics });
    }
    let csv_rows: Vec<CsvRow> = rows
        .iter()
        .flat_map(|row| {
            row.metrics.iter().map(move |m| CsvRow {
                sweep_var: spec.variable.name().to_string(),
                value: row.value,
                metric: m.name.to_string(),
                estimate: m.estimate,
                ci: m.ci,
                samples: m.samples,
            })
        })
        .collect();
    let csv = render_csv(&manifest, &csv_rows);
    if let Some(dir) = out_dir {
        write_run(dir, "sweep", &manifest, &csv)?;
    }
    Ok(SweepRun {
        manifest,
        rows,
        csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use uavsec_core::analytic::sop_single_link;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn parses_and_rejects() {
        let spec = parse_sweep(
            "variable = \"num_uavs\"\nvalues = [1, 2, 3]\noutputs = [\"sop_analytic_approx\"]",
        )
        .unwrap();
        assert_eq!(spec.variable, SweepVariable::NumUavs);
        assert_eq!(spec.placement, PlacementScheme::Explicit);
        assert!(
            parse_sweep("variable = \"height\"\nvalues = [1]\noutputs = [\"sop_mc\"]").is_err()
        );
        assert!(parse_sweep(
            "variable = \"num_uavs\"\nvalues = [1]\noutputs = [\"sop_mc\"]\nextra = 1"
        )
        .is_err());
    }

    #[test]
    fn validation_rules() {
        let sim = SimConfig::new(100, 1);
        let base = SweepSpec::new(
            SweepVariable::PSourceDbm,
            vec![0.0],
            vec![OutputKind::SopMc],
        );
        assert!(base.validate(&sim).is_ok());
        assert!(SweepSpec {
            values: vec![],
            ..base.clone()
        }
        .validate(&sim)
        .is_err());
        assert!(SweepSpec {
            outputs: vec![],
            ..base.clone()
        }
        .validate(&sim)
        .is_err());
        let split = SweepSpec::new(
            SweepVariable::PowerSplitA,
            vec![0.5],
            vec![OutputKind::SopMc],
        );
        assert!(split.validate(&sim).is_err());
        let fixed = sim.with_power_policy(PowerPolicy::Fixed(0.3));
        assert!(split.validate(&fixed).is_ok());
        let analytic = SweepSpec::new(
            SweepVariable::PSourceDbm,
            vec![0.0],
            vec![OutputKind::AsrAnalytic],
        );
        assert!(analytic.validate(&fixed).is_err());
        assert!(analytic
            .validate(&sim.with_selection(SelectionPolicy::Random))
            .is_err());
        let relays = SweepSpec::new(SweepVariable::NumUavs, vec![1.5], vec![OutputKind::SopMc]);
        assert!(relays.validate(&sim).is_err());
        let dist = SweepSpec::new(
            SweepVariable::SdDistanceM,
            vec![100.0],
            vec![OutputKind::SopMc],
        );
        assert!(dist.validate(&sim).is_err());
    }

    #[test]
    fn relay_count_sweep_is_power_law() {
        let scn = Scenario::default();
        let spec = SweepSpec::new(
            SweepVariable::NumUavs,
            vec![1.0, 2.0, 3.0, 4.0],
            vec![OutputKind::SopAnalyticApprox],
        );
        let run = run_sweep(&scn, &spec, &SimConfig::new(10, 1), false, &quad(), None).unwrap();
        let single =
            sop_single_link(&scn.link_budgets().unwrap()[0], scn.m, scn.n_antennas).unwrap();
        for (r, sop) in run.series("sop_analytic_approx").into_iter().enumerate() {
            let want = single.powi(r as i32 + 1);
            assert!(((sop - want) / want).abs() < 1e-12);
        }
    }

    #[test]
    fn placement_variables_move_relays() {
        let scn = Scenario::default();
        let sim = SimConfig::new(10, 1);
        let spec = SweepSpec {
            num_uavs: Some(3),
            ..SweepSpec::new(
                SweepVariable::SdDistanceM,
                vec![800.0],
                vec![OutputKind::SopMc],
            )
        }
        .with_placement(PlacementScheme::EqualDivision);
        let (point, _) = sweep_point(&scn, &spec, &sim, 800.0).unwrap();
        let xs: Vec<f64> = point.uavs.iter().map(|u| u.d_source_m).collect();
        assert_eq!(xs, [200.0, 400.0, 600.0]);

        let spec = SweepSpec::new(
            SweepVariable::AltitudeM,
            vec![250.0],
            vec![OutputKind::SopMc],
        );
        let (point, _) = sweep_point(&scn, &spec, &sim, 250.0).unwrap();
        assert!(point.uavs.iter().all(|u| u.altitude_m == 250.0));

        let spec = SweepSpec::new(
            SweepVariable::PSourceDbm,
            vec![3.0],
            vec![OutputKind::SopMc],
        );
        let (point, _) = sweep_point(&scn, &spec, &sim, 3.0).unwrap();
        assert_eq!((point.p_source_dbm, point.p_uav_dbm), (3.0, 3.0));
        let (point, _) = sweep_point(
            &scn,
            &SweepSpec {
                couple_uav_power: false,
                ..spec
            },
            &sim,
            3.0,
        )
        .unwrap();
        assert_eq!(point.p_uav_dbm, scn.p_uav_dbm);
    }

    #[test]
    fn csv_has_every_metric() {
        let scn = Scenario::default();
        let spec = SweepSpec::new(
            SweepVariable::PSourceDbm,
            vec![0.0, 5.0],
            vec![
                OutputKind::SopBounds,
                OutputKind::AsrMc,
                OutputKind::AsrAnalytic,
            ],
        );
        let run = run_sweep(&scn, &spec, &SimConfig::new(2000, 1), false, &quad(), None).unwrap();
        let body: Vec<&str> = run
            .csv
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .collect();
        assert_eq!(body.len(), 2 * 6);
        assert!(body[0].starts_with("p_source_dbm,0,sop_bound_lower,"));
        let nats = run.series("asr_mc_nats");
        let bits_col = run.series("asr_mc_bits");
        assert!((bits(nats[1]) - bits_col[1]).abs() < 1e-12);
    }
}
