//! Scenario files, parameter sweeps and analytic-versus-simulation reports
//! on top of `uavsec-core`.

pub mod config;
pub mod output;
pub mod placement;
pub mod report;
pub mod sweep;

pub use config::{load_scenario, parse_scenario, scenario_to_toml};
pub use placement::{placement_geometry, PlacementScheme};
pub use report::{compare_report, CompareReport};
pub use sweep::{load_sweep, parse_sweep, run_sweep, Metric, SweepSpec, SweepVariable};
