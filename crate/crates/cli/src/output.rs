//! CSV rendering and run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use uavsec_core::{QuadratureSpec, Scenario, SimConfig};

use crate::sweep::SweepSpec;

pub const CSV_HEADER: &str = "sweep_var,value,metric,estimate,ci_low,ci_high,samples";

/// One long-format CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub sweep_var: String,
    pub value: f64,
    pub metric: String,
    pub estimate: f64,
    pub ci: Option<(f64, f64)>,
    pub samples: Option<u64>,
}

/// Everything needed to regenerate a CSV bit for bit. The timestamp is
/// informational and left out of the hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub sim: SimConfig,
    pub exact_product: bool,
    pub quadrature: QuadratureSpec,
    pub scenario: Scenario,
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix_s: Option<u64>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        scenario: &Scenario,
        sweep: Option<&SweepSpec>,
        sim: &SimConfig,
        exact_product: bool,
        quadrature: &QuadratureSpec,
    ) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .ok();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: sim.seed,
            sim: *sim,
            exact_product,
            quadrature: *quadrature,
            scenario: scenario.clone(),
            sweep: sweep.cloned(),
            timestamp_unix_s: timestamp,
        }
    }

    /// SHA-256 over the manifest's JSON form without the timestamp.
    pub fn hash(&self) -> String {
        let canonical = Self {
            timestamp_unix_s: None,
            ..self.clone()
        };
        let json = serde_json::to_vec(&canonical).expect("manifest serializes");
        hex::encode(Sha256::digest(&json))
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn render_csv(manifest: &RunManifest, rows: &[CsvRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} {}", manifest.tool, manifest.tool_version);
    let _ = writeln!(out, "# command: {}", manifest.command);
    let _ = writeln!(out, "# manifest_sha256: {}", manifest.hash());
    let _ = writeln!(out, "# seed: {}", manifest.seed);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{},{},{}",
            r.sweep_var,
            r.value,
            r.metric,
            r.estimate,
            fmt_opt(r.ci.map(|c| c.0)),
            fmt_opt(r.ci.map(|c| c.1)),
            r.samples.map(|n| n.to_string()).unwrap_or_default(),
        );
    }
    out
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.manifest.json`.
pub fn write_run(dir: &Path, stem: &str, manifest: &RunManifest, csv: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    let json = serde_json::to_string_pretty(manifest)?;
    std::fs::write(&manifest_path, json + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(csv_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> RunManifest {
        RunManifest::new(
            "sweep",
            &Scenario::default(),
            None,
            &SimConfig::new(10, 42),
            false,
            &QuadratureSpec::default(),
        )
    }

    #[test]
    fn hash_ignores_timestamp() {
        let a = manifest();
        let mut b = a.clone();
        b.timestamp_unix_s = Some(1);
        assert_eq!(a.hash(), b.hash());
        b.seed = 43;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn csv_layout() {
        let rows = [
            CsvRow {
                sweep_var: "p_source_dbm".into(),
                value: -2.5,
                metric: "sop_mc".into(),
                estimate: 0.125,
                ci: Some((0.1, 0.15)),
                samples: Some(1000),
            },
            CsvRow {
                sweep_var: "p_source_dbm".into(),
                value: -2.5,
                metric: "sop_analytic_exact".into(),
                estimate: 1.5e-70,
                ci: None,
                samples: None,
            },
        ];
        let csv = render_csv(&manifest(), &rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[..4].iter().all(|l| l.starts_with('#')));
        assert!(lines[2].starts_with("# manifest_sha256: "));
        assert_eq!(lines[4], CSV_HEADER);
        assert_eq!(
            lines[5],
            "p_source_dbm,-2.5,sop_mc,1.25e-1,1e-1,1.5e-1,1000"
        );
        assert_eq!(lines[6], "p_source_dbm,-2.5,sop_analytic_exact,1.5e-70,,,");
    }
}
