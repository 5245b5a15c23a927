//! Side-by-side analytic and simulated results for one scenario.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use uavsec_core::analytic::{diversity_slope, sop_network, sop_single_link};
use uavsec_core::montecarlo::simulate;
use uavsec_core::{
    EstimateWithCI, LinkBudget, PowerPolicy, QuadratureSpec, Scenario, SelectionPolicy, SimConfig,
    SopMode,
};

use crate::output::{render_csv, write_run, CsvRow, RunManifest};
use crate::sweep::{asr_analytic, bits};

/// Agreement threshold in standard errors.
pub const SIGMAS: f64 = 3.0;
/// Allowed relative gap between the fitted and the predicted diversity order.
pub const SLOPE_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Agree,
    Disagree,
    NotApplicable,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Agree
        } else {
            Self::Disagree
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Agree => "ok",
            Self::Disagree => "DISAGREE",
            Self::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub quantity: &'static str,
    pub analytic: Option<f64>,
    pub simulated: Option<EstimateWithCI>,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<ReportRow>,
    pub slope: f64,
    pub slope_target: f64,
    pub slope_status: Status,
    pub homogeneous: bool,
    pub manifest: RunManifest,
    pub csv: String,
}

impl CompareReport {
    pub fn all_agree(&self) -> bool {
        self.slope_status != Status::Disagree
            && self.rows.iter().all(|r| r.status != Status::Disagree)
    }

    pub fn row(&self, quantity: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:>14} {:>14} {:>12}  status",
            "quantity", "analytic", "monte carlo", "±95%"
        );
        for r in &self.rows {
            let analytic = r.analytic.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
            let (mc, half) = r.simulated.map_or(("-".to_string(), "-".to_string()), |e| {
                (
                    format!("{:.6e}", e.mean),
                    format!("{:.2e}", 0.5 * (e.ci95_high - e.ci95_low)),
                )
            });
            let _ = writeln!(
                out,
                "{:<18} {analytic:>14} {mc:>14} {half:>12}  {}",
                r.quantity,
                r.status.label()
            );
        }
        let _ = writeln!(
            out,
            "{:<18} {:>14.4} {:>14} {:>12}  {}",
            "diversity_slope",
            self.slope,
            format!("target {}", self.slope_target),
            "",
            self.slope_status.label()
        );
        out
    }
}

fn is_homogeneous(budgets: &[LinkBudget]) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    budgets
        .iter()
        .all(|b| close(b.gbar_s, budgets[0].gbar_s) && close(b.gbar_d, budgets[0].gbar_d))
}

fn proportion_agrees(analytic: f64, est: &EstimateWithCI) -> bool {
    let se = EstimateWithCI::null_std_error(analytic, est.samples);
    (est.mean - analytic).abs() <= SIGMAS * se
}

/// Diversity order predicted for the scenario's fading: `R·m·min(N, 2)`.
pub fn diversity_target(r: usize, m: u32, n: u32) -> f64 {
    (r as u32 * m * n.min(2)) as f64
}

/// Network SOP over budgets scaled so that the weaker hop of the first
/// relay spans 50–80 dB, and the fitted log–log slope.
pub fn fitted_diversity(
    budgets: &[LinkBudget],
    m: u32,
    n: u32,
    exact_product: bool,
) -> Result<f64> {
    let weakest = budgets[0].gbar_s.min(budgets[0].gbar_d);
    let mode = if exact_product {
        SopMode::Exact
    } else {
        SopMode::Approximate
    };
    let points = (0..=15)
        .map(|k| {
            let gbar = 10f64.powf(5.0 + 0.2 * k as f64);
            let scaled: Vec<LinkBudget> = budgets
                .iter()
                .map(|b| b.scaled(gbar / weakest))
                .collect::<Result<_, _>>()?;
            Ok((gbar, sop_network(&scaled, m, n, mode)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(diversity_slope(&points)?)
}

/// Compares closed forms with simulation for `scn` and, when `out_dir` is
/// given, writes `compare.csv` and `compare.manifest.json` there.
pub fn compare_report(
    scn: &Scenario,
    sim: &SimConfig,
    exact_product: bool,
    quad: &QuadratureSpec,
    out_dir: Option<&Path>,
) -> Result<CompareReport> {
    scn.validate()?;
    sim.validate()?;
    ensure!(
        sim.power_policy == PowerPolicy::Optimal && sim.selection == SelectionPolicy::Best,
        "compare checks the closed forms, which assume the optimal split with best selection"
    );
    let budgets = scn.link_budgets()?;
    let (m, n, r) = (scn.m, scn.n_antennas, budgets.len());
    let homogeneous = is_homogeneous(&budgets);
    let mc = simulate(scn, sim)?;

    let exact = sop_network(&budgets, m, n, SopMode::Exact)?;
    let mut rows = vec![ReportRow {
        quantity: "sop_exact",
        analytic: Some(exact),
        simulated: Some(mc.sop),
        status: Status::from_bool(proportion_agrees(exact, &mc.sop)),
    }];
    if homogeneous {
        let approx = sop_single_link(&budgets[0], m, n)?.powi(r as i32);
        rows.push(ReportRow {
            quantity: "sop_approx",
            analytic: Some(approx),
            simulated: Some(mc.sop),
            status: Status::from_bool(proportion_agrees(approx, &mc.sop)),
        });
    } else {
        rows.push(ReportRow {
            quantity: "sop_approx",
            analytic: None,
            simulated: None,
            status: Status::NotApplicable,
        });
    }
    // The product-of-CDFs form is exact for independent relays, so the
    // simulated ASR is checked against it whatever the SOP mode.
    let asr = asr_analytic(&budgets, m, n, true, quad).context("ASR quadrature")?;
    rows.push(ReportRow {
        quantity: "asr_nats",
        analytic: Some(asr),
        simulated: Some(mc.asr),
        status: Status::from_bool(
            mc.asr.agrees_with(asr, SIGMAS) || (mc.asr.mean - asr).abs() <= 1e-12,
        ),
    });

    let slope = fitted_diversity(&budgets, m, n, exact_product || !homogeneous)?;
    let slope_target = diversity_target(r, m, n);
    let slope_status =
        Status::from_bool(((slope - slope_target) / slope_target).abs() <= SLOPE_TOLERANCE);

    let manifest = RunManifest::new("compare", scn, None, sim, exact_product, quad);
    let mut csv_rows = Vec::new();
    let mut push = |metric: &str, estimate: f64, e: Option<&EstimateWithCI>| {
        csv_rows.push(CsvRow {
            sweep_var: "compare".into(),
            value: r as f64,
            metric: metric.into(),
            estimate,
            ci: e.map(|e| (e.ci95_low, e.ci95_high)),
            samples: e.map(|e| e.samples),
        })
    };
    push("sop_analytic_exact", exact, None);
    if let Some(approx) = rows[1].analytic {
        push("sop_analytic_approx", approx, None);
    }
    push("sop_mc", mc.sop.mean, Some(&mc.sop));
    push("asr_analytic_nats", asr, None);
    push("asr_analytic_bits", bits(asr), None);
    push("asr_mc_nats", mc.asr.mean, Some(&mc.asr));
    let asr_bits = EstimateWithCI::new(bits(mc.asr.mean), bits(mc.asr.std_error), mc.asr.samples);
    push("asr_mc_bits", asr_bits.mean, Some(&asr_bits));
    push("diversity_slope", slope, None);
    push("diversity_target", slope_target, None);
    let csv = render_csv(&manifest, &csv_rows);
    if let Some(dir) = out_dir {
        write_run(dir, "compare", &manifest, &csv)?;
    }
    Ok(CompareReport {
        rows,
        slope,
        slope_target,
        slope_status,
        homogeneous,
        manifest,
        csv,
    })
}
