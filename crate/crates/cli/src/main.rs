use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use uavsec_cli::{compare_report, load_scenario, load_sweep, run_sweep, scenario_to_toml};
use uavsec_core::{
    AntennaSampling, PowerPolicy, QuadratureSpec, Scenario, SelectionPolicy, SimConfig,
};

/// Secrecy of untrusted UAV relays with source-based jamming.
#[derive(Parser)]
#[command(name = "uavsec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one parameter and write `sweep.csv` plus its manifest.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Sweep specification (TOML).
        #[arg(long)]
        sweep: PathBuf,
    },
    /// Compare closed forms against simulation; exits with status 2 on any
    /// disagreement.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Print the default scenario as TOML.
    ShowDefaults,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML); defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Use the product of per-relay outage probabilities instead of the
    /// first relay's raised to R for derived network quantities.
    #[arg(long)]
    exact_product: bool,
    /// best | random | fixed:<index>
    #[arg(long, default_value = "best", value_parser = parse_selection)]
    selection: SelectionPolicy,
    /// optimal | fixed:<a>
    #[arg(long, default_value = "optimal", value_parser = parse_power_policy)]
    power_policy: PowerPolicy,
    /// aggregate | per_antenna
    #[arg(long, default_value = "aggregate", value_parser = parse_antenna_sampling)]
    antenna_sampling: AntennaSampling,
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        match &self.scenario {
            Some(path) => load_scenario(path),
            None => Ok(Scenario::default()),
        }
    }

    fn sim(&self) -> SimConfig {
        SimConfig::new(self.samples, self.seed)
            .with_selection(self.selection)
            .with_power_policy(self.power_policy)
            .with_antenna_sampling(self.antenna_sampling)
    }
}

fn parse_selection(s: &str) -> Result<SelectionPolicy> {
    Ok(match s {
        "best" => SelectionPolicy::Best,
        "random" => SelectionPolicy::Random,
        _ => match s.strip_prefix("fixed:") {
            Some(i) => SelectionPolicy::Fixed(i.parse().context("relay index")?),
            None => bail!("expected best, random or fixed:<index>"),
        },
    })
}

fn parse_power_policy(s: &str) -> Result<PowerPolicy> {
    if s == "optimal" {
        return Ok(PowerPolicy::Optimal);
    }
    match s.strip_prefix("fixed:") {
        Some(a) => {
            let a: f64 = a.parse().context("power split")?;
            if !(0.0..=1.0).contains(&a) {
                bail!("power split must lie in [0, 1]");
            }
            Ok(PowerPolicy::Fixed(a))
        }
        None => bail!("expected optimal or fixed:<a>"),
    }
}

fn parse_antenna_sampling(s: &str) -> Result<AntennaSampling> {
    match s {
        "aggregate" => Ok(AntennaSampling::Aggregate),
        "per_antenna" | "per-antenna" => Ok(AntennaSampling::PerAntenna),
        _ => bail!("expected aggregate or per_antenna"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let quad = QuadratureSpec::default();
    match cli.command {
        Command::ShowDefaults => {
            print!("{}", scenario_to_toml(&Scenario::default())?);
        }
        Command::Sweep { common, sweep } => {
            let scn = common.scenario()?;
            let spec = load_sweep(&sweep)?;
            let run = run_sweep(
                &scn,
                &spec,
                &common.sim(),
                common.exact_product,
                &quad,
                Some(&common.out),
            )?;
            println!(
                "wrote {} rows to {} (manifest {})",
                run.rows.len(),
                common.out.join("sweep.csv").display(),
                run.manifest.hash()
            );
        }
        Command::Compare { common } => {
            let scn = common.scenario()?;
            let report = compare_report(
                &scn,
                &common.sim(),
                common.exact_product,
                &quad,
                Some(&common.out),
            )?;
            print!("{}", report.render_text());
            if !report.all_agree() {
                eprintln!("analytic and simulated results disagree");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
