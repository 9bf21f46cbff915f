//! `fermilattice`: runs the worked examples and checks scenario files for
//! standard and fermionic detailed balance.
//!
//! Exit status: 0 when every verdict passes, 1 when a verdict fails, 2 on
//! parse or validation errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::Scenario;
use run::Outcome;

#[derive(Parser, Debug)]
#[command(name = "fermilattice", version, about = "Fermionic detailed balance on finite lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Verdict tolerance; overrides the scenario file.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Print only the JSON report.
    #[arg(long, global = true)]
    json_only: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce a worked example: section5, section6 or duality.
    Demo { name: String },
    /// Check a scenario file.
    Check { config: PathBuf },
    /// Fermionic dual of a map: identity, tau, theta or semigroup:<t>.
    Dual {
        config: PathBuf,
        #[arg(long)]
        map: String,
    },
}

fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Scenario::parse(&text).with_context(|| format!("invalid scenario {}", path.display()))
}

fn tolerance(flag: Option<f64>, scenario: Option<&Scenario>) -> Result<f64> {
    let tol = flag.or(scenario.and_then(|s| s.tolerance)).unwrap_or(fermilattice::DEFAULT_TOL);
    if !(tol > 0.0) {
        anyhow::bail!("tolerance must be positive, found {tol}");
    }
    Ok(tol)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Demo { name } => run::demo(name, tolerance(cli.tolerance, None)?),
        Command::Check { config } => {
            let scenario = load(config)?;
            run::check(&scenario, tolerance(cli.tolerance, Some(&scenario))?)
        }
        Command::Dual { config, map } => run::dual(&load(config)?, map),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
            if !cli.json_only {
                for line in &out.summary {
                    eprintln!("{line}");
                }
                eprintln!("{}", if out.passed { "result: pass" } else { "result: FAIL" });
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
