//! `avgsim`: scenario-driven simulation and verification of averaging
//! dynamics on dynamic directed networks.
//!
//! Subcommands: `run` executes a scenario and writes the trace plus a
//! metrics sidecar, `check` additionally runs the configured verifiers and
//! exits non-zero on any violation, `sweep` repeats `check` across a seed
//! range and aggregates the outcomes.

mod checks;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use checks::{run_claim, ReportRow};
use config::{ScenarioConfig, VerifierConfig};

#[derive(Parser)]
#[command(name = "avgsim", about = "Averaging dynamics on dynamic networks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the scenario and write trace, metrics, and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute the scenario and run the configured verifiers.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the default tolerance of verifiers without an explicit one.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run `check` over consecutive seeds and aggregate the results.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Number of consecutive seeds, starting at the config seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(true)` means no violations.
fn dispatch() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let scenario = ScenarioConfig::load(&config)?;
            let out_dir = output::resolve_out_dir(&scenario, out);
            run_scenario(&scenario, &config, &out_dir)?;
            Ok(true)
        }
        Command::Check { config, out, tol } => {
            let scenario = ScenarioConfig::load(&config)?;
            let out_dir = output::resolve_out_dir(&scenario, out);
            let rows = check_scenario(&scenario, &config, &out_dir, tol)?;
            print!("{}", output::summarize(&rows));
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Sweep { config, seeds, out, tol } => {
            if seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let scenario = ScenarioConfig::load(&config)?;
            let out_dir = output::resolve_out_dir(&scenario, out);
            sweep_scenario(&scenario, &config, &out_dir, seeds, tol)
        }
    }
}

fn run_scenario(
    scenario: &ScenarioConfig,
    origin: &std::path::Path,
    out_dir: &std::path::Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let trace = output::execute(scenario, origin)?;
    output::write_trace_csv(&out_dir.join("trace.csv"), &trace)?;
    output::write_metrics_csv(&out_dir.join("metrics.csv"), &trace)?;
    output::write_manifest(
        &out_dir.join("manifest.json"),
        scenario,
        &["trace.csv", "metrics.csv", "manifest.json"],
    )?;
    println!("{}", output::final_spread_line(&trace));
    Ok(())
}

fn check_scenario(
    scenario: &ScenarioConfig,
    origin: &std::path::Path,
    out_dir: &std::path::Path,
    tol: Option<f64>,
) -> Result<Vec<ReportRow>> {
    std::fs::create_dir_all(out_dir)?;
    let trace = output::execute(scenario, origin)?;
    output::write_trace_csv(&out_dir.join("trace.csv"), &trace)?;
    output::write_metrics_csv(&out_dir.join("metrics.csv"), &trace)?;

    // The structural weights check always runs first; listed verifiers
    // follow in config order.
    let mut verifiers: Vec<VerifierConfig> = Vec::new();
    if !scenario.verifiers.iter().any(|v| v.id == "weights") {
        verifiers.push(VerifierConfig {
            id: "weights".into(),
            tol: None,
            epsilon: None,
            trials: None,
            sigma: None,
            window: None,
            residual_max: None,
            s: None,
            sequences: None,
            functions: None,
            rounds: None,
        });
    }
    verifiers.extend(scenario.verifiers.iter().cloned());

    let mut rows = Vec::new();
    for verifier in &verifiers {
        rows.extend(run_claim(scenario, verifier, &trace, tol)?);
    }
    output::write_report_csv(&out_dir.join("report.csv"), &rows)?;
    std::fs::write(out_dir.join("summary.txt"), output::summarize(&rows))?;
    output::write_manifest(
        &out_dir.join("manifest.json"),
        scenario,
        &["trace.csv", "metrics.csv", "report.csv", "summary.txt", "manifest.json"],
    )?;
    Ok(rows)
}

fn sweep_scenario(
    scenario: &ScenarioConfig,
    origin: &std::path::Path,
    out_dir: &std::path::Path,
    seeds: u64,
    tol: Option<f64>,
) -> Result<bool> {
    std::fs::create_dir_all(out_dir)?;
    let mut per_claim: Vec<(String, usize, usize)> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut all_pass = true;
    for offset in 0..seeds {
        let mut seeded = scenario.clone();
        seeded.seed = scenario.seed + offset;
        let seed_dir = out_dir.join(format!("seed_{}", seeded.seed));
        let rows = check_scenario(&seeded, origin, &seed_dir, tol)?;
        for row in &rows {
            if let Some(entry) = per_claim.iter_mut().find(|(claim, _, _)| *claim == row.claim) {
                entry.1 += 1;
                entry.2 += usize::from(!row.pass);
            } else {
                per_claim.push((row.claim.clone(), 1, usize::from(!row.pass)));
            }
            if row.claim == "lemma7" && row.lhs.is_finite() {
                ratios.push(row.lhs);
            }
            all_pass &= row.pass;
        }
    }
    output::write_aggregate_csv(&out_dir.join("aggregate.csv"), &per_claim, &mut ratios)?;
    for (claim, checks, violations) in &per_claim {
        let status = if *violations == 0 { "PASS" } else { "FAIL" };
        println!("{claim}: {status} ({checks} checks, {violations} violations across {seeds} seeds)");
    }
    Ok(all_pass)
}
