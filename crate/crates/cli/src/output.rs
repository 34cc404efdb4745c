//! Output files: the trace CSV, the per-round metrics sidecar, the check
//! report, and the run manifest. Nothing here embeds timestamps or other
//! non-reproducible content: identical configs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use avgsim::dynamics::ExecutionTrace;
use avgsim::geometry::{affine_dim, direction_projection, hull_volume, thickness};

use crate::checks::ReportRow;
use crate::config::ScenarioConfig;

/// Trace CSV: `t,i,x_1,...,x_d` for every state from round 0 onward.
pub fn write_trace_csv(path: &Path, trace: &ExecutionTrace<f64>) -> Result<()> {
    let mut out = String::new();
    out.push_str("t,i");
    for axis in 1..=trace.d() {
        write!(out, ",x_{axis}").unwrap();
    }
    out.push('\n');
    for t in 0..=trace.rounds() {
        for i in 0..trace.n() {
            write!(out, "{t},{i}").unwrap();
            for value in trace.state(t).point(i) {
                write!(out, ",{value}").unwrap();
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Metrics sidecar keyed by round: hull volume, thickness under the round's
/// broadcast projection, affine dimension, measured minimum broadcasting
/// weight, the designated set, and the round's edges.
pub fn write_metrics_csv(path: &Path, trace: &ExecutionTrace<f64>) -> Result<()> {
    let mut out = String::from("t,volume,thickness,affine_dim,alpha,m_set,edges\n");
    for t in 0..=trace.rounds() {
        let state = trace.state(t);
        let volume = hull_volume(state.points());
        let dim = affine_dim(state.points(), 1e-8);
        if t == 0 {
            writeln!(out, "0,{volume},,{dim},,,").unwrap();
            continue;
        }
        let record = trace.record(t);
        let (thick, alpha) = if record.round.m_set.is_empty() {
            (String::new(), String::new())
        } else {
            let projection = direction_projection(&trace.before(t).select(&record.round.m_set));
            (
                format!("{}", thickness(state.points(), &projection)),
                format!("{}", trace.measured_alpha(t).expect("non-empty m_set")),
            )
        };
        let m_set =
            record.round.m_set.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("|");
        let edges = record
            .round
            .graph
            .edges()
            .map(|(a, b)| format!("{a}>{b}"))
            .collect::<Vec<_>>()
            .join("|");
        writeln!(out, "{t},{volume},{thick},{dim},{alpha},{m_set},{edges}").unwrap();
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Report CSV: one row per check.
pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut out = String::from("claim,round,lhs,rhs,margin,pass,note\n");
    for row in rows {
        let round = row.round.map(|t| t.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.claim, round, row.lhs, row.rhs, row.margin, row.pass, row.note
        )
        .unwrap();
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Per-claim pass/fail summary with the worst margin, both printed and
/// written alongside the report.
pub fn summarize(rows: &[ReportRow]) -> String {
    let mut claims: Vec<String> = Vec::new();
    for row in rows {
        if !claims.contains(&row.claim) {
            claims.push(row.claim.clone());
        }
    }
    let mut out = String::new();
    for claim in claims {
        let group: Vec<&ReportRow> = rows.iter().filter(|r| r.claim == claim).collect();
        let checks = group.len();
        let violations = group.iter().filter(|r| !r.pass).count();
        let worst = group
            .iter()
            .map(|r| r.margin)
            .filter(|m| m.is_finite())
            .fold(f64::INFINITY, f64::min);
        let status = if violations == 0 { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{claim}: {status} ({checks} checks, {violations} violations, worst margin {worst:e})"
        )
        .unwrap();
    }
    out
}

/// Manifest: the resolved seed, the full configuration echo, and the files
/// the run produced.
pub fn write_manifest(
    path: &Path,
    config: &ScenarioConfig,
    outputs: &[&str],
) -> Result<()> {
    let manifest = serde_json::json!({
        "seed": config.seed,
        "config": config,
        "outputs": outputs,
    });
    std::fs::write(path, format!("{:#}\n", manifest))
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Aggregate CSV for sweeps: per-claim totals plus the distribution of the
/// per-round volume-contraction ratios.
pub fn write_aggregate_csv(
    path: &Path,
    per_claim: &[(String, usize, usize)],
    ratios: &mut [f64],
) -> Result<()> {
    let mut out = String::from("claim,checks,violations,ratio_min,ratio_median,ratio_max\n");
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    for (claim, checks, violations) in per_claim {
        if claim == "lemma7" && !ratios.is_empty() {
            let min = ratios.first().unwrap();
            let max = ratios.last().unwrap();
            let median = ratios[ratios.len() / 2];
            writeln!(out, "{claim},{checks},{violations},{min},{median},{max}").unwrap();
        } else {
            writeln!(out, "{claim},{checks},{violations},,,").unwrap();
        }
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Runs the configured trace once.
pub fn execute(config: &ScenarioConfig, origin: &Path) -> Result<ExecutionTrace<f64>> {
    let spec = config.build_adversary()?;
    let rule = config.build_rule();
    let x0 = config.build_initial(origin)?;
    avgsim::dynamics::run(&spec, &rule, &x0, config.rounds, config.relay_rounds)
        .context("execution failed")
}

/// Output directory resolution: the CLI flag wins, then the config, then
/// `out` next to the working directory.
pub fn resolve_out_dir(config: &ScenarioConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

/// Summary line for `run`.
pub fn final_spread_line(trace: &ExecutionTrace<f64>) -> String {
    let last = trace.state(trace.rounds());
    let spread = last.spread();
    let volume = hull_volume(last.points());
    format!(
        "{} rounds, final spread {spread:e}, final volume {volume:e}",
        trace.rounds()
    )
}
