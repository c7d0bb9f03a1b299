//! Command implementations, the error-to-exit-code mapping, and the
//! machine-readable result envelope.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use meltline::balance::{
    incremental_report, optimize, BalanceError, CyclePlan, IncrementReport, PlanMode, ProfitBreakdown,
};
use meltline::scenario::{load_scenario, validate, Scenario};
use meltline::schedule::{
    build_schedule, cross_check, simulate, CrossCheckVerdict, ScheduleError, ScheduleReport, Timeline,
};

use crate::gantt;
use crate::Command;

/// Failures grouped by the process exit code they map to: 1 for parse
/// and IO problems, 2 for anything that fails validation (bad plant
/// data, incomparable report inputs), 3 for a simulated schedule that
/// does not reconcile with its plan, and 1 for internal solver faults,
/// which validated scenarios cannot trigger.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Validation(String),
    CrossCheck(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) | CliError::Internal(_) => 1,
            CliError::Validation(_) => 2,
            CliError::CrossCheck(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m)
            | CliError::Parse(m)
            | CliError::Validation(m)
            | CliError::CrossCheck(m)
            | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<BalanceError> for CliError {
    fn from(e: BalanceError) -> Self {
        match e {
            BalanceError::InvalidScenario(violations) => {
                let mut lines = vec!["scenario failed validation:".to_string()];
                for v in &violations {
                    lines.push(format!("  {}: {}", v.code, v.message));
                }
                CliError::Validation(lines.join("\n"))
            }
            BalanceError::PlanMismatch { .. } | BalanceError::RevenueParametersDiffer { .. } => {
                CliError::Validation(e.to_string())
            }
            BalanceError::AssignmentSpaceTooLarge { .. } => CliError::Validation(e.to_string()),
            BalanceError::Solver(_) | BalanceError::UnexpectedStatus { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        match e {
            ScheduleError::Balance(inner) => inner.into(),
            ScheduleError::UnknownResource { .. } => CliError::Validation(e.to_string()),
        }
    }
}

/// Machine-readable envelope for one command invocation, printed by
/// `--json`. Serialization is deterministic: all maps inside are
/// ordered, so equal results print byte-identical documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub scenario: String,
    pub mode: PlanMode,
    pub plan: CyclePlan,
    pub profit: ProfitBreakdown,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub increment: Option<IncrementReport>,
    pub version: String,
}

fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve { scenario, mode, json } => cmd_solve(&scenario, mode.into(), json),
        Command::Simulate { scenario, mode, json, gantt, gantt_text } => {
            cmd_simulate(&scenario, mode.into(), json, gantt.as_deref(), gantt_text)
        }
        Command::Report { baseline, optimized, mode, json } => {
            cmd_report(&baseline, &optimized, mode.into(), json)
        }
    }
}

/// Reads, parses and fully validates one scenario file.
fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))?;
    let scenario = load_scenario(&text)
        .map_err(|e| CliError::Parse(format!("`{}`: {e}", path.display())))?;
    let violations = validate(&scenario);
    if violations.is_empty() {
        Ok(scenario)
    } else {
        let mut lines = vec![format!("scenario `{}` failed validation:", path.display())];
        for v in &violations {
            lines.push(format!("  {}: {}", v.code, v.message));
        }
        Err(CliError::Validation(lines.join("\n")))
    }
}

fn print_json(result: &RunResult) {
    let text = serde_json::to_string_pretty(result).expect("result maps have string keys");
    println!("{text}");
}

fn cmd_solve(path: &Path, mode: PlanMode, json: bool) -> Result<(), CliError> {
    let scenario = read_scenario(path)?;
    let (plan, profit) = optimize(&scenario, mode)?;
    let result = RunResult {
        scenario: scenario.name.clone(),
        mode,
        plan,
        profit,
        schedule: None,
        increment: None,
        version: tool_version(),
    };
    if json {
        print_json(&result);
    } else {
        print!("{}", render_solution(&result));
    }
    Ok(())
}

fn cmd_simulate(
    path: &Path,
    mode: PlanMode,
    json: bool,
    gantt_path: Option<&Path>,
    gantt_text: bool,
) -> Result<(), CliError> {
    let scenario = read_scenario(path)?;
    let (plan, profit) = optimize(&scenario, mode)?;
    let timeline = build_schedule(&scenario, &plan)?;
    let report = simulate(&scenario, &timeline)?;
    let verdict = cross_check(&scenario, &plan, &report)?;

    if let Some(out) = gantt_path {
        fs::write(out, gantt::render_svg(&scenario, &timeline))
            .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", out.display())))?;
    }

    let result = RunResult {
        scenario: scenario.name.clone(),
        mode,
        plan,
        profit,
        schedule: Some(report),
        increment: None,
        version: tool_version(),
    };
    if json {
        print_json(&result);
    } else {
        print!("{}", render_solution(&result));
        print!("{}", render_schedule(&result, &timeline, &verdict));
        if gantt_text {
            print!("{}", gantt::render_text(&scenario, &timeline));
        }
    }

    if verdict.pass {
        Ok(())
    } else {
        let mut lines = vec!["schedule cross-check failed:".to_string()];
        for check in verdict.checks.iter().filter(|c| !c.pass) {
            lines.push(format!("  {}: {}", check.name, check.detail));
        }
        Err(CliError::CrossCheck(lines.join("\n")))
    }
}

fn cmd_report(baseline_path: &Path, optimized_path: &Path, mode: PlanMode, json: bool) -> Result<(), CliError> {
    let baseline = read_scenario(baseline_path)?;
    let optimized = read_scenario(optimized_path)?;
    let (baseline_plan, _) = optimize(&baseline, mode)?;
    let (optimized_plan, profit) = optimize(&optimized, mode)?;
    let increment = incremental_report(&baseline, &baseline_plan, &optimized, &optimized_plan)?;
    let result = RunResult {
        scenario: optimized.name.clone(),
        mode,
        plan: optimized_plan,
        profit,
        schedule: None,
        increment: Some(increment),
        version: tool_version(),
    };
    if json {
        print_json(&result);
    } else {
        print!("{}", render_increment(&result));
    }
    Ok(())
}

fn render_solution(result: &RunResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario `{}` ({} mode)\n\n", result.scenario, result.mode));

    let width = result
        .plan
        .cycles
        .keys()
        .chain(result.profit.effective_cycles_per_tank.keys())
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("furnace".len());
    out.push_str(&format!("  {:<width$}  {:>12}  {:>18}\n", "furnace", "cycles/day", "idle cost USD/day"));
    for (id, cycles) in &result.plan.cycles {
        let idle = result.profit.idle_cost_usd_per_furnace.get(id).copied().unwrap_or(0.0);
        out.push_str(&format!("  {id:<width$}  {cycles:>12.4}  {idle:>18.2}\n"));
    }
    out.push('\n');
    out.push_str(&format!("  {:<width$}  {:>20}\n", "tank", "effective cycles/day"));
    for (id, cycles) in &result.profit.effective_cycles_per_tank {
        out.push_str(&format!("  {id:<width$}  {cycles:>20.4}\n"));
    }
    let total: f64 = result.profit.effective_cycles_per_tank.values().sum();
    out.push_str(&format!("  {:<width$}  {total:>20.4}\n", "total"));

    let idle_total: f64 = result.profit.idle_cost_usd_per_furnace.values().sum();
    out.push('\n');
    out.push_str(&format!("  gross revenue  {:>14.2} USD/day\n", result.profit.gross_revenue_usd));
    out.push_str(&format!("  idle cost      {idle_total:>14.2} USD/day\n"));
    out.push_str(&format!("  objective      {:>14.2} USD/day\n", result.profit.objective_usd));
    if result.profit.binding_constraints.is_empty() {
        out.push_str("  binding constraints: none\n");
    } else {
        out.push_str(&format!("  binding constraints: {}\n", result.profit.binding_constraints.join(", ")));
    }
    out
}

fn render_schedule(result: &RunResult, timeline: &Timeline, verdict: &CrossCheckVerdict) -> String {
    let report = result.schedule.as_ref().expect("simulate always attaches a schedule report");
    let mut out = String::new();
    out.push('\n');
    out.push_str(&format!(
        "  schedule over {:.0} min: {} event(s), {} conflict(s)\n",
        timeline.horizon_min,
        timeline.events.len(),
        report.conflicts.len()
    ));
    for conflict in &report.conflicts {
        out.push_str(&format!("    {}: {}\n", conflict.code, conflict.message));
    }

    let width = report
        .utilization_per_resource
        .keys()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("resource".len());
    out.push('\n');
    out.push_str(&format!(
        "  {:<width$}  {:>14}  {:>11}  {:>13}\n",
        "resource", "achieved c/day", "utilization", "idle minutes"
    ));
    for (id, utilization) in &report.utilization_per_resource {
        let achieved = report
            .achieved_cycles_per_tank
            .get(id)
            .map_or_else(|| "-".to_string(), |c| format!("{c:.4}"));
        let idle = report
            .idle_minutes_per_furnace
            .get(id)
            .map_or_else(|| "-".to_string(), |m| format!("{m:.1}"));
        out.push_str(&format!(
            "  {id:<width$}  {achieved:>14}  {:>10.1}%  {idle:>13}\n",
            utilization * 100.0
        ));
    }

    out.push('\n');
    out.push_str("  cross-check:\n");
    for check in &verdict.checks {
        let state = if check.pass { "ok  " } else { "FAIL" };
        out.push_str(&format!("    {state}  {:<22}  {}\n", check.name, check.detail));
    }
    out
}

fn render_increment(result: &RunResult) -> String {
    let inc = result.increment.as_ref().expect("report always attaches an increment");
    let mut out = String::new();
    out.push_str(&format!("scenario `{}` vs baseline ({} mode)\n\n", result.scenario, result.mode));
    out.push_str(&format!("  {:<26}  {:>12}  {:>12}\n", "", "baseline", "optimized"));
    out.push_str(&format!(
        "  {:<26}  {:>12.4}  {:>12.4}\n",
        "effective cycles/day", inc.baseline_daily_cycles, inc.optimized_daily_cycles
    ));
    out.push_str(&format!(
        "  {:<26}  {:>12.2}  {:>12.2}\n",
        "net profit USD/day", inc.baseline_net_usd_per_day, inc.optimized_net_usd_per_day
    ));
    out.push('\n');
    out.push_str(&format!("  revenue per cycle   {:>12.2} USD\n", inc.revenue_per_cycle_usd));
    out.push_str(&format!("  additional labor    {:>12.2} USD/day\n", inc.additional_labor_cost_usd_per_day));
    out.push_str(&format!("  daily increment     {:>12.2} USD/day\n", inc.increment_usd_per_day));
    match inc.growth_percent {
        Some(growth) => out.push_str(&format!("  profit growth       {growth:>12.2} %\n")),
        None => out.push_str("  profit growth       n/a (baseline net is zero)\n"),
    }
    out
}
