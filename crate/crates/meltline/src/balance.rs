//! Profit model over daily cycle counts.
//!
//! One decision variable per furnace: how many melt cycles it runs per
//! day. Each cycle poured into a tank earns the tank's per-cycle rod
//! revenue scaled by both efficiencies, and every minute a furnace spends
//! melting is a minute it does not burn idle-heating cost, so the
//! objective credits each cycle with the reclaimed idle cost as well:
//!
//! ```text
//! maximise  sum_f r_f * (Eff_f * EffCast_t * rods_t * margin_t + CT_f * CR_f)
//!           - sum_f Cap_f * CR_f
//! subject to  CT_f * r_f <= Cap_f                                  per furnace
//!             sum_{f -> t} CT_t * r_f * Eff_f * EffCast_t <= Cap_t per tank
//! ```
//!
//! The constant term charges every furnace its full-day idle cost up front;
//! the per-cycle credit cancels it minute for minute, which makes the
//! objective value exactly gross revenue minus idle cost.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, LpConstraint, LpProblem, LpStatus};
use crate::scenario::{validate, Scenario, Violation, ViolationCode};

/// Constraint slack below this counts as binding; excess above it as a
/// capacity violation.
const CAPACITY_EPS: f64 = 1e-6;
/// Objective improvements below this are treated as ties.
const TIE_EPS: f64 = 1e-9;
/// Refuse assignment enumerations larger than this.
const MAX_ASSIGNMENTS: usize = 10_000;

/// Whether cycle counts may be fractional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    Continuous,
    Integer,
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanMode::Continuous => f.write_str("continuous"),
            PlanMode::Integer => f.write_str("integer"),
        }
    }
}

/// Daily melt cycle count per furnace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclePlan {
    pub mode: PlanMode,
    /// Furnace id to cycles per day, nonnegative.
    pub cycles: BTreeMap<String, f64>,
}

impl CyclePlan {
    /// Total planned melt cycles across all furnaces.
    pub fn total_cycles(&self) -> f64 {
        self.cycles.values().sum()
    }
}

/// Maps LP rows and columns back to scenario entities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramLegend {
    /// Furnace id of each variable, in scenario declaration order.
    pub variables: Vec<String>,
    /// Constraint id of each row, aligned with the problem's rows.
    pub constraints: Vec<String>,
}

/// Profit figures recomputed directly from a plan, independent of the
/// solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitBreakdown {
    /// Rod revenue per day, USD.
    pub gross_revenue_usd: f64,
    /// Idle heating cost per furnace per day, USD.
    pub idle_cost_usd_per_furnace: BTreeMap<String, f64>,
    /// Gross revenue minus total idle cost, USD per day.
    pub objective_usd: f64,
    /// Casting cycles arriving at each tank per day, after efficiencies.
    pub effective_cycles_per_tank: BTreeMap<String, f64>,
    /// Constraint ids with slack within tolerance of zero.
    pub binding_constraints: Vec<String>,
    /// Constraint ids the plan overruns; empty for feasible plans.
    pub capacity_violations: Vec<String>,
}

/// Comparison of an optimized scenario against a baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementReport {
    pub baseline_daily_cycles: f64,
    pub optimized_daily_cycles: f64,
    pub revenue_per_cycle_usd: f64,
    /// Optimized minus baseline wage bill, USD per day.
    pub additional_labor_cost_usd_per_day: f64,
    /// Daily profit gained by the optimized plan, USD.
    pub increment_usd_per_day: f64,
    pub baseline_net_usd_per_day: f64,
    pub optimized_net_usd_per_day: f64,
    /// Increment relative to the baseline net, in percent; absent when
    /// the baseline net is zero.
    pub growth_percent: Option<f64>,
}

/// Failure in the balancing layer.
#[derive(Debug, Error)]
pub enum BalanceError {
    #[error("scenario is invalid: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),
    #[error("plan does not match scenario: {detail}")]
    PlanMismatch { detail: String },
    #[error("scenarios do not share tank revenue parameters: {detail}")]
    RevenueParametersDiffer { detail: String },
    #[error("assignment enumeration exceeds {limit} candidates; refusing to search")]
    AssignmentSpaceTooLarge { limit: usize },
    #[error("solver rejected the balancing program: {0}")]
    Solver(#[from] lp::LpError),
    #[error("balancing program unexpectedly came back {status:?}")]
    UnexpectedStatus { status: LpStatus },
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")
}

/// Violations that make the profit arithmetic itself meaningless.
///
/// A tank nobody feeds is flagged by `validate` as a modelling smell, but
/// every computation here is well-defined with it (the tank simply earns
/// nothing), so the math entry points tolerate exactly that violation.
pub(crate) fn math_violations(scenario: &Scenario) -> Vec<Violation> {
    validate(scenario).into_iter().filter(|v| v.code != ViolationCode::UnfedTank).collect()
}

/// Checks that a plan names exactly the scenario's furnaces with finite,
/// nonnegative cycle counts.
pub(crate) fn check_plan_matches(scenario: &Scenario, plan: &CyclePlan) -> Result<(), BalanceError> {
    let furnace_ids: BTreeSet<&str> = scenario.furnaces.iter().map(|f| f.id.as_str()).collect();
    for id in plan.cycles.keys() {
        if !furnace_ids.contains(id.as_str()) {
            return Err(BalanceError::PlanMismatch {
                detail: format!("plan names furnace `{id}` which the scenario does not have"),
            });
        }
    }
    for f in &scenario.furnaces {
        match plan.cycles.get(&f.id) {
            None => {
                return Err(BalanceError::PlanMismatch {
                    detail: format!("plan has no cycle count for furnace `{}`", f.id),
                })
            }
            Some(&r) if !r.is_finite() || r < 0.0 => {
                return Err(BalanceError::PlanMismatch {
                    detail: format!("cycle count for furnace `{}` must be finite and >= 0 (got {r})", f.id),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Encodes a valid scenario as a maximisation program.
///
/// The legend names each variable by its furnace id and each row by
/// `furnace_capacity:<id>` or `tank_capacity:<id>`.
pub fn build_program(
    scenario: &Scenario,
    mode: PlanMode,
) -> Result<(LpProblem, ProgramLegend), BalanceError> {
    let violations = math_violations(scenario);
    if !violations.is_empty() {
        return Err(BalanceError::InvalidScenario(violations));
    }
    Ok(build_program_unchecked(scenario, mode))
}

/// Program construction without validation; used for assignment
/// candidates, where a tank may legitimately end up with no feeder.
fn build_program_unchecked(scenario: &Scenario, mode: PlanMode) -> (LpProblem, ProgramLegend) {
    let n = scenario.furnaces.len();
    let mut objective = Vec::with_capacity(n);
    let mut objective_constant = 0.0;
    for f in &scenario.furnaces {
        let tank = scenario
            .tank(&f.tank_id)
            .expect("unchecked build requires every tank_id to resolve");
        let revenue_per_cycle =
            f.output_efficiency * tank.casting_efficiency * f64::from(tank.rods_per_cycle) * tank.margin_per_rod_usd;
        objective.push(revenue_per_cycle + f.cycle_time_min * f.idle_cost_rate_usd_per_min);
        objective_constant -= f.daily_capacity_min * f.idle_cost_rate_usd_per_min;
    }

    let mut constraints = Vec::new();
    let mut row_ids = Vec::new();
    for (j, f) in scenario.furnaces.iter().enumerate() {
        let mut coefficients = vec![0.0; n];
        coefficients[j] = f.cycle_time_min;
        constraints.push(LpConstraint { coefficients, rhs: f.daily_capacity_min });
        row_ids.push(format!("furnace_capacity:{}", f.id));
    }
    for t in &scenario.tanks {
        let mut coefficients = vec![0.0; n];
        let mut any = false;
        for (j, f) in scenario.furnaces.iter().enumerate() {
            if f.tank_id == t.id {
                coefficients[j] = t.cycle_time_min * f.output_efficiency * t.casting_efficiency;
                any = true;
            }
        }
        if any {
            constraints.push(LpConstraint { coefficients, rhs: t.daily_capacity_min });
            row_ids.push(format!("tank_capacity:{}", t.id));
        }
    }

    let problem = LpProblem {
        objective,
        constraints,
        integrality: vec![mode == PlanMode::Integer; n],
        objective_constant,
    };
    let legend =
        ProgramLegend { variables: scenario.furnaces.iter().map(|f| f.id.clone()).collect(), constraints: row_ids };
    (problem, legend)
}

/// Finds the profit-maximising cycle plan for a valid scenario.
pub fn optimize(scenario: &Scenario, mode: PlanMode) -> Result<(CyclePlan, ProfitBreakdown), BalanceError> {
    let violations = math_violations(scenario);
    if !violations.is_empty() {
        return Err(BalanceError::InvalidScenario(violations));
    }
    optimize_unchecked(scenario, mode)
}

fn optimize_unchecked(
    scenario: &Scenario,
    mode: PlanMode,
) -> Result<(CyclePlan, ProfitBreakdown), BalanceError> {
    let (problem, legend) = build_program_unchecked(scenario, mode);
    let solution = match mode {
        PlanMode::Continuous => lp::solve_lp(&problem)?,
        PlanMode::Integer => lp::solve_milp(&problem)?,
    };
    if solution.status != LpStatus::Optimal {
        // r = 0 is always feasible and every variable is capped by its
        // furnace row, so this cannot happen for a well-formed program.
        return Err(BalanceError::UnexpectedStatus { status: solution.status });
    }
    let point = solution.point.expect("optimal solution carries a point");
    let cycles = legend
        .variables
        .iter()
        .cloned()
        .zip(point.iter().map(|&v| v.max(0.0)))
        .collect();
    let plan = CyclePlan { mode, cycles };
    let breakdown = evaluate_plan_unchecked(scenario, &plan)?;
    Ok((plan, breakdown))
}

/// Recomputes profit for a plan from first principles.
///
/// This is deliberately independent of the LP path so it can serve as a
/// cross-check on the solver. Plans that overrun a capacity are still
/// evaluated; the offending rows are listed in `capacity_violations`.
pub fn evaluate_plan(scenario: &Scenario, plan: &CyclePlan) -> Result<ProfitBreakdown, BalanceError> {
    let violations = math_violations(scenario);
    if !violations.is_empty() {
        return Err(BalanceError::InvalidScenario(violations));
    }
    evaluate_plan_unchecked(scenario, plan)
}

fn evaluate_plan_unchecked(scenario: &Scenario, plan: &CyclePlan) -> Result<ProfitBreakdown, BalanceError> {
    check_plan_matches(scenario, plan)?;

    let mut effective_cycles_per_tank = BTreeMap::new();
    let mut gross_revenue_usd = 0.0;
    for t in &scenario.tanks {
        let effective: f64 = scenario
            .furnaces_for_tank(&t.id)
            .iter()
            .map(|f| plan.cycles[&f.id] * f.output_efficiency * t.casting_efficiency)
            .sum();
        effective_cycles_per_tank.insert(t.id.clone(), effective);
        gross_revenue_usd += effective * f64::from(t.rods_per_cycle) * t.margin_per_rod_usd;
    }

    let mut idle_cost_usd_per_furnace = BTreeMap::new();
    let mut total_idle = 0.0;
    for f in &scenario.furnaces {
        let idle_minutes = f.daily_capacity_min - f.cycle_time_min * plan.cycles[&f.id];
        let cost = idle_minutes * f.idle_cost_rate_usd_per_min;
        total_idle += cost;
        idle_cost_usd_per_furnace.insert(f.id.clone(), cost);
    }

    let mut binding_constraints = Vec::new();
    let mut capacity_violations = Vec::new();
    let mut classify = |id: String, lhs: f64, rhs: f64| {
        if (lhs - rhs).abs() <= CAPACITY_EPS {
            binding_constraints.push(id);
        } else if lhs > rhs + CAPACITY_EPS {
            capacity_violations.push(id);
        }
    };
    for f in &scenario.furnaces {
        classify(
            format!("furnace_capacity:{}", f.id),
            f.cycle_time_min * plan.cycles[&f.id],
            f.daily_capacity_min,
        );
    }
    for t in &scenario.tanks {
        if scenario.furnaces_for_tank(&t.id).is_empty() {
            continue;
        }
        classify(
            format!("tank_capacity:{}", t.id),
            t.cycle_time_min * effective_cycles_per_tank[&t.id],
            t.daily_capacity_min,
        );
    }

    Ok(ProfitBreakdown {
        gross_revenue_usd,
        idle_cost_usd_per_furnace,
        objective_usd: gross_revenue_usd - total_idle,
        effective_cycles_per_tank,
        binding_constraints,
        capacity_violations,
    })
}

/// Compares an optimized configuration against a baseline that shares the
/// same tank revenue parameters (rods per cycle and margin per rod).
///
/// Nets are measured relative to the baseline's wage bill: the baseline
/// net is its gross revenue, the optimized net is gross revenue minus the
/// *additional* labor the optimized configuration hires.
pub fn incremental_report(
    baseline_scenario: &Scenario,
    baseline_plan: &CyclePlan,
    optimized_scenario: &Scenario,
    optimized_plan: &CyclePlan,
) -> Result<IncrementReport, BalanceError> {
    let baseline_tanks: BTreeMap<&str, (u32, f64)> = baseline_scenario
        .tanks
        .iter()
        .map(|t| (t.id.as_str(), (t.rods_per_cycle, t.margin_per_rod_usd)))
        .collect();
    let optimized_tanks: BTreeMap<&str, (u32, f64)> = optimized_scenario
        .tanks
        .iter()
        .map(|t| (t.id.as_str(), (t.rods_per_cycle, t.margin_per_rod_usd)))
        .collect();
    if baseline_tanks.keys().ne(optimized_tanks.keys()) {
        return Err(BalanceError::RevenueParametersDiffer {
            detail: "the two scenarios name different tanks".to_string(),
        });
    }
    for (id, (rods, margin)) in &baseline_tanks {
        let (o_rods, o_margin) = optimized_tanks[id];
        if o_rods != *rods || o_margin != *margin {
            return Err(BalanceError::RevenueParametersDiffer {
                detail: format!(
                    "tank `{id}`: baseline {rods} rods at {margin} USD, optimized {o_rods} rods at {o_margin} USD"
                ),
            });
        }
    }

    let baseline = evaluate_plan(baseline_scenario, baseline_plan)?;
    let optimized = evaluate_plan(optimized_scenario, optimized_plan)?;

    let baseline_daily_cycles: f64 = baseline.effective_cycles_per_tank.values().sum();
    let optimized_daily_cycles: f64 = optimized.effective_cycles_per_tank.values().sum();

    let additional_labor_cost_usd_per_day =
        optimized_scenario.labor.daily_cost_usd() - baseline_scenario.labor.daily_cost_usd();

    let baseline_net_usd_per_day = baseline.gross_revenue_usd;
    let optimized_net_usd_per_day = optimized.gross_revenue_usd - additional_labor_cost_usd_per_day;
    let increment_usd_per_day = optimized_net_usd_per_day - baseline_net_usd_per_day;

    let cycle_delta = optimized_daily_cycles - baseline_daily_cycles;
    let revenue_per_cycle_usd = if cycle_delta.abs() > 1e-9 {
        (optimized.gross_revenue_usd - baseline.gross_revenue_usd) / cycle_delta
    } else if optimized_daily_cycles > 1e-9 {
        optimized.gross_revenue_usd / optimized_daily_cycles
    } else {
        0.0
    };

    let growth_percent = if baseline_net_usd_per_day == 0.0 {
        None
    } else {
        Some(increment_usd_per_day / baseline_net_usd_per_day * 100.0)
    };

    Ok(IncrementReport {
        baseline_daily_cycles,
        optimized_daily_cycles,
        revenue_per_cycle_usd,
        additional_labor_cost_usd_per_day,
        increment_usd_per_day,
        baseline_net_usd_per_day,
        optimized_net_usd_per_day,
        growth_percent,
    })
}

/// Searches every furnace-to-tank assignment (at most two furnaces per
/// tank) for the most profitable configuration.
///
/// Existing `tank_id` fields are treated as mutable; everything else in
/// the scenario must be valid. Returns the winning furnace-to-tank map
/// together with its optimal plan and profit. Ties are broken towards
/// the lexicographically smallest assignment, taking furnaces in id
/// order and comparing assigned tank ids, so the result does not depend
/// on evaluation order. Enumerations beyond 10,000 candidates are
/// refused.
pub fn optimize_assignment(
    scenario: &Scenario,
    mode: PlanMode,
) -> Result<(BTreeMap<String, String>, CyclePlan, ProfitBreakdown), BalanceError> {
    let link_codes =
        [ViolationCode::OrphanFurnace, ViolationCode::UnfedTank, ViolationCode::RatioExceeded];
    let violations: Vec<Violation> = validate(scenario)
        .into_iter()
        .filter(|v| !link_codes.contains(&v.code))
        .collect();
    if !violations.is_empty() {
        return Err(BalanceError::InvalidScenario(violations));
    }

    let mut furnace_ids: Vec<&str> = scenario.furnaces.iter().map(|f| f.id.as_str()).collect();
    furnace_ids.sort_unstable();
    let mut tank_ids: Vec<&str> = scenario.tanks.iter().map(|t| t.id.as_str()).collect();
    tank_ids.sort_unstable();

    if count_assignments(furnace_ids.len(), tank_ids.len(), MAX_ASSIGNMENTS) > MAX_ASSIGNMENTS {
        return Err(BalanceError::AssignmentSpaceTooLarge { limit: MAX_ASSIGNMENTS });
    }

    let mut best: Option<(BTreeMap<String, String>, CyclePlan, ProfitBreakdown)> = None;
    let mut assignment = vec![0usize; furnace_ids.len()];
    let mut load = vec![0u32; tank_ids.len()];
    // Depth-first over furnaces in id order and tanks in id order visits
    // assignments in exactly the lexicographic tie-break order.
    search_assignments(
        scenario,
        mode,
        &furnace_ids,
        &tank_ids,
        0,
        &mut assignment,
        &mut load,
        &mut best,
    )?;
    best.ok_or(BalanceError::UnexpectedStatus { status: LpStatus::Infeasible })
}

fn count_assignments(furnaces: usize, tanks: usize, cap: usize) -> usize {
    fn rec(remaining: usize, load: &mut [u32], cap: usize, acc: &mut usize) {
        if *acc > cap {
            return;
        }
        if remaining == 0 {
            *acc += 1;
            return;
        }
        for t in 0..load.len() {
            if load[t] < 2 {
                load[t] += 1;
                rec(remaining - 1, load, cap, acc);
                load[t] -= 1;
            }
        }
    }
    let mut acc = 0;
    let mut load = vec![0u32; tanks];
    rec(furnaces, &mut load, cap, &mut acc);
    acc
}

#[allow(clippy::too_many_arguments)]
fn search_assignments(
    scenario: &Scenario,
    mode: PlanMode,
    furnace_ids: &[&str],
    tank_ids: &[&str],
    depth: usize,
    assignment: &mut Vec<usize>,
    load: &mut Vec<u32>,
    best: &mut Option<(BTreeMap<String, String>, CyclePlan, ProfitBreakdown)>,
) -> Result<(), BalanceError> {
    if depth == furnace_ids.len() {
        let mut candidate = scenario.clone();
        for (fi, &ti) in furnace_ids.iter().zip(assignment.iter()) {
            let furnace = candidate
                .furnaces
                .iter_mut()
                .find(|f| f.id == *fi)
                .expect("furnace ids come from the scenario");
            furnace.tank_id = tank_ids[ti].to_string();
        }
        let (plan, breakdown) = optimize_unchecked(&candidate, mode)?;
        let better = match best {
            None => true,
            Some((_, _, incumbent)) => breakdown.objective_usd > incumbent.objective_usd + TIE_EPS,
        };
        if better {
            let map = candidate.furnaces.iter().map(|f| (f.id.clone(), f.tank_id.clone())).collect();
            *best = Some((map, plan, breakdown));
        }
        return Ok(());
    }
    for t in 0..tank_ids.len() {
        if load[t] < 2 {
            load[t] += 1;
            assignment[depth] = t;
            search_assignments(scenario, mode, furnace_ids, tank_ids, depth + 1, assignment, load, best)?;
            load[t] -= 1;
        }
    }
    Ok(())
}
