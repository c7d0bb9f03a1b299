//! End-to-end properties tying the optimizer, the plan evaluator, and
//! the scheduler together on seeded random scenarios.

mod common;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_feasible_plan, random_scenario};
use meltline::balance::{evaluate_plan, optimize, PlanMode};
use meltline::scenario::{load_scenario, Scenario};
use meltline::schedule::{build_schedule, simulate};

fn load_bundled(name: &str) -> Scenario {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    load_scenario(&text).unwrap_or_else(|e| panic!("cannot parse {}: {e}", path.display()))
}

// The optimum must weakly dominate every feasible plan we can draw.
#[test]
fn optimum_dominates_random_feasible_plans() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xce127); // stable suite
    for case in 0..25 {
        let scenario = random_scenario(&mut rng);
        let (_, breakdown) = optimize(&scenario, PlanMode::Continuous).unwrap();
        let best = breakdown.objective_usd;
        for draw in 0..1000 {
            let plan = random_feasible_plan(&mut rng, &scenario);
            let sampled = evaluate_plan(&scenario, &plan).unwrap().objective_usd;
            assert!(
                sampled <= best + 1e-6 * best.abs().max(1.0),
                "case {case} draw {draw}: sampled {sampled} beats optimum {best}"
            );
        }
    }
}

// With every furnace earning a strictly positive rate per cycle, some
// capacity row must be tight at the optimum — otherwise a small push
// on any furnace would improve the objective.
#[test]
fn positive_rates_force_a_binding_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb1d); // stable suite
    for case in 0..100 {
        let scenario = random_scenario(&mut rng);
        let all_positive = scenario.furnaces.iter().all(|f| {
            let tank = scenario.tank(&f.tank_id).unwrap();
            let rate = f.output_efficiency * tank.casting_efficiency * tank.rods_per_cycle as f64 * tank.margin_per_rod_usd
                + f.cycle_time_min * f.idle_cost_rate_usd_per_min;
            rate > 1e-9
        });
        if !all_positive {
            continue;
        }
        let (_, breakdown) = optimize(&scenario, PlanMode::Continuous).unwrap();
        assert!(
            !breakdown.binding_constraints.is_empty(),
            "case {case}: no binding constraint despite positive rates ({})",
            scenario.name
        );
    }
}

// Restricting cycles to whole numbers can only lose profit, and the
// integer plan must actually consist of whole numbers.
#[test]
fn integer_mode_never_beats_continuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x147); // stable suite
    for case in 0..100 {
        let scenario = random_scenario(&mut rng);
        let (_, continuous) = optimize(&scenario, PlanMode::Continuous).unwrap();
        let (plan, integral) = optimize(&scenario, PlanMode::Integer).unwrap();
        assert!(
            integral.objective_usd <= continuous.objective_usd + 1e-9 * continuous.objective_usd.abs().max(1.0),
            "case {case}: integer {} beats continuous {}",
            integral.objective_usd,
            continuous.objective_usd
        );
        for (id, r) in &plan.cycles {
            assert!((r - r.round()).abs() <= 1e-6, "case {case}: fractional cycles {r} on `{id}`");
        }
    }
}

#[test]
fn bundled_case_integer_plan_totals_four_cycles() {
    let scenario = load_bundled("case_study_optimized.json");
    let (plan, breakdown) = optimize(&scenario, PlanMode::Integer).unwrap();
    let total: f64 = plan.cycles.values().sum();
    assert!((total - 4.0).abs() <= 1e-6, "integer total {total}");
    let (_, continuous) = optimize(&scenario, PlanMode::Continuous).unwrap();
    assert!(breakdown.objective_usd <= continuous.objective_usd);
}

// Rebuilding and re-simulating must reproduce every byte: scheduling
// takes no hidden state and iterates in a fixed order.
#[test]
fn schedules_and_reports_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde7); // stable suite
    for _ in 0..25 {
        let scenario = random_scenario(&mut rng);
        let (plan, _) = optimize(&scenario, PlanMode::Continuous).unwrap();
        let first = build_schedule(&scenario, &plan).unwrap();
        let second = build_schedule(&scenario, &plan).unwrap();
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
        let report_a = simulate(&scenario, &first).unwrap();
        let report_b = simulate(&scenario, &first).unwrap();
        assert_eq!(
            serde_json::to_string(&report_a).unwrap(),
            serde_json::to_string(&report_b).unwrap()
        );
    }
}
