//! Shared helpers for the integration suites: exact-arithmetic reference
//! solvers and seeded random instance generators.
//!
//! The reference solvers deliberately share no code with the production
//! solver. LPs are checked against brute-force vertex enumeration in
//! exact `i128` rational arithmetic; integer programs are checked
//! against exhaustive enumeration of the (small, box-bounded) grid.

#![allow(dead_code)] // each integration target uses a subset of these

use std::collections::BTreeMap;

use rand::Rng;

use meltline::balance::{CyclePlan, PlanMode};
use meltline::lp::{LpConstraint, LpProblem};
use meltline::scenario::{validate, Furnace, LaborPlan, Scenario, TankCastingLine};

/// Artificial upper bound used to detect unbounded LPs: every vertex of
/// the generated problems has coordinates far below this, so an optimum
/// touching the box certifies an improving ray.
pub const BOX_BOUND: i128 = 1_000_000;

/// A linear program with all-integer data, so a reference solution can
/// be computed exactly.
#[derive(Debug, Clone)]
pub struct IntLp {
    pub objective: Vec<i128>,
    /// Rows `coefficients . x <= rhs`.
    pub rows: Vec<(Vec<i128>, i128)>,
}

impl IntLp {
    pub fn to_problem(&self) -> LpProblem {
        LpProblem {
            objective: self.objective.iter().map(|&c| c as f64).collect(),
            constraints: self
                .rows
                .iter()
                .map(|(coefficients, rhs)| LpConstraint {
                    coefficients: coefficients.iter().map(|&a| a as f64).collect(),
                    rhs: *rhs as f64,
                })
                .collect(),
            integrality: vec![false; self.objective.len()],
            objective_constant: 0.0,
        }
    }
}

/// Exact outcome of the reference LP solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    /// Optimal objective value as an exact fraction `num / den`, den > 0.
    Bounded { num: i128, den: i128 },
    Unbounded,
}

impl OracleOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            OracleOutcome::Bounded { num, den } => Some(num as f64 / den as f64),
            OracleOutcome::Unbounded => None,
        }
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0;
    for (j, &a) in m[0].iter().enumerate() {
        if a == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += sign * a * det(&minor);
    }
    acc
}

/// Brute-force reference LP solver over `x >= 0`, maximisation.
///
/// Requires `rhs >= 0` on every row so the origin is feasible (the
/// generated family guarantees it). Enumerates every basis of the system
/// extended with `x_j <= BOX_BOUND`, keeps the best vertex exactly, and
/// reports Unbounded precisely when the best value is attained only on
/// the artificial box (an improving ray escapes every true vertex).
pub fn lp_oracle(lp: &IntLp) -> OracleOutcome {
    let n = lp.objective.len();
    let mut rows: Vec<(Vec<i128>, i128)> = lp.rows.clone();
    for j in 0..n {
        let mut e = vec![0; n];
        e[j] = 1;
        rows.push((e.clone(), BOX_BOUND));
        let mut neg = vec![0; n];
        neg[j] = -1;
        rows.push((neg, 0));
    }

    let total = rows.len();
    assert!(total <= 20, "vertex enumeration is sized for small systems");
    let mut best: Option<(i128, i128)> = None;
    let mut best_attained_inside = false;

    for mask in 0u32..(1 << total) {
        if mask.count_ones() != n as u32 {
            continue;
        }
        let chosen: Vec<usize> = (0..total).filter(|i| mask & (1 << i) != 0).collect();
        let matrix: Vec<Vec<i128>> = chosen.iter().map(|&i| rows[i].0.clone()).collect();
        let mut d = det(&matrix);
        if d == 0 {
            continue;
        }
        let mut coords = Vec::with_capacity(n);
        for j in 0..n {
            let mut replaced = matrix.clone();
            for (r, &i) in chosen.iter().enumerate() {
                replaced[r][j] = rows[i].1;
            }
            coords.push(det(&replaced));
        }
        if d < 0 {
            d = -d;
            for c in &mut coords {
                *c = -*c;
            }
        }
        // Feasible iff every row holds exactly: a.x <= b  <=>  a.num <= b*d.
        let feasible = rows.iter().all(|(a, b)| {
            let lhs: i128 = a.iter().zip(&coords).map(|(ai, xi)| ai * xi).sum();
            lhs <= b * d
        });
        if !feasible {
            continue;
        }
        let inside = coords.iter().all(|&c| c < BOX_BOUND * d);
        let num: i128 = lp.objective.iter().zip(&coords).map(|(ci, xi)| ci * xi).sum();
        match best {
            None => {
                best = Some((num, d));
                best_attained_inside = inside;
            }
            Some((bn, bd)) => match (num * bd).cmp(&(bn * d)) {
                std::cmp::Ordering::Greater => {
                    best = Some((num, d));
                    best_attained_inside = inside;
                }
                std::cmp::Ordering::Equal => best_attained_inside |= inside,
                std::cmp::Ordering::Less => {}
            },
        }
    }

    let (num, den) = best.expect("origin is feasible, so some vertex must be");
    if best_attained_inside {
        OracleOutcome::Bounded { num, den }
    } else {
        OracleOutcome::Unbounded
    }
}

/// An all-integer program with explicit per-variable upper bounds, small
/// enough for exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct IntMilp {
    pub objective: Vec<i128>,
    pub rows: Vec<(Vec<i128>, i128)>,
    /// Inclusive upper bound per variable; the grid is `0..=upper[j]`.
    pub upper: Vec<i128>,
}

impl IntMilp {
    /// The same program in solver form, box bounds as ordinary rows and
    /// every variable flagged integer.
    pub fn to_problem(&self) -> LpProblem {
        let n = self.objective.len();
        let mut constraints: Vec<LpConstraint> = self
            .rows
            .iter()
            .map(|(coefficients, rhs)| LpConstraint {
                coefficients: coefficients.iter().map(|&a| a as f64).collect(),
                rhs: *rhs as f64,
            })
            .collect();
        for (j, &u) in self.upper.iter().enumerate() {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            constraints.push(LpConstraint { coefficients: e, rhs: u as f64 });
        }
        LpProblem {
            objective: self.objective.iter().map(|&c| c as f64).collect(),
            constraints,
            integrality: vec![true; n],
            objective_constant: 0.0,
        }
    }

    pub fn relaxation(&self) -> LpProblem {
        let mut p = self.to_problem();
        p.integrality = vec![false; self.objective.len()];
        p
    }
}

/// Exhaustive reference for [`IntMilp`]: the exact optimal value over
/// the integer grid (the origin is always feasible for the generated
/// family, so an optimum exists).
pub fn milp_oracle(milp: &IntMilp) -> i128 {
    let n = milp.objective.len();
    let mut point = vec![0i128; n];
    let mut best: Option<i128> = None;
    loop {
        let feasible = milp
            .rows
            .iter()
            .all(|(a, b)| a.iter().zip(&point).map(|(ai, xi)| ai * xi).sum::<i128>() <= *b);
        if feasible {
            let value = milp.objective.iter().zip(&point).map(|(ci, xi)| ci * xi).sum::<i128>();
            best = Some(best.map_or(value, |b: i128| b.max(value)));
        }
        // Odometer increment over the grid.
        let mut j = 0;
        loop {
            if j == n {
                return best.expect("the origin satisfies every generated row");
            }
            if point[j] < milp.upper[j] {
                point[j] += 1;
                break;
            }
            point[j] = 0;
            j += 1;
        }
    }
}

/// Random integer LP: n <= 4 variables, m <= 6 rows, coefficients in
/// [-10, 10], right-hand sides in [0, 10] so the origin is feasible.
pub fn random_int_lp<R: Rng>(rng: &mut R) -> IntLp {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=6);
    let objective = (0..n).map(|_| rng.gen_range(-10..=10)).collect();
    let rows = (0..m)
        .map(|_| ((0..n).map(|_| rng.gen_range(-10..=10)).collect(), rng.gen_range(0..=10)))
        .collect();
    IntLp { objective, rows }
}

/// Random box-bounded integer program: n <= 3 variables with upper
/// bounds <= 8, up to 4 extra rows, nonnegative right-hand sides.
pub fn random_int_milp<R: Rng>(rng: &mut R) -> IntMilp {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(0..=4);
    IntMilp {
        objective: (0..n).map(|_| rng.gen_range(-8..=8)).collect(),
        rows: (0..m)
            .map(|_| ((0..n).map(|_| rng.gen_range(-5..=5)).collect(), rng.gen_range(0..=30)))
            .collect(),
        upper: (0..n).map(|_| rng.gen_range(0..=8)).collect(),
    }
}

fn random_furnace<R: Rng>(rng: &mut R, id: &str, tank_id: &str) -> Furnace {
    let cycle_time_min = rng.gen_range(50.0..600.0);
    Furnace {
        id: id.to_string(),
        cycle_time_min,
        daily_capacity_min: rng.gen_range(cycle_time_min..1600.0),
        output_efficiency: rng.gen_range(0.5..=1.0),
        idle_cost_rate_usd_per_min: rng.gen_range(0.0..0.3),
        tank_id: tank_id.to_string(),
    }
}

fn random_tank<R: Rng>(rng: &mut R, id: &str) -> TankCastingLine {
    let cycle_time_min = rng.gen_range(50.0..500.0);
    TankCastingLine {
        id: id.to_string(),
        cycle_time_min,
        daily_capacity_min: rng.gen_range(cycle_time_min..1600.0),
        casting_efficiency: rng.gen_range(0.5..=1.0),
        rods_per_cycle: rng.gen_range(1..=50),
        margin_per_rod_usd: rng.gen_range(0.0..1000.0),
    }
}

/// Random valid scenario with at most 3 furnaces and 2 tanks; every tank
/// is fed and no tank has more than two feeders.
pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    // (furnaces, tanks) shapes that can satisfy fed-tank and 2:1 rules.
    let shapes: [(usize, usize); 4] = [(1, 1), (2, 1), (2, 2), (3, 2)];
    let (nf, nt) = shapes[rng.gen_range(0..shapes.len())];
    let tanks: Vec<TankCastingLine> = (0..nt).map(|i| random_tank(rng, &format!("T{}", i + 1))).collect();
    let mut assignments: Vec<usize> = (0..nt).collect(); // each tank fed once
    for _ in nt..nf {
        // Remaining furnaces go anywhere with a free slot (max 2 per tank).
        loop {
            let t = rng.gen_range(0..nt);
            if assignments.iter().filter(|&&a| a == t).count() < 2 {
                assignments.push(t);
                break;
            }
        }
    }
    let furnaces: Vec<Furnace> = assignments
        .iter()
        .enumerate()
        .map(|(i, &t)| random_furnace(rng, &format!("F{}", i + 1), &tanks[t].id))
        .collect();
    let scenario = Scenario {
        name: format!("random_{nf}x{nt}"),
        furnaces,
        tanks,
        labor: LaborPlan {
            workers_total: rng.gen_range(1..=20),
            shifts_per_day: rng.gen_range(1..=3),
            wage_usd_per_worker_per_day: rng.gen_range(0.0..100.0),
        },
    };
    let violations = validate(&scenario);
    assert!(violations.is_empty(), "generator produced an invalid scenario: {violations:?}");
    scenario
}

/// Random plan guaranteed feasible for the scenario: cycle counts are
/// drawn within furnace capacity, then the whole vector is shrunk until
/// every tank row holds.
pub fn random_feasible_plan<R: Rng>(rng: &mut R, scenario: &Scenario) -> CyclePlan {
    let mut cycles: BTreeMap<String, f64> = scenario
        .furnaces
        .iter()
        .map(|f| {
            let max = f.daily_capacity_min / f.cycle_time_min;
            (f.id.clone(), rng.gen_range(0.0..=max))
        })
        .collect();
    let mut worst_ratio: f64 = 1.0;
    for t in &scenario.tanks {
        let load: f64 = scenario
            .furnaces_for_tank(&t.id)
            .iter()
            .map(|f| cycles[&f.id] * f.output_efficiency * t.casting_efficiency * t.cycle_time_min)
            .sum();
        if load > t.daily_capacity_min {
            worst_ratio = worst_ratio.max(load / t.daily_capacity_min);
        }
    }
    if worst_ratio > 1.0 {
        let shrink = 0.999 / worst_ratio;
        for r in cycles.values_mut() {
            *r *= shrink;
        }
    }
    CyclePlan { mode: PlanMode::Continuous, cycles }
}
