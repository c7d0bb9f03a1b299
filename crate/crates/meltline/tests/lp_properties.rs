//! Property tests for the linear-programming layer, driven by seeded
//! random instances with small integer data so every claim can be
//! checked exactly or against an independent enumeration.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_int_lp, random_int_milp};
use meltline::lp::{solve_lp, solve_milp, LpProblem, LpStatus};

fn feasible(problem: &LpProblem, point: &[f64]) -> bool {
    point.iter().all(|&x| x >= -1e-7)
        && problem.constraints.iter().all(|row| {
            let lhs: f64 = row.coefficients.iter().zip(point).map(|(a, x)| a * x).sum();
            lhs <= row.rhs + 1e-7
        })
}

proptest! {
    // Nonnegative right-hand sides keep the origin feasible, so the
    // solver may report Optimal or Unbounded but never Infeasible; any
    // optimal point it returns must satisfy what it was given.
    #[test]
    fn optimal_points_are_feasible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instance = random_int_lp(&mut rng);
        let problem = instance.to_problem();
        let solution = solve_lp(&problem).unwrap();
        prop_assert_ne!(solution.status, LpStatus::Infeasible);
        if solution.status == LpStatus::Optimal {
            let point = solution.point.as_ref().unwrap();
            prop_assert!(feasible(&problem, point), "infeasible answer {:?}", point);
        }
    }

    // Stating a constraint twice changes nothing.
    #[test]
    fn duplicate_rows_are_harmless(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instance = random_int_lp(&mut rng);
        let problem = instance.to_problem();
        let mut doubled = problem.clone();
        doubled.constraints.push(problem.constraints[0].clone());
        let a = solve_lp(&problem).unwrap();
        let b = solve_lp(&doubled).unwrap();
        prop_assert_eq!(a.status, b.status);
        if let (Some(x), Some(y)) = (a.objective_value, b.objective_value) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{} vs {}", x, y);
        }
    }

    // Scaling the objective by a positive constant scales the optimum
    // and cannot change the status.
    #[test]
    fn positive_scaling_scales_the_optimum(seed in any::<u64>(), k in 1i64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instance = random_int_lp(&mut rng);
        let problem = instance.to_problem();
        let mut scaled = problem.clone();
        for c in &mut scaled.objective {
            *c *= k as f64;
        }
        let a = solve_lp(&problem).unwrap();
        let b = solve_lp(&scaled).unwrap();
        prop_assert_eq!(a.status, b.status);
        if let (Some(x), Some(y)) = (a.objective_value, b.objective_value) {
            let expected = k as f64 * x;
            prop_assert!((y - expected).abs() <= 1e-9 * expected.abs().max(1.0), "{} vs {}", y, expected);
        }
    }

    // Tightening a continuous problem to integers can only lose value,
    // and the point that comes back must be integral and feasible.
    #[test]
    fn integrality_never_gains(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instance = random_int_milp(&mut rng);
        let integral = solve_milp(&instance.to_problem()).unwrap();
        let relaxed = solve_lp(&instance.relaxation()).unwrap();
        prop_assert_eq!(integral.status, LpStatus::Optimal);
        prop_assert_eq!(relaxed.status, LpStatus::Optimal);
        let z_int = integral.objective_value.unwrap();
        let z_rel = relaxed.objective_value.unwrap();
        prop_assert!(z_int <= z_rel + 1e-9, "integer {} beats relaxation {}", z_int, z_rel);
        let point = integral.point.as_ref().unwrap();
        prop_assert!(point.iter().all(|x| (x - x.round()).abs() <= 1e-6), "fractional {:?}", point);
        prop_assert!(feasible(&instance.to_problem(), point));
    }
}

// Same input, same output: the solver takes no hidden state, so two
// runs must agree to the last bit (points, value, and pivot count).
#[test]
fn resolving_is_bitwise_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde7e); // stable suite
    for _ in 0..50 {
        let problem = random_int_lp(&mut rng).to_problem();
        let a = solve_lp(&problem).unwrap();
        let b = solve_lp(&problem).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.point, b.point);
        assert_eq!(a.objective_value, b.objective_value);
        assert_eq!(a.iterations, b.iterations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xde7f); // stable suite
    for _ in 0..20 {
        let problem = random_int_milp(&mut rng).to_problem();
        let a = solve_milp(&problem).unwrap();
        let b = solve_milp(&problem).unwrap();
        assert_eq!(a.point, b.point);
        assert_eq!(a.objective_value, b.objective_value);
        assert_eq!(a.nodes, b.nodes);
    }
}
