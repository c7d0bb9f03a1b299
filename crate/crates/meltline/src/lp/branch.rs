//! Depth-first branch and bound over the simplex relaxation.

use super::{simplex, LpConstraint, LpError, LpProblem, LpSolution, LpStatus};

/// A variable this close to an integer counts as integral.
const INT_EPS: f64 = 1e-6;
/// A node whose relaxation bound is within this of the incumbent is cut.
const PRUNE_EPS: f64 = 1e-9;

/// One branching decision: `x[var] <= value` or `x[var] >= value`.
#[derive(Clone, Copy)]
struct Bound {
    var: usize,
    value: f64,
    is_upper: bool,
}

impl Bound {
    fn as_row(&self, n: usize) -> LpConstraint {
        let mut coefficients = vec![0.0; n];
        if self.is_upper {
            coefficients[self.var] = 1.0;
            LpConstraint { coefficients, rhs: self.value }
        } else {
            coefficients[self.var] = -1.0;
            LpConstraint { coefficients, rhs: -self.value }
        }
    }
}

pub(super) fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let n = problem.num_variables();
    let mut stack: Vec<Vec<Bound>> = vec![Vec::new()];
    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut iterations = 0;
    let mut nodes = 0;

    while let Some(bounds) = stack.pop() {
        nodes += 1;
        let mut relaxation = problem.clone();
        relaxation.constraints.extend(bounds.iter().map(|b| b.as_row(n)));
        let relaxed = simplex::solve(&relaxation)?;
        iterations += relaxed.iterations;

        match relaxed.status {
            LpStatus::Infeasible => continue,
            // Branch bounds only shrink the feasible set, so this can only
            // happen at the root; the integer problem is unbounded too
            // whenever an integer point exists, and no finite answer can
            // be reported either way.
            LpStatus::Unbounded => {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    point: None,
                    objective_value: None,
                    iterations,
                    nodes,
                })
            }
            LpStatus::Optimal => {}
        }
        let point = relaxed.point.expect("optimal relaxation carries a point");
        let bound = relaxed.objective_value.expect("optimal relaxation carries a value");
        if let Some((_, best)) = &incumbent {
            if bound <= best + PRUNE_EPS {
                continue;
            }
        }

        match branch_variable(problem, &point) {
            None => {
                // Integral within tolerance, and the prune test above
                // already established it beats any incumbent.
                incumbent = Some((point, bound));
            }
            Some((var, value)) => {
                // Depth-first with the floor branch explored first.
                stack.push(bounds_with(&bounds, Bound { var, value: value.ceil(), is_upper: false }));
                stack.push(bounds_with(&bounds, Bound { var, value: value.floor(), is_upper: true }));
            }
        }
    }

    Ok(match incumbent {
        Some((point, value)) => LpSolution {
            status: LpStatus::Optimal,
            point: Some(point),
            objective_value: Some(value),
            iterations,
            nodes,
        },
        None => LpSolution { status: LpStatus::Infeasible, point: None, objective_value: None, iterations, nodes },
    })
}

fn bounds_with(bounds: &[Bound], extra: Bound) -> Vec<Bound> {
    let mut out = bounds.to_vec();
    out.push(extra);
    out
}

/// Picks the flagged variable to branch on: fractional part closest to
/// one half, lowest index on ties. `None` means the point is integral.
fn branch_variable(problem: &LpProblem, point: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, (&flagged, &value)) in problem.integrality.iter().zip(point).enumerate() {
        if !flagged {
            continue;
        }
        let fractional = value - value.floor();
        if fractional.min(1.0 - fractional) <= INT_EPS {
            continue;
        }
        let score = (fractional - 0.5).abs();
        if best.is_none_or(|(_, _, s)| score < s) {
            best = Some((j, value, score));
        }
    }
    best.map(|(j, value, _)| (j, value))
}
