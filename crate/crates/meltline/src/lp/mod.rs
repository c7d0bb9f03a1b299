//! A small dense linear-programming engine.
//!
//! Problems are maximisations in standard inequality form: choose `x >= 0`
//! maximising `c'x + k` subject to `Ax <= b`. Continuous problems are
//! solved with a two-phase simplex using Bland's anti-cycling rule;
//! mixed-integer problems by depth-first branch and bound on top of it.
//!
//! The engine is dimensioned for line-balancing programs (a handful of
//! variables and rows), not for large sparse models.

mod branch;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One `coefficients . x <= rhs` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpConstraint {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

/// A maximisation problem over nonnegative variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    /// Objective coefficients, one per variable.
    pub objective: Vec<f64>,
    /// Inequality rows, all of sense `<=`.
    pub constraints: Vec<LpConstraint>,
    /// Variables flagged `true` must take integer values.
    pub integrality: Vec<bool>,
    /// Constant added to the objective value (not to the row activity).
    pub objective_constant: f64,
}

impl LpProblem {
    /// Number of variables.
    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    /// Checks shape and finiteness of the problem data.
    pub(crate) fn check_well_formed(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if n == 0 {
            return Err(LpError::Empty);
        }
        if self.integrality.len() != n {
            return Err(LpError::DimensionMismatch {
                detail: format!(
                    "integrality has {} entries but there are {n} variables",
                    self.integrality.len()
                ),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) || !self.objective_constant.is_finite() {
            return Err(LpError::NonFinite { detail: "objective contains a non-finite value".into() });
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(LpError::DimensionMismatch {
                    detail: format!(
                        "constraint {i} has {} coefficients but there are {n} variables",
                        row.coefficients.len()
                    ),
                });
            }
            if row.coefficients.iter().any(|a| !a.is_finite()) || !row.rhs.is_finite() {
                return Err(LpError::NonFinite {
                    detail: format!("constraint {i} contains a non-finite value"),
                });
            }
        }
        Ok(())
    }
}

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    /// A maximiser was found.
    Optimal,
    /// No point satisfies the constraints.
    Infeasible,
    /// The objective can be made arbitrarily large.
    Unbounded,
}

/// Result of [`solve_lp`] or [`solve_milp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point; present only when `status` is [`LpStatus::Optimal`].
    pub point: Option<Vec<f64>>,
    /// `c'x + objective_constant` at the optimal point.
    pub objective_value: Option<f64>,
    /// Simplex pivots performed, summed over all relaxations solved.
    pub iterations: usize,
    /// Branch-and-bound nodes processed; 0 for a pure LP solve.
    pub nodes: usize,
}

impl LpSolution {
    pub(crate) fn non_optimal(status: LpStatus, iterations: usize) -> Self {
        LpSolution { status, point: None, objective_value: None, iterations, nodes: 0 }
    }
}

/// Rejection of malformed input, as opposed to an infeasible model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("problem has no variables")]
    Empty,
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("non-finite input: {detail}")]
    NonFinite { detail: String },
    /// Safety valve; Bland's rule terminates, so hitting this means the
    /// tableau has been corrupted by numerical noise.
    #[error("simplex did not terminate within {limit} pivots")]
    IterationLimit { limit: usize },
}

/// Solves the continuous relaxation (integrality flags are ignored).
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.check_well_formed()?;
    simplex::solve(problem)
}

/// Solves the problem honouring integrality flags.
///
/// With no flags set this is exactly [`solve_lp`]. Otherwise a depth-first
/// branch-and-bound search runs on the continuous relaxation: branching on
/// the flagged variable whose fractional part is closest to one half
/// (lowest index on ties), exploring the floor branch first, and pruning
/// any node whose relaxation bound cannot beat the incumbent.
pub fn solve_milp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.check_well_formed()?;
    if !problem.integrality.iter().any(|&flag| flag) {
        return simplex::solve(problem);
    }
    branch::solve(problem)
}
