//! Two-phase dense tableau simplex with Bland's anti-cycling rule.
//!
//! Column layout: structural variables, then one slack per row, then any
//! phase-one artificials. Right-hand sides are kept nonnegative
//! throughout, so the basis always reads off a feasible point.

use super::{LpError, LpProblem, LpSolution, LpStatus};

/// Smallest tableau entry treated as a usable pivot.
const PIVOT_EPS: f64 = 1e-9;
/// Reduced costs closer to zero than this do not trigger a pivot.
const COST_EPS: f64 = 1e-9;
/// Residual phase-one infeasibility regarded as zero.
const FEAS_EPS: f64 = 1e-7;
/// Safety valve; Bland's rule terminates long before this.
const MAX_PIVOTS: usize = 50_000;

struct Tableau {
    /// `rows[i]` holds the current coefficients of constraint `i`.
    rows: Vec<Vec<f64>>,
    /// Nonnegative right-hand sides, one per row.
    rhs: Vec<f64>,
    /// Basic column of each row.
    basis: Vec<usize>,
    /// Columns eligible to enter the basis (artificials are excluded).
    enterable: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for a in &mut self.rows[row] {
            *a /= p;
        }
        self.rhs[row] /= p;
        self.rows[row][col] = 1.0;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..self.rows[i].len() {
                self.rows[i][j] -= factor * self.rows[row][j];
            }
            self.rows[i][col] = 0.0;
            self.rhs[i] -= factor * self.rhs[row];
            if self.rhs[i].abs() < 1e-12 {
                self.rhs[i] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Reduced costs `c_j - c_B . T_j` for the given column costs.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut reduced = costs.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = costs[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(row) {
                *r -= cb * a;
            }
        }
        reduced
    }

    /// Runs Bland-rule pivots until no reduced cost is positive.
    ///
    /// Returns `false` if an improving column has no positive entry, i.e.
    /// the objective is unbounded above.
    fn optimise(&mut self, costs: &[f64]) -> Result<bool, LpError> {
        let mut reduced = self.reduced_costs(costs);
        loop {
            // Bland: the entering column is the lowest-index improving one.
            let Some(col) = (0..self.enterable).find(|&j| reduced[j] > COST_EPS) else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                let better = match leaving {
                    None => true,
                    Some((best_row, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12 * best_ratio.abs().max(1.0);
                        // Bland again: on ratio ties keep the row whose
                        // basic variable has the lowest index.
                        (tie && self.basis[i] < self.basis[best_row]) || (!tie && ratio < best_ratio)
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(false);
            };
            self.pivot(row, col);
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit { limit: MAX_PIVOTS });
            }
            reduced = self.reduced_costs(costs);
        }
    }
}

pub(super) fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let n = problem.num_variables();
    let m = problem.constraints.len();

    let needs_phase_one: Vec<bool> = problem.constraints.iter().map(|c| c.rhs < 0.0).collect();
    let artificials = needs_phase_one.iter().filter(|&&a| a).count();
    let width = n + m + artificials;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_artificial = n + m;
    for (i, c) in problem.constraints.iter().enumerate() {
        let mut row = vec![0.0; width];
        let flip = if needs_phase_one[i] { -1.0 } else { 1.0 };
        for (j, &a) in c.coefficients.iter().enumerate() {
            row[j] = flip * a;
        }
        row[n + i] = flip;
        rhs.push(flip * c.rhs);
        if needs_phase_one[i] {
            row[next_artificial] = 1.0;
            basis.push(next_artificial);
            next_artificial += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    let mut tableau = Tableau { rows, rhs, basis, enterable: n + m, pivots: 0 };

    if artificials > 0 {
        // Phase one: maximise minus the sum of artificials. Feasibility of
        // the original system is equivalent to driving that sum to zero.
        // The phase-one objective is bounded above by zero, so a `false`
        // return only means progress stalled below tolerance; the residual
        // check below decides either way.
        let mut phase_one_costs = vec![0.0; width];
        for cost in phase_one_costs.iter_mut().skip(n + m) {
            *cost = -1.0;
        }
        tableau.optimise(&phase_one_costs)?;
        let residual: f64 = tableau
            .basis
            .iter()
            .zip(&tableau.rhs)
            .filter(|(&b, _)| b >= n + m)
            .map(|(_, &v)| v)
            .sum();
        if residual > FEAS_EPS {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, tableau.pivots));
        }

        // Pivot leftover zero-valued artificials out of the basis; a row
        // that offers no real pivot column is a redundant constraint.
        let mut i = 0;
        while i < tableau.rows.len() {
            if tableau.basis[i] < n + m {
                i += 1;
                continue;
            }
            match (0..n + m).find(|&j| tableau.rows[i][j].abs() > PIVOT_EPS) {
                Some(j) => {
                    tableau.pivot(i, j);
                    i += 1;
                }
                None => {
                    tableau.rows.remove(i);
                    tableau.rhs.remove(i);
                    tableau.basis.remove(i);
                }
            }
        }
        for row in &mut tableau.rows {
            row.truncate(n + m);
        }
    }

    let mut phase_two_costs = vec![0.0; n + m];
    phase_two_costs[..n].copy_from_slice(&problem.objective);
    if !tableau.optimise(&phase_two_costs)? {
        return Ok(LpSolution::non_optimal(LpStatus::Unbounded, tableau.pivots));
    }

    let mut x = vec![0.0; n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            x[b] = tableau.rhs[i];
        }
    }
    let objective_value =
        problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>() + problem.objective_constant;
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point: Some(x),
        objective_value: Some(objective_value),
        iterations: tableau.pivots,
        nodes: 0,
    })
}
