//! Exact optimal values for a [`ValidatedMdp`].
//!
//! [`solve_lp`] finds the optimal state values as the solution of
//!
//! ```text
//! minimize    sum_s v(s)
//! subject to  v(s) >= r(s,a) + gamma * sum_s' P(s'|s,a) v(s')   for all non-terminal s, all a
//!             v(s)  = 0                                          for terminal s
//! ```
//!
//! [`value_iteration`] computes the same fixed point by repeated Bellman
//! backups and serves as an independent check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ActionId, ValidatedMdp};

pub mod report;
pub(crate) mod simplex;

pub use report::SolveReport;

use simplex::{Constraint, LpOutcome, Relation};

/// Ties within this tolerance go to the lowest action index.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// The optimal return diverges: some policy collects positive reward
    /// forever without discounting.
    #[error("unbounded: optimal return diverges from state `{state}` (gamma = 1 with a positive-reward cycle)")]
    Unbounded { state: String },
    /// Undiscounted, with a zero-reward cycle that never terminates; the LP
    /// has no finite minimizer.
    #[error("improper: value of state `{state}` is not determined by the linear program (gamma = 1 with a non-terminating zero-reward cycle)")]
    Improper { state: String },
    #[error("infeasible linear program (internal error)")]
    Infeasible,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("value iteration did not converge after {iterations} iterations (last change {delta})")]
    NoConvergence { iterations: usize, delta: f64 },
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction {
    pub values: Vec<f64>,
}

impl ValueFunction {
    pub fn get(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sup-norm distance.
    pub fn max_abs_diff(&self, other: &ValueFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    num_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn num_states(&self) -> usize {
        self.values.len() / self.num_actions
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.num_actions + action]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.num_actions..(state + 1) * self.num_actions]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.num_actions)
    }

    /// Best action in `state`; near-ties go to the lowest index.
    pub fn greedy_action(&self, state: usize) -> ActionId {
        let row = self.row(state);
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ActionId(row.iter().position(|&q| q >= best - TIE_TOLERANCE).unwrap_or(0))
    }

    pub fn greedy_policy(&self) -> Vec<ActionId> {
        (0..self.num_states()).map(|s| self.greedy_action(s)).collect()
    }

    /// All actions within [`TIE_TOLERANCE`] of the best one.
    pub fn greedy_set(&self, state: usize) -> Vec<ActionId> {
        let row = self.row(state);
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..row.len())
            .filter(|&a| row[a] >= best - TIE_TOLERANCE)
            .map(ActionId)
            .collect()
    }

    pub fn state_values(&self) -> ValueFunction {
        ValueFunction {
            values: self
                .rows()
                .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect(),
        }
    }
}

/// Optimal values and action values together.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub v: ValueFunction,
    pub q: QTable,
}

pub fn solve(m: &ValidatedMdp) -> Result<Solution, SolverError> {
    let v = solve_lp(m)?;
    let q = compute_q_table(m, &v)?;
    Ok(Solution { v, q })
}

/// Solves the Bellman optimality LP. Terminal values are pinned to zero and
/// each free value is split as `v = v⁺ - v⁻`.
pub fn solve_lp(m: &ValidatedMdp) -> Result<ValueFunction, SolverError> {
    let ns = m.num_states();
    let free: Vec<usize> = (0..ns).filter(|&s| !m.is_terminal(s)).collect();
    let mut column = vec![usize::MAX; ns];
    for (j, &s) in free.iter().enumerate() {
        column[s] = j;
    }
    let k = free.len();
    if k == 0 {
        return Ok(ValueFunction { values: vec![0.0; ns] });
    }

    let gamma = m.discount();
    let mut constraints = Vec::with_capacity(k * m.num_actions());
    let mut row_state = Vec::with_capacity(k * m.num_actions());
    for &s in &free {
        for a in 0..m.num_actions() {
            let mut coeffs = vec![0.0; 2 * k];
            coeffs[column[s]] += 1.0;
            for (next, &p) in m.transition_row(s, a).iter().enumerate() {
                if p != 0.0 && !m.is_terminal(next) {
                    coeffs[column[next]] -= gamma * p;
                }
            }
            for j in 0..k {
                coeffs[k + j] = -coeffs[j];
            }
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Ge,
                rhs: m.expected_reward(s, a),
            });
            row_state.push(s);
        }
    }
    let mut objective = vec![1.0; 2 * k];
    objective[k..].iter_mut().for_each(|c| *c = -1.0);

    let name = |s: usize| m.states()[s].name.clone();
    match simplex::minimize(&objective, &constraints) {
        LpOutcome::Optimal { x, .. } => {
            let mut values = vec![0.0; ns];
            for (j, &s) in free.iter().enumerate() {
                values[s] = x[j] - x[k + j];
            }
            let lp = ValueFunction { values };
            Ok(polish(m, &lp).unwrap_or(lp))
        }
        LpOutcome::Infeasible { rows } => match rows.first() {
            Some(&row) => Err(SolverError::Unbounded {
                state: name(row_state[row]),
            }),
            None => Err(SolverError::Infeasible),
        },
        LpOutcome::Unbounded { column } => Err(SolverError::Improper {
            state: name(free[column % k]),
        }),
    }
}

/// Re-evaluates the greedy policy of `approx` exactly. Returns `None` when
/// the policy's linear system is singular or the result does not satisfy
/// the optimality conditions better than `approx` does.
fn polish(m: &ValidatedMdp, approx: &ValueFunction) -> Option<ValueFunction> {
    let q = compute_q_table(m, approx).ok()?;
    let policy = q.greedy_policy();
    let ns = m.num_states();
    let free: Vec<usize> = (0..ns).filter(|&s| !m.is_terminal(s)).collect();
    let k = free.len();
    let mut index = vec![usize::MAX; ns];
    for (j, &s) in free.iter().enumerate() {
        index[s] = j;
    }
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (i, &s) in free.iter().enumerate() {
        let act = policy[s].0;
        a[i][i] += 1.0;
        for (next, &p) in m.transition_row(s, act).iter().enumerate() {
            if p != 0.0 && !m.is_terminal(next) {
                a[i][index[next]] -= m.discount() * p;
            }
        }
        b[i] = m.expected_reward(s, act);
    }
    let x = solve_dense(a, b)?;
    let mut values = vec![0.0; ns];
    for (j, &s) in free.iter().enumerate() {
        values[s] = x[j];
    }
    let exact = ValueFunction { values };
    let residual = |v: &ValueFunction| bellman_residual(m, v);
    if exact.max_abs_diff(approx) <= 1e-6 && residual(&exact) <= residual(approx).max(1e-12) {
        Some(exact)
    } else {
        None
    }
}

/// `max_s |v(s) - max_a q(s,a)|` over non-terminal states.
pub fn bellman_residual(m: &ValidatedMdp, v: &ValueFunction) -> f64 {
    (0..m.num_states())
        .filter(|&s| !m.is_terminal(s))
        .map(|s| {
            let best = (0..m.num_actions())
                .map(|a| m.backup(s, a, &v.values))
                .fold(f64::NEG_INFINITY, f64::max);
            (v.values[s] - best).abs()
        })
        .fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for j in col..n {
                    a[row][j] -= factor * a[col][j];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| a[row][j] * x[j]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// `q(s,a) = r(s,a) + gamma * sum_s' P(s'|s,a) v(s')`; zero for terminal states.
pub fn compute_q_table(m: &ValidatedMdp, v: &ValueFunction) -> Result<QTable, SolverError> {
    if v.len() != m.num_states() {
        return Err(SolverError::DimensionMismatch {
            expected: m.num_states(),
            got: v.len(),
        });
    }
    let mut values = Vec::with_capacity(m.num_states() * m.num_actions());
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            values.push(if m.is_terminal(s) { 0.0 } else { m.backup(s, a, &v.values) });
        }
    }
    Ok(QTable {
        num_actions: m.num_actions(),
        values,
    })
}

/// One synchronous Bellman optimality backup.
pub fn bellman_sweep(m: &ValidatedMdp, v: &ValueFunction) -> ValueFunction {
    let values = (0..m.num_states())
        .map(|s| {
            if m.is_terminal(s) {
                0.0
            } else {
                (0..m.num_actions())
                    .map(|a| m.backup(s, a, &v.values))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .collect();
    ValueFunction { values }
}

/// Iterates [`bellman_sweep`] from zero until the sup-norm change is at most
/// `tol`.
pub fn value_iteration(m: &ValidatedMdp, tol: f64, max_iter: usize) -> Result<ValueFunction, SolverError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SolverError::InvalidTolerance(tol));
    }
    let mut v = ValueFunction {
        values: vec![0.0; m.num_states()],
    };
    let mut delta = f64::INFINITY;
    for _ in 0..max_iter {
        let next = bellman_sweep(m, &v);
        delta = next.max_abs_diff(&v);
        v = next;
        if delta <= tol {
            return Ok(v);
        }
    }
    Err(SolverError::NoConvergence {
        iterations: max_iter,
        delta,
    })
}
