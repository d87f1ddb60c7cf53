//! Dense two-phase primal simplex with Bland's rule. Sized for the small
//! LPs that come out of tabular MDPs (tens of variables, a few hundred rows).

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    /// Rows whose artificial variable could not be driven to zero.
    Infeasible { rows: Vec<usize> },
    /// Structural column along which the objective decreases without bound.
    Unbounded { column: usize },
}

struct Tableau {
    /// `rows x (cols + 1)`, last column is the right-hand side.
    cells: Vec<Vec<f64>>,
    /// Reduced-cost row, same width as `cells` rows.
    cost: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.cols + 1;
        let p = self.cells[row][col];
        for j in 0..width {
            self.cells[row][j] /= p;
        }
        self.cells[row][col] = 1.0;
        let pivot_row = self.cells[row].clone();
        for (i, r) in self.cells.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for j in 0..width {
                    r[j] -= factor * pivot_row[j];
                }
                r[col] = 0.0;
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for j in 0..width {
                self.cost[j] -= factor * pivot_row[j];
            }
            self.cost[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations on the current cost row, ignoring columns
    /// where `allowed` is false. Returns the unbounded column, if any.
    fn optimize(&mut self, allowed: &[bool]) -> Option<usize> {
        loop {
            // Bland: lowest-index improving column.
            let col = (0..self.cols).find(|&j| allowed[j] && self.cost[j] < -EPS)?;
            let mut best: Option<(usize, f64)> = None;
            for (i, r) in self.cells.iter().enumerate() {
                let a = r[col];
                if a > EPS {
                    let ratio = r[self.cols] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Some(col),
            }
        }
    }
}

/// Minimizes `objective · x` subject to `constraints` and `x >= 0`.
pub fn minimize(objective: &[f64], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();

    // Normalize to non-negative right-hand sides.
    let rows: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|c| {
            debug_assert_eq!(c.coeffs.len(), n);
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let first_artificial = n + slacks;

    let mut cells = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut artificial_row = vec![None; cols];
    let (mut next_slack, mut next_art) = (n, first_artificial);
    for (i, (coeffs, relation, rhs)) in rows.iter().enumerate() {
        cells[i][..n].copy_from_slice(coeffs);
        cells[i][cols] = *rhs;
        match relation {
            Relation::Le => {
                cells[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge | Relation::Eq => {
                if *relation == Relation::Ge {
                    cells[i][next_slack] = -1.0;
                    next_slack += 1;
                }
                cells[i][next_art] = 1.0;
                basis[i] = next_art;
                artificial_row[next_art] = Some(i);
                next_art += 1;
            }
        }
    }

    // Phase 1: minimize the sum of artificials, priced out against the basis.
    let mut cost = vec![0.0; cols + 1];
    for j in first_artificial..cols {
        cost[j] = 1.0;
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= first_artificial {
            for j in 0..=cols {
                cost[j] -= cells[i][j];
            }
        }
    }
    let mut tableau = Tableau { cells, cost, basis, cols };
    let all = vec![true; cols];
    tableau.optimize(&all);

    let infeasibility = -tableau.cost[cols];
    if infeasibility > 1e-8 {
        let rows = tableau
            .basis
            .iter()
            .enumerate()
            .filter(|&(i, &b)| b >= first_artificial && tableau.cells[i][cols] > 1e-8)
            .filter_map(|(_, &b)| artificial_row[b])
            .collect();
        return LpOutcome::Infeasible { rows };
    }

    // Drive zero-valued artificials out of the basis where possible.
    for i in 0..m {
        if tableau.basis[i] >= first_artificial {
            if let Some(j) = (0..first_artificial).find(|&j| tableau.cells[i][j].abs() > EPS) {
                tableau.pivot(i, j);
            }
        }
    }

    // Phase 2.
    let mut cost = vec![0.0; cols + 1];
    cost[..n].copy_from_slice(objective);
    for i in 0..m {
        let b = tableau.basis[i];
        let cb = cost[b];
        if cb != 0.0 {
            for j in 0..=cols {
                cost[j] -= cb * tableau.cells[i][j];
            }
        }
    }
    tableau.cost = cost;
    let mut allowed = vec![true; cols];
    allowed[first_artificial..].iter_mut().for_each(|a| *a = false);
    if let Some(col) = tableau.optimize(&allowed) {
        if col < n {
            return LpOutcome::Unbounded { column: col };
        }
        // A slack ray: report a basic structural variable that moves along it.
        let column = tableau
            .basis
            .iter()
            .enumerate()
            .find(|&(i, &b)| b < n && tableau.cells[i][col].abs() > EPS)
            .map_or(0, |(_, &b)| b);
        return LpOutcome::Unbounded { column };
    }

    let mut x = vec![0.0; n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            x[b] = tableau.cells[i][cols];
        }
    }
    let objective_value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal {
        x,
        objective: objective_value,
    }
}
