//! Exact linear programming over the rationals.
//!
//! Problems have the fixed form `maximize c·x subject to Ax ≤ b, x ≥ 0`. The solver
//! is a dense two-phase tableau simplex with Bland's pivoting rule, so it terminates
//! on degenerate problems and produces the same pivot sequence for the same input.
//! Optimal returns carry a basic primal solution and the complementary basic dual,
//! read off the reduced costs of the slack columns.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(
        objective: Vec<Rational>,
        rows: Vec<Vec<Rational>>,
        rhs: Vec<Rational>,
    ) -> Result<Self> {
        let lp = LinearProgram {
            objective,
            rows,
            rhs,
        };
        lp.check()?;
        Ok(lp)
    }

    fn check(&self) -> Result<()> {
        if self.rows.len() != self.rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                self.rows.len(),
                self.rhs.len()
            )));
        }
        let n = self.objective.len();
        if let Some(i) = self.rows.iter().position(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {n}",
                self.rows[i].len()
            )));
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// The same program keeping only the listed rows.
    pub fn restrict_rows(&self, rows: &[usize]) -> Result<LinearProgram> {
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.rows.len()) {
            return Err(Error::DimensionMismatch(format!(
                "row index {bad} out of range"
            )));
        }
        Ok(LinearProgram {
            objective: self.objective.clone(),
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            rhs: rows.iter().map(|&i| self.rhs[i].clone()).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub primal: Vec<Rational>,
    /// Empty unless optimal; one entry per row.
    pub dual: Vec<Rational>,
    pub objective_value: Rational,
    /// Basic column per row: `j < n` is `x_j`, `n + i` is the slack of row `i`,
    /// larger indices are artificial columns left basic at level zero.
    pub basis: Vec<usize>,
}

impl LpSolution {
    fn without_optimum(status: LpStatus) -> Self {
        LpSolution {
            status,
            primal: Vec::new(),
            dual: Vec::new(),
            objective_value: Rational::zero(),
            basis: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    objective: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        let nonzero: Vec<usize> = (0..=self.width)
            .filter(|&j| !self.rows[row][j].is_zero())
            .collect();
        for &j in &nonzero {
            self.rows[row][j] = &self.rows[row][j] / &pivot;
        }
        let pivot_row = std::mem::take(&mut self.rows[row]);
        for (i, other) in self.rows.iter_mut().enumerate() {
            if i == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for &j in &nonzero {
                other[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.objective[col].is_zero() {
            let factor = self.objective[col].clone();
            for &j in &nonzero {
                self.objective[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[row] = pivot_row;
        self.basis[row] = col;
    }

    /// Bland's rule; returns `false` when the objective is unbounded.
    fn optimize(&mut self, may_enter: impl Fn(usize) -> bool) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(col) =
                (0..self.width).find(|&j| may_enter(j) && self.objective[j].is_negative())
            else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((b, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((row, _)) = best else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Solves `maximize c·x s.t. Ax ≤ b, x ≥ 0`.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.check()?;
    let n = lp.num_vars();
    let m = lp.num_rows();
    let negated: Vec<usize> = (0..m).filter(|&i| lp.rhs[i].is_negative()).collect();
    let width = n + m + negated.len();
    let artificial_start = n + m;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); width + 1];
        row[..n].clone_from_slice(&lp.rows[i][..n]);
        row[n + i] = Rational::from_integer(1.into());
        row[width] = lp.rhs[i].clone();
        if let Some(k) = negated.iter().position(|&r| r == i) {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            row[artificial_start + k] = Rational::from_integer(1.into());
            basis.push(artificial_start + k);
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut tableau = Tableau {
        rows,
        objective: vec![Rational::zero(); width + 1],
        basis,
        width,
    };

    if !negated.is_empty() {
        // Phase one: maximize minus the sum of the artificials.
        for &i in &negated {
            for j in 0..=width {
                tableau.objective[j] -= &tableau.rows[i][j];
            }
        }
        for k in 0..negated.len() {
            tableau.objective[artificial_start + k] = Rational::zero();
        }
        tableau.optimize(|_| true);
        if tableau.objective[width].is_negative() {
            return Ok(LpSolution::without_optimum(LpStatus::Infeasible));
        }
        for i in 0..m {
            if tableau.basis[i] < artificial_start {
                continue;
            }
            if let Some(j) = (0..artificial_start).find(|&j| !tableau.rows[i][j].is_zero()) {
                tableau.pivot(i, j);
            }
        }
    }

    // Phase two objective row: c_B B^{-1} A - c.
    let cost = |j: usize| {
        if j < n {
            lp.objective[j].clone()
        } else {
            Rational::zero()
        }
    };
    let mut objective: Vec<Rational> = (0..=width)
        .map(|j| {
            if j < width {
                -cost(j)
            } else {
                Rational::zero()
            }
        })
        .collect();
    for (i, row) in tableau.rows.iter().enumerate() {
        let c = cost(tableau.basis[i]);
        if c.is_zero() {
            continue;
        }
        for j in 0..=width {
            if !row[j].is_zero() {
                objective[j] += &c * &row[j];
            }
        }
    }
    tableau.objective = objective;
    if !tableau.optimize(|j| j < artificial_start) {
        return Ok(LpSolution::without_optimum(LpStatus::Unbounded));
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            primal[b] = tableau.rows[i][width].clone();
        }
    }
    let dual = (0..m).map(|i| tableau.objective[n + i].clone()).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective_value: tableau.objective[width].clone(),
        basis: tableau.basis,
    })
}

/// Optimal dual supported on `support` only.
///
/// Statuses describe the dual: `Infeasible` when no dual supported on these rows
/// satisfies `Aᵀy ≥ c`, `Unbounded` when the restricted primal is infeasible. The
/// returned dual has one entry per row of `lp`, zero off the support; `primal` and
/// `basis` refer to the restricted program.
pub fn solve_restricted_dual(lp: &LinearProgram, support: &[usize]) -> Result<LpSolution> {
    lp.check()?;
    let restricted = lp.restrict_rows(support)?;
    let mut solution = solve(&restricted)?;
    match solution.status {
        LpStatus::Optimal => {
            let mut dual = vec![Rational::zero(); lp.num_rows()];
            for (k, &i) in support.iter().enumerate() {
                dual[i] = solution.dual[k].clone();
            }
            solution.dual = dual;
            Ok(solution)
        }
        LpStatus::Unbounded => Ok(LpSolution::without_optimum(LpStatus::Infeasible)),
        LpStatus::Infeasible => Ok(LpSolution::without_optimum(LpStatus::Unbounded)),
    }
}
