//! Optimal vertices of tiny matching polytopes, by basis search over tight rows.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::oracle::{self, matrix_rank, unique_solution};
use crate::error::{Error, Result};
use crate::matroid::{Line, Matroid};
use crate::polytope::FractionalMatching;
use crate::rational::{from_usize, Rational};

pub const MAX_VERTEX_LINES: usize = 8;
pub const MAX_VERTEX_ROWS: usize = 12;
const MAX_BASES: usize = 250_000;

/// Rows `a·x ≤ b` of the polytope: one per distinct flat degree vector (least rank
/// kept), then `−x_l ≤ 0`.
pub(crate) struct Inequalities {
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub flat_rows: usize,
}

pub(crate) fn inequalities(
    matroid: &Matroid,
    lines: &[Line],
    budget: usize,
) -> Result<Inequalities> {
    let mut best: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for (set, rank) in oracle::all_flats(matroid, budget)? {
        let a: Vec<i64> = lines.iter().map(|l| oracle::coefficient(set, l)).collect();
        if a.iter().all(|&v| v == 0) {
            continue;
        }
        let entry = best.entry(a).or_insert(rank);
        *entry = (*entry).min(rank);
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (a, rank) in &best {
        rows.push(
            a.iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        );
        rhs.push(from_usize(*rank));
    }
    let flat_rows = rows.len();
    for l in 0..lines.len() {
        let mut row = vec![Rational::zero(); lines.len()];
        row[l] = -Rational::from_integer(1.into());
        rows.push(row);
        rhs.push(Rational::zero());
    }
    Ok(Inequalities {
        rows,
        rhs,
        flat_rows,
    })
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

impl Inequalities {
    fn feasible(&self, x: &[Rational]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(a, b)| dot(a, x) <= *b)
    }

    fn tight(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| dot(&self.rows[i], x) == self.rhs[i])
            .collect()
    }
}

/// True when `x` is feasible and its tight rows have full rank.
pub fn is_vertex(
    matroid: &Matroid,
    lines: &[Line],
    x: &FractionalMatching,
    budget: usize,
) -> Result<bool> {
    let system = inequalities(matroid, lines, budget)?;
    if !system.feasible(&x.values) {
        return Ok(false);
    }
    let tight: Vec<Vec<Rational>> = system
        .tight(&x.values)
        .into_iter()
        .map(|i| system.rows[i].clone())
        .collect();
    Ok(lines.is_empty() || matrix_rank(&tight) == lines.len())
}

/// All basic optimal solutions of `max w·x`.
///
/// An optimal dual fixes the optimal face: rows with positive multiplier stay tight
/// and lines with positive reduced cost stay at zero. Vertices of that face are found
/// by completing the forced equalities with subsets of the remaining rows.
pub fn enumerate_optimal_vertices(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
    budget: usize,
) -> Result<Vec<FractionalMatching>> {
    let n = lines.len();
    if n > MAX_VERTEX_LINES {
        return Err(Error::BudgetExceeded {
            what: "vertex enumeration lines",
            cap: MAX_VERTEX_LINES,
        });
    }
    let system = inequalities(matroid, lines, budget)?;
    if system.flat_rows > MAX_VERTEX_ROWS {
        return Err(Error::BudgetExceeded {
            what: "vertex enumeration rows",
            cap: MAX_VERTEX_ROWS,
        });
    }
    if n == 0 {
        return Ok(vec![FractionalMatching::zero(0)]);
    }
    let flat_system = &system.rows[..system.flat_rows];
    let (value, _, dual) = oracle::simplex(flat_system, &system.rhs[..system.flat_rows], weights)?
        .ok_or_else(|| Error::Internal("matching polytope is empty".into()))?;
    let mut forced: Vec<usize> = (0..system.flat_rows)
        .filter(|&i| dual[i].is_positive())
        .collect();
    for (l, w) in weights.iter().enumerate().take(n) {
        let priced: Rational = (0..system.flat_rows)
            .map(|i| &dual[i] * &system.rows[i][l])
            .sum();
        if priced > *w {
            forced.push(system.flat_rows + l);
        }
    }
    let forced_rows: Vec<Vec<Rational>> = forced.iter().map(|&i| system.rows[i].clone()).collect();
    let free: Vec<usize> = (0..system.rows.len())
        .filter(|i| !forced.contains(i))
        .collect();
    let need = n - matrix_rank(&forced_rows).min(n);

    let mut found: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut visited = 0usize;
    let mut pick = Vec::with_capacity(need);
    let mut search = |pick: &[usize]| -> Result<()> {
        visited += 1;
        if visited > MAX_BASES {
            return Err(Error::BudgetExceeded {
                what: "vertex enumeration bases",
                cap: MAX_BASES,
            });
        }
        let mut rows = forced_rows.clone();
        let mut rhs: Vec<Rational> = forced.iter().map(|&i| system.rhs[i].clone()).collect();
        for &i in pick {
            rows.push(system.rows[i].clone());
            rhs.push(system.rhs[i].clone());
        }
        if let Some(x) = unique_solution(&rows, &rhs) {
            if system.feasible(&x) && dot(weights, &x) == value {
                found.insert(x);
            }
        }
        Ok(())
    };
    combinations(&free, need, 0, &mut pick, &mut search)?;
    Ok(found
        .into_iter()
        .map(|values| FractionalMatching { values })
        .collect())
}

fn combinations(
    items: &[usize],
    k: usize,
    start: usize,
    pick: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pick.len() == k {
        return visit(pick);
    }
    for i in start..items.len() {
        if items.len() - i < k - pick.len() {
            break;
        }
        pick.push(items[i]);
        combinations(items, k, i + 1, pick, visit)?;
        pick.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn triangle_vertex() {
        let m = Matroid::free(3).unwrap();
        let lines = vec![Line::new([0, 1]), Line::new([1, 2]), Line::new([0, 2])];
        let ones = vec![int(1); 3];
        let vertices = enumerate_optimal_vertices(&m, &lines, &ones, 100).unwrap();
        assert_eq!(
            vertices,
            vec![FractionalMatching {
                values: vec![ratio(1, 2); 3]
            }]
        );
        assert!(is_vertex(&m, &lines, &vertices[0], 100).unwrap());
        let inner = FractionalMatching {
            values: vec![ratio(1, 4); 3],
        };
        assert!(!is_vertex(&m, &lines, &inner, 100).unwrap());
        // With w = 0 every vertex is optimal, including 0 and the unit vectors.
        let all = enumerate_optimal_vertices(&m, &lines, &vec![int(0); 3], 100).unwrap();
        assert!(all.contains(&FractionalMatching::zero(3)));
        assert!(all.contains(&FractionalMatching {
            values: vec![int(1), int(0), int(0)]
        }));
        assert!(all.iter().all(FractionalMatching::is_half_integral));
    }

    #[test]
    fn several_optimal_vertices() {
        // Two parallel-ish lines in U(2,3) share the full rank: any of them alone is optimal.
        let m = Matroid::uniform(3, 2).unwrap();
        let lines = vec![Line::new([0, 1]), Line::new([1, 2])];
        let vertices = enumerate_optimal_vertices(&m, &lines, &vec![int(1); 2], 100).unwrap();
        assert!(vertices.len() >= 2);
        assert!(vertices.iter().all(|v| v.size() == int(1)));
    }
}
