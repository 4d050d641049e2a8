//! Independent exact LP path: brute-force flats, one row per flat, and a dense
//! simplex with largest-coefficient entering and a lexicographic ratio test.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matroid::{ElementSet, Line, Matroid};
use crate::rational::{from_usize, Rational};

/// Ground sets up to this size are scanned subset by subset.
const SCAN_LIMIT: usize = 12;

/// Every flat of `matroid` as `(elements, rank)`.
///
/// Small ground sets are scanned exhaustively, testing `r(X + e) > r(X)` for every
/// `e ∉ X`; larger ones fall back to the lattice search with `budget`.
pub fn all_flats(matroid: &Matroid, budget: usize) -> Result<Vec<(ElementSet, usize)>> {
    let n = matroid.ground_size();
    if n > SCAN_LIMIT {
        return Ok(matroid
            .enumerate_flats(budget)?
            .into_iter()
            .map(|f| (f.elements, f.rank))
            .collect());
    }
    let mut flats = Vec::new();
    for bits in 0u64..(1u64 << n) {
        let set = ElementSet::from_bits(bits);
        let rank = matroid.rank(set)?;
        let closed = (0..n)
            .filter(|&e| !set.contains(e))
            .all(|e| matroid.r(set.with(e)) > rank);
        if closed {
            flats.push((set, rank));
            if flats.len() > budget {
                return Err(Error::BudgetExceeded {
                    what: "flat enumeration",
                    cap: budget,
                });
            }
        }
    }
    Ok(flats)
}

/// `a(X)_l` recomputed from scratch.
pub fn coefficient(set: ElementSet, line: &Line) -> i64 {
    let inside = line.elements.iter().filter(|&e| set.contains(e)).count();
    if inside == 0 {
        0
    } else if inside == line.elements.len() {
        2
    } else {
        1
    }
}

/// `max w·x` over the matching polytope, optionally with `|x| = r(E)/2`.
///
/// Returns `None` when the perfect variant is infeasible.
pub fn brute_force_optimum(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
    perfect: bool,
    budget: usize,
) -> Result<Option<Rational>> {
    if weights.len() != lines.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} lines",
            weights.len(),
            lines.len()
        )));
    }
    let (matrix, rhs) = assemble(matroid, lines, perfect, budget)?;
    Ok(simplex(&matrix, &rhs, weights)?.map(|(value, _, _)| value))
}

/// `a(F)·x ≤ r(F)` for every flat, then `±|x| ≤ ±r(E)/2` in the perfect variant.
fn assemble(
    matroid: &Matroid,
    lines: &[Line],
    perfect: bool,
    budget: usize,
) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    for (set, rank) in all_flats(matroid, budget)? {
        matrix.push(
            lines
                .iter()
                .map(|l| Rational::from_integer(coefficient(set, l).into()))
                .collect(),
        );
        rhs.push(from_usize(rank));
    }
    if perfect {
        let half = from_usize(matroid.full_rank()) / Rational::from_integer(2.into());
        matrix.push(vec![Rational::one(); lines.len()]);
        rhs.push(half.clone());
        matrix.push(vec![-Rational::one(); lines.len()]);
        rhs.push(-half);
    }
    Ok((matrix, rhs))
}

/// `max c·x` subject to `Ax ≤ b`, `x ≥ 0`. `None` means infeasible; the feasible
/// region here is always bounded, so unboundedness is reported as an error.
#[allow(clippy::type_complexity)]
pub fn simplex(
    a: &[Vec<Rational>],
    b: &[Rational],
    c: &[Rational],
) -> Result<Option<(Rational, Vec<Rational>, Vec<Rational>)>> {
    let m = a.len();
    let n = c.len();
    // Columns: x (n), slacks (m), artificials (one per negative row).
    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let width = n + m + negative.len();
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); width + 1];
        let sign = if b[i].is_negative() {
            -Rational::one()
        } else {
            Rational::one()
        };
        for j in 0..n {
            row[j] = &a[i][j] * &sign;
        }
        row[n + i] = sign.clone();
        row[width] = &b[i] * &sign;
        if let Some(k) = negative.iter().position(|&r| r == i) {
            row[n + m + k] = Rational::one();
            basis.push(n + m + k);
        } else {
            basis.push(n + i);
        }
        t.push(row);
    }
    let initial = basis.clone();
    let is_artificial = |j: usize| j >= n + m;

    // Phase one: maximize the negated sum of artificials.
    let mut cost = vec![Rational::zero(); width];
    for c in &mut cost[n + m..width] {
        *c = -Rational::one();
    }
    run(&mut t, &mut basis, &cost, &initial, |_| true)?;
    let infeasibility: Rational = (0..m)
        .filter(|&i| is_artificial(basis[i]))
        .map(|i| t[i][width].clone())
        .sum();
    if infeasibility.is_positive() {
        return Ok(None);
    }
    // Drive zero artificials out of the basis, dropping rows that are redundant.
    let mut i = 0;
    while i < t.len() {
        if is_artificial(basis[i]) {
            match (0..n + m).find(|&j| !t[i][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost = vec![Rational::zero(); width];
    cost[..n].clone_from_slice(c);
    run(&mut t, &mut basis, &cost, &initial, |j| !is_artificial(j))?;

    let mut x = vec![Rational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][width].clone();
        }
    }
    let value: Rational = x.iter().zip(c).map(|(v, w)| v * w).sum();
    // Negating a row flips both its slack column and its multiplier, so in either
    // case the dual of row i is minus the reduced cost of its slack.
    let reduced = reduced_costs(&t, &basis, &cost);
    let dual = (0..m).map(|i| -&reduced[n + i]).collect();
    Ok(Some((value, x, dual)))
}

fn reduced_costs(t: &[Vec<Rational>], basis: &[usize], cost: &[Rational]) -> Vec<Rational> {
    let width = cost.len();
    (0..width)
        .map(|j| {
            let priced: Rational = t
                .iter()
                .zip(basis)
                .filter(|(row, _)| !row[j].is_zero())
                .map(|(row, &bj)| &cost[bj] * &row[j])
                .sum();
            &cost[j] - priced
        })
        .collect()
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = &*v / &p;
    }
    let pr = t[row].clone();
    for (i, other) in t.iter_mut().enumerate() {
        if i != row && !other[col].is_zero() {
            let f = other[col].clone();
            for (v, pv) in other.iter_mut().zip(&pr) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
    }
    basis[row] = col;
}

/// Dantzig entering column; leaving row by the lexicographic rule on
/// `(b_i, B⁻¹_i) / t_ij`, read off the columns of the initial identity basis.
fn run(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &[Rational],
    initial: &[usize],
    may_enter: impl Fn(usize) -> bool,
) -> Result<()> {
    let width = cost.len();
    let cap = 50_000;
    for _ in 0..cap {
        let reduced = reduced_costs(t, basis, cost);
        let entering = (0..width)
            .filter(|&j| may_enter(j) && reduced[j].is_positive())
            .max_by(|&p, &q| reduced[p].cmp(&reduced[q]).then(q.cmp(&p)));
        let Some(col) = entering else {
            return Ok(());
        };
        let key = |i: usize| -> Vec<Rational> {
            std::iter::once(&t[i][width])
                .chain(initial.iter().map(|&j| &t[i][j]))
                .map(|v| v / &t[i][col])
                .collect()
        };
        let leaving = (0..t.len())
            .filter(|&i| t[i][col].is_positive())
            .min_by(|&p, &q| lex(&key(p), &key(q)));
        let Some(row) = leaving else {
            return Err(Error::Internal("oracle LP is unbounded".into()));
        };
        pivot(t, basis, row, col);
    }
    Err(Error::BudgetExceeded {
        what: "oracle simplex pivots",
        cap,
    })
}

fn lex(a: &[Rational], b: &[Rational]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// The unique solution of a consistent system of full column rank, by elimination.
pub fn unique_solution(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = rows.first()?.len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut rank = 0;
    for c in 0..n {
        let p = (rank..m.len()).find(|&r| !m[r][c].is_zero())?;
        m.swap(rank, p);
        let pv = m[rank][c].clone();
        for v in m[rank].iter_mut() {
            *v = &*v / &pv;
        }
        let pr = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pr) {
                    *v -= &f * pv;
                }
            }
        }
        rank += 1;
    }
    if m[rank..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    Some(m[..n].iter().map(|row| row[n].clone()).collect())
}

/// Rank of a rational matrix.
pub fn matrix_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pr = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pr[c];
                for (v, pv) in row.iter_mut().zip(&pr) {
                    *v -= &f * pv;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&k| int(k)).collect()
    }

    fn triangle() -> (Matroid, Vec<Line>) {
        (
            Matroid::free(3).unwrap(),
            vec![Line::new([0, 1]), Line::new([1, 2]), Line::new([0, 2])],
        )
    }

    #[test]
    fn scans_all_flats() {
        let (m, _) = triangle();
        assert_eq!(all_flats(&m, 100).unwrap().len(), 8);
        let k3 = Matroid::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(all_flats(&k3, 100).unwrap().len(), 5);
        assert!(all_flats(&m, 3).is_err());
    }

    #[test]
    fn triangle_optima() {
        let (m, lines) = triangle();
        let ones = ints(&[1, 1, 1]);
        assert_eq!(
            brute_force_optimum(&m, &lines, &ones, false, 100).unwrap(),
            Some(ratio(3, 2))
        );
        assert_eq!(
            brute_force_optimum(&m, &lines, &ones, true, 100).unwrap(),
            Some(ratio(3, 2))
        );
        assert_eq!(
            brute_force_optimum(&m, &[], &[], false, 100).unwrap(),
            Some(int(0))
        );
        assert_eq!(brute_force_optimum(&m, &[], &[], true, 100).unwrap(), None);
    }

    #[test]
    fn simplex_duals_certify() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≤ 6, x ≤ 3.
        let a = vec![ints(&[1, 1]), ints(&[1, 3]), ints(&[1, 0])];
        let (value, x, y) = simplex(&a, &ints(&[4, 6, 3]), &ints(&[3, 2]))
            .unwrap()
            .unwrap();
        assert_eq!(value, int(11));
        assert_eq!(x, ints(&[3, 1]));
        let dual_value: Rational = y.iter().zip(ints(&[4, 6, 3])).map(|(a, b)| a * b).sum();
        assert_eq!(dual_value, value);
        assert!(y.iter().all(|v| !v.is_negative()));
    }

    #[test]
    fn simplex_phase_one() {
        // max -x, x ≥ 2 written as -x ≤ -2, x ≤ 5.
        let a = vec![ints(&[-1]), ints(&[1])];
        let (value, x, y) = simplex(&a, &ints(&[-2, 5]), &ints(&[-1])).unwrap().unwrap();
        assert_eq!((value, x), (int(-2), ints(&[2])));
        assert_eq!(y, ints(&[1, 0]));
        assert!(simplex(&a, &ints(&[-6, 5]), &ints(&[1])).unwrap().is_none());
    }

    #[test]
    fn exact_linear_algebra() {
        let rows = vec![ints(&[1, 1]), ints(&[1, -1]), ints(&[2, 0])];
        assert_eq!(
            unique_solution(&rows, &ints(&[2, 0, 2])),
            Some(ints(&[1, 1]))
        );
        assert_eq!(unique_solution(&rows, &ints(&[2, 0, 3])), None);
        assert_eq!(unique_solution(&rows[..1], &ints(&[2])), None);
        assert_eq!(matrix_rank(&rows), 2);
    }
}
