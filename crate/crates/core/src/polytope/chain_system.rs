//! Square systems `Dx = b` with `D ∈ {0,1,2}^{n×n}` and column sums at most 2.
//!
//! Such a nonsingular system has a half-integral solution for every integral `b`.
//! The solver follows the constructive argument: peel a column with a single nonzero
//! entry (its row is then the only equation mentioning that unknown), peel a vertex
//! of degree one once `D` is a graph incidence matrix, and finish on a disjoint union
//! of odd cycles.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{half, Rational};

pub fn solve_chain_system(matrix: &[Vec<u8>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = matrix.len();
    if rhs.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected a square {n}x{n} system with {n} right-hand sides"
        )));
    }
    for j in 0..n {
        let sum: u32 = matrix.iter().map(|row| u32::from(row[j])).sum();
        if matrix.iter().any(|row| row[j] > 2) || sum > 2 {
            return Err(Error::DimensionMismatch(format!(
                "column {j} has entries outside {{0,1,2}} or sum above 2"
            )));
        }
    }
    let mut x = vec![Rational::zero(); n];
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    solve_active(matrix, rhs.to_vec(), &rows, &cols, &mut x)?;
    Ok(x)
}

fn solve_active(
    d: &[Vec<u8>],
    mut b: Vec<Rational>,
    rows: &[usize],
    cols: &[usize],
    x: &mut [Rational],
) -> Result<()> {
    if cols.is_empty() {
        return Ok(());
    }
    let nonzero_rows = |j: usize| rows.iter().copied().filter(move |&i| d[i][j] != 0);

    // A column with one nonzero entry: solve the rest, then back-substitute.
    for &j in cols {
        let mut it = nonzero_rows(j);
        match (it.next(), it.next()) {
            (None, _) => return Err(Error::Singular),
            (Some(i), None) => {
                let rest_rows: Vec<usize> = rows.iter().copied().filter(|&r| r != i).collect();
                let rest_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
                solve_active(d, b.clone(), &rest_rows, &rest_cols, x)?;
                let known: Rational = rest_cols
                    .iter()
                    .map(|&k| Rational::from_integer(d[i][k].into()) * &x[k])
                    .sum();
                x[j] = (&b[i] - known) / Rational::from_integer(d[i][j].into());
                return Ok(());
            }
            _ => {}
        }
    }

    // Every column now has two entries equal to 1: rows are vertices, columns edges.
    for &i in rows {
        let incident: Vec<usize> = cols.iter().copied().filter(|&j| d[i][j] != 0).collect();
        match incident.as_slice() {
            [] => return Err(Error::Singular),
            [e] => {
                let e = *e;
                x[e] = b[i].clone();
                let other = nonzero_rows(e)
                    .find(|&r| r != i)
                    .expect("incidence column has two endpoints");
                b[other] = &b[other] - &x[e];
                let rest_rows: Vec<usize> = rows.iter().copied().filter(|&r| r != i).collect();
                let rest_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != e).collect();
                return solve_active(d, b, &rest_rows, &rest_cols, x);
            }
            _ => {}
        }
    }

    // All degrees are 2 and |V| = |E|: a disjoint union of cycles, odd when nonsingular.
    let mut done = vec![false; d.first().map_or(0, Vec::len)];
    for &start in cols {
        if done[start] {
            continue;
        }
        // Walk v_1, e_1, v_2, ... with x_{e_{i-1}} + x_{e_i} = b_{v_i}.
        let (first_vertex, _) = endpoints(d, rows, start);
        let mut edges = vec![start];
        let mut vertices = Vec::new();
        let mut vertex = first_vertex;
        let mut edge = start;
        loop {
            let (u, v) = endpoints(d, rows, edge);
            vertex = if u == vertex { v } else { u };
            vertices.push(vertex);
            let next = cols
                .iter()
                .copied()
                .find(|&c| c != edge && d[vertex][c] != 0)
                .expect("cycle vertex has degree two");
            if next == start {
                break;
            }
            edges.push(next);
            edge = next;
        }
        if edges.len() % 2 == 0 {
            return Err(Error::Singular);
        }
        // vertices[i] joins edges[i] and edges[i+1]; the last joins back to edges[0].
        let alternating: Rational = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if i % 2 == 0 {
                    b[v].clone()
                } else {
                    -b[v].clone()
                }
            })
            .sum();
        let mut value = alternating * half();
        // x_{e_0} + x_{e_1} = b_{v_0} with v_0 = vertices[0], so walk forward from e_0.
        x[start] = value.clone();
        done[start] = true;
        for (i, &e) in edges.iter().enumerate().skip(1) {
            value = &b[vertices[i - 1]] - &value;
            x[e] = value.clone();
            done[e] = true;
        }
        let closing = &x[*edges.last().expect("nonempty cycle")] + &x[start];
        if closing != b[*vertices.last().expect("nonempty cycle")] {
            return Err(Error::Internal(
                "odd cycle back-substitution mismatch".into(),
            ));
        }
    }
    Ok(())
}

fn endpoints(d: &[Vec<u8>], rows: &[usize], col: usize) -> (usize, usize) {
    let mut it = rows.iter().copied().filter(|&i| d[i][col] != 0);
    let u = it.next().expect("incidence column");
    let v = it.next().expect("incidence column");
    (u, v)
}
