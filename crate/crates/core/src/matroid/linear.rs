//! Rank routines for the concrete matroid kinds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ElementSet;
use crate::rational::Rational;

/// Number of edges in a spanning forest of the selected edges.
pub(crate) fn graphic_rank(vertices: usize, edges: &[(usize, usize)], subset: ElementSet) -> usize {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut rank = 0;
    for e in subset {
        let (u, v) = edges[e];
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            rank += 1;
        }
    }
    rank
}

/// Rank of the selected columns over GF(p).
pub(crate) fn gf_rank(p: u64, rows: usize, columns: &[Vec<u64>], subset: ElementSet) -> usize {
    // One vector per selected column; eliminate coordinate by coordinate.
    let mut vectors: Vec<Vec<u64>> = subset.iter().map(|e| columns[e].clone()).collect();
    let mut rank = 0;
    for row in 0..rows {
        let Some(pivot) = (rank..vectors.len()).find(|&i| vectors[i][row] != 0) else {
            continue;
        };
        vectors.swap(rank, pivot);
        let inv = mod_inverse(vectors[rank][row], p);
        let head: Vec<u64> = vectors[rank].iter().map(|&v| v * inv % p).collect();
        vectors[rank] = head;
        for i in 0..vectors.len() {
            if i == rank || vectors[i][row] == 0 {
                continue;
            }
            let factor = vectors[i][row];
            let pivot = vectors[rank].clone();
            for (v, q) in vectors[i][row..rows].iter_mut().zip(&pivot[row..rows]) {
                *v = (*v + p - factor * q % p) % p;
            }
        }
        rank += 1;
        if rank == vectors.len() {
            break;
        }
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Scales a rational column to an integer column with the same span.
pub(crate) fn integer_column(column: &[Rational]) -> Vec<BigInt> {
    let lcm = column
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    column
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

/// Rank of the selected integer columns by fraction-free (Bareiss) elimination.
pub(crate) fn integer_rank(rows: usize, columns: &[Vec<BigInt>], subset: ElementSet) -> usize {
    let mut m: Vec<Vec<BigInt>> = subset.iter().map(|e| columns[e].clone()).collect();
    let n = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for row in 0..rows {
        if rank == n {
            break;
        }
        let Some(pivot) = (rank..n).find(|&i| !m[i][row].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..n {
            for r in row + 1..rows {
                let value = &m[rank][row] * &m[i][r] - &m[i][row] * &m[rank][r];
                m[i][r] = value / &prev;
            }
            m[i][row] = BigInt::zero();
        }
        prev = m[rank][row].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn triangle_has_graphic_rank_two() {
        let edges = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(graphic_rank(3, &edges, ElementSet::full(3)), 2);
        assert_eq!(graphic_rank(3, &edges, [0, 1].iter().collect()), 2);
        assert_eq!(graphic_rank(3, &edges, ElementSet::singleton(2)), 1);
    }

    #[test]
    fn gf2_dependent_columns() {
        let cols = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        assert_eq!(gf_rank(2, 2, &cols, ElementSet::full(3)), 2);
        let cols3 = vec![vec![1, 1], vec![2, 2]];
        assert_eq!(gf_rank(3, 2, &cols3, ElementSet::full(2)), 1);
    }

    #[test]
    fn bareiss_matches_known_ranks() {
        let cols: Vec<Vec<BigInt>> = vec![
            integer_column(&[int(1), int(2), int(3)]),
            integer_column(&[ratio(1, 2), int(1), ratio(3, 2)]),
            integer_column(&[int(0), int(1), int(1)]),
            integer_column(&[int(1), int(3), int(4)]),
        ];
        assert_eq!(integer_rank(3, &cols, [0, 1].iter().collect()), 1);
        assert_eq!(integer_rank(3, &cols, [0, 2].iter().collect()), 2);
        assert_eq!(integer_rank(3, &cols, [0, 2, 3].iter().collect()), 2);
        assert_eq!(integer_rank(3, &cols, ElementSet::full(4)), 2);
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
    }
}
