use num_traits::Zero;

use super::FormalSum;
use crate::error::{Error, Result};
use crate::matroid::{Flat, Matroid};
use crate::rational::{from_usize, Rational};

/// Replaces crossing pairs `S, T` in the support of `y` by `S ∧ T, S ∨ T` until the
/// support is a chain.
///
/// Each step moves `ε = min(y_S, y_T)` and picks the pair with the largest increase of
/// `f(y) = Σ y_F r(F)²`, ties broken by lexicographic element order. Degrees never
/// drop and rank never grows, so feasibility and optimality survive.
pub fn uncross(matroid: &Matroid, y: &FormalSum) -> Result<FormalSum> {
    let rank = matroid.full_rank();
    let cap = (y.len() * y.len() * rank * rank).max(64);
    let mut current = y.clone();
    for _ in 0..=cap {
        let Some((s, t, eps)) = best_pair(matroid, &current) else {
            return Ok(current);
        };
        let meet = matroid.meet_unchecked(&s, &t);
        let join = matroid.join_unchecked(&s, &t);
        current.add(s, -eps.clone());
        current.add(t, -eps.clone());
        current.add(meet, eps.clone());
        current.add(join, eps);
    }
    Err(Error::BudgetExceeded {
        what: "uncrossing replacements",
        cap,
    })
}

fn best_pair(matroid: &Matroid, y: &FormalSum) -> Option<(Flat, Flat, Rational)> {
    let terms: Vec<(&Flat, &Rational)> = y.iter().collect();
    let mut best: Option<(Rational, Flat, Flat, Rational)> = None;
    for (i, (s, ys)) in terms.iter().enumerate() {
        for (t, yt) in &terms[i + 1..] {
            if !s.crosses(t) {
                continue;
            }
            let eps = if ys < yt {
                (*ys).clone()
            } else {
                (*yt).clone()
            };
            if eps <= Rational::zero() {
                continue;
            }
            let meet = matroid.meet_unchecked(s, t);
            let join = matroid.join_unchecked(s, t);
            let sq = |f: &Flat| from_usize(f.rank * f.rank);
            let gain = &eps * (sq(&meet) + sq(&join) - sq(s) - sq(t));
            let (a, b) = if s.elements.lex_cmp(t.elements).is_le() {
                (**s, **t)
            } else {
                (**t, **s)
            };
            let better = match &best {
                None => true,
                Some((g, ba, bb, _)) => {
                    gain > *g
                        || (gain == *g
                            && a.elements
                                .lex_cmp(ba.elements)
                                .then(b.elements.lex_cmp(bb.elements))
                                .is_lt())
                }
            };
            if better {
                best = Some((gain, a, b, eps));
            }
        }
    }
    best.map(|(_, a, b, eps)| (a, b, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{ElementSet, Line};
    use crate::rational::{half, int};

    fn flat(m: &Matroid, ids: &[usize]) -> Flat {
        m.flat(ids.iter().collect::<ElementSet>()).unwrap()
    }

    #[test]
    fn chain_is_unchanged() {
        let m = Matroid::free(3).unwrap();
        let y: FormalSum = [(flat(&m, &[0]), half()), (flat(&m, &[0, 1, 2]), int(1))]
            .into_iter()
            .collect();
        assert_eq!(uncross(&m, &y).unwrap(), y);
    }

    #[test]
    fn crossing_pair_in_free_four() {
        let m = Matroid::free(4).unwrap();
        let s = flat(&m, &[0, 1]);
        let t = flat(&m, &[1, 2]);
        let y: FormalSum = [(s, half()), (t, half())].into_iter().collect();
        let out = uncross(&m, &y).unwrap();
        assert!(out.is_chain());
        assert_eq!(out.support(), {
            let mut v = vec![flat(&m, &[1]), flat(&m, &[0, 1, 2])];
            v.sort();
            v
        });
        assert!(out.potential() > y.potential());
        assert_eq!(out.rank(), y.rank());
        let lines = [Line::new([0, 1]), Line::new([1, 2]), Line::new([0, 2])];
        for (before, after) in y.degrees(&lines).iter().zip(out.degrees(&lines)) {
            assert!(after >= *before);
        }
    }

    #[test]
    fn several_crossings_reach_a_chain() {
        let m = Matroid::uniform(5, 3).unwrap();
        let y: FormalSum = [
            (flat(&m, &[0, 1]), int(1)),
            (flat(&m, &[1, 2]), half()),
            (flat(&m, &[2, 3]), half()),
            (flat(&m, &[3]), int(2)),
        ]
        .into_iter()
        .collect();
        let out = uncross(&m, &y).unwrap();
        assert!(out.is_chain());
        assert!(out.rank() <= y.rank());
    }
}
