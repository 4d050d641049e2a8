use serde::Serialize;

use super::{flat_rows_lp, uncross, FormalSum, MatchingPolytope};
use crate::error::{Error, Result};
use crate::lp::{self, LpStatus};
use crate::matroid::{degree, ElementSet, Flat, Line};
use crate::rational::{int, Rational};

/// `½(S + T)` with `S ⊆ T` and `a(S + T) ≥ 2` on every line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub lower: Flat,
    pub upper: Flat,
}

impl Cover {
    /// `r(½(S + T))`.
    pub fn value(&self) -> Rational {
        Rational::new((self.lower.rank + self.upper.rank).into(), 2.into())
    }

    pub fn covers(&self, lines: &[Line]) -> bool {
        self.lower.is_subset(&self.upper)
            && lines
                .iter()
                .all(|l| degree(self.lower.elements, l) + degree(self.upper.elements, l) >= 2)
    }

    pub fn as_sum(&self) -> FormalSum {
        let mut y = FormalSum::new();
        y.add(self.lower, Rational::new(1.into(), 2.into()));
        y.add(self.upper, Rational::new(1.into(), 2.into()));
        y
    }
}

/// Per-flat line masks: which lines the flat meets and which it contains.
struct LineMasks {
    meets: u128,
    contains: u128,
}

fn line_masks(elements: ElementSet, lines: &[Line]) -> LineMasks {
    let mut masks = LineMasks {
        meets: 0,
        contains: 0,
    };
    for (i, line) in lines.iter().enumerate() {
        match degree(elements, line) {
            2 => {
                masks.meets |= 1 << i;
                masks.contains |= 1 << i;
            }
            1 => masks.meets |= 1 << i,
            _ => {}
        }
    }
    masks
}

impl MatchingPolytope {
    /// A minimum cover from the `w = 1` dual.
    ///
    /// The LP dual is uncrossed to a chain and re-solved on the chain rows. The basic
    /// chain dual `y` is half-integral, so `2y` is a multiset chain `G_1 ⊆ … ⊆ G_m`;
    /// its top two members form a cover of rank at most `r(y) = ν*`. When `m = 1` the
    /// single flat is paired with `cl(∅)`.
    pub fn minimum_cover(&self) -> Result<Cover> {
        let bottom = self.bottom();
        if self.lines.is_empty() {
            return Ok(Cover {
                lower: bottom,
                upper: bottom,
            });
        }
        let ones = vec![int(1); self.lines.len()];
        let first = self.solve_weighted(&ones)?;
        let dual: FormalSum = self
            .system
            .rows
            .iter()
            .zip(&first.dual)
            .map(|(row, y)| (row.flat, y.clone()))
            .collect();
        let chain = uncross(&self.matroid, &dual)?.chain_order();
        let flats: Vec<Flat> = chain.iter().map(|(f, _)| *f).collect();
        let restricted = lp::solve(&flat_rows_lp(&flats, &self.lines, &ones))?;
        if restricted.status != LpStatus::Optimal {
            return Err(Error::Internal("chain-restricted cover LP failed".into()));
        }
        let mut multiset: Vec<Flat> = Vec::new();
        for (flat, y) in flats.iter().zip(&restricted.dual) {
            let twice = y * int(2);
            if !twice.is_integer() {
                return Err(Error::Internal(format!(
                    "chain dual coefficient {y} is not half-integral"
                )));
            }
            let copies: usize = twice
                .to_integer()
                .try_into()
                .map_err(|_| Error::Internal("chain dual coefficient out of range".into()))?;
            multiset.extend(std::iter::repeat_n(*flat, copies));
        }
        let cover = match multiset.as_slice() {
            [] => {
                return Err(Error::Internal(
                    "empty dual covers a nonempty line set".into(),
                ))
            }
            [only] => Cover {
                lower: bottom,
                upper: *only,
            },
            [.., s, t] => Cover {
                lower: *s,
                upper: *t,
            },
        };
        if !cover.covers(&self.lines) || cover.value() != first.objective_value {
            return Err(Error::Internal(format!(
                "normalized cover {cover:?} is not minimum"
            )));
        }
        Ok(cover)
    }

    /// Every minimum cover `½(S + T)` over the enumerated flats, given `ν*`.
    pub fn minimum_covers(&self, nu: &Rational) -> Result<Vec<Cover>> {
        if self.lines.len() > 128 {
            return Err(Error::DimensionMismatch(
                "cover enumeration supports at most 128 lines".into(),
            ));
        }
        let twice = nu * int(2);
        if !twice.is_integer() {
            return Ok(Vec::new());
        }
        let target: usize = twice
            .to_integer()
            .try_into()
            .map_err(|_| Error::Internal("ν* out of range".into()))?;
        let all: u128 = if self.lines.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.lines.len()) - 1
        };
        let masks: Vec<LineMasks> = self
            .flats
            .iter()
            .map(|f| line_masks(f.elements, &self.lines))
            .collect();
        let mut covers = Vec::new();
        for (ti, t) in self.flats.iter().enumerate() {
            if t.rank > target || masks[ti].meets != all {
                continue;
            }
            let need = target - t.rank;
            for (si, s) in self.flats.iter().enumerate() {
                if s.rank != need || !s.is_subset(t) {
                    continue;
                }
                let covered = masks[ti].contains | (masks[ti].meets & masks[si].meets);
                if covered == all {
                    covers.push(Cover {
                        lower: *s,
                        upper: *t,
                    });
                }
            }
        }
        Ok(covers)
    }

    /// The dominant cover `½(S* + T*)`: `S* ⊆ S ⊆ T ⊆ T*` for every minimum cover.
    ///
    /// Folds all minimum covers with `(S ∧ S', T ∨ T')` and checks the result against
    /// `S* = cl(∪_{l ⊄ T*} (T* ∩ l))`.
    pub fn dominant_cover(&self) -> Result<Cover> {
        let (_, nu) = self.max_size_matching()?;
        self.dominant_cover_given(&nu)
    }

    pub fn dominant_cover_given(&self, nu: &Rational) -> Result<Cover> {
        let covers = self.minimum_covers(nu)?;
        let mut iter = covers.iter();
        let first = *iter
            .next()
            .ok_or_else(|| Error::Internal(format!("no minimum cover of value {nu}")))?;
        let dominant = iter.fold(first, |acc, c| Cover {
            lower: self.matroid.meet_unchecked(&acc.lower, &c.lower),
            upper: self.matroid.join_unchecked(&acc.upper, &c.upper),
        });
        if !dominant.covers(&self.lines) || dominant.value() != *nu {
            return Err(Error::Internal(format!(
                "folded cover {dominant:?} is not a minimum cover"
            )));
        }
        let expected_lower = self.dominant_lower_from_upper(dominant.upper.elements);
        if expected_lower != dominant.lower.elements {
            return Err(Error::Internal(format!(
                "dominant lower flat {} differs from {expected_lower}",
                dominant.lower.elements
            )));
        }
        Ok(dominant)
    }

    /// `cl(∪_{l ⊄ T} (T ∩ l))`.
    pub fn dominant_lower_from_upper(&self, upper: ElementSet) -> ElementSet {
        let union = self
            .lines
            .iter()
            .filter(|l| !l.elements.is_subset(upper))
            .fold(ElementSet::EMPTY, |acc, l| {
                acc.union(upper.intersection(l.elements))
            });
        self.matroid.cl(union).elements
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Matroid;
    use crate::rational::ratio;

    fn set(ids: &[usize]) -> ElementSet {
        ids.iter().collect()
    }

    fn triangle() -> MatchingPolytope {
        let m = Matroid::free(3).unwrap();
        let lines = vec![Line::new([0, 1]), Line::new([1, 2]), Line::new([0, 2])];
        MatchingPolytope::new(&m, &lines, 100).unwrap()
    }

    #[test]
    fn triangle_covers() {
        let p = triangle();
        let cover = p.minimum_cover().unwrap();
        assert_eq!(cover.value(), ratio(3, 2));
        assert!(cover.covers(p.lines()));
        let covers = p.minimum_covers(&ratio(3, 2)).unwrap();
        assert_eq!(covers.len(), 1);
        let dominant = p.dominant_cover().unwrap();
        assert_eq!(dominant.lower.elements, set(&[]));
        assert_eq!(dominant.upper.elements, set(&[0, 1, 2]));
        assert_eq!(dominant, cover);
    }

    #[test]
    fn single_line_in_free_two() {
        let m = Matroid::free(2).unwrap();
        let p = MatchingPolytope::new(&m, &[Line::new([0, 1])], 100).unwrap();
        let (x, nu) = p.max_size_matching().unwrap();
        assert_eq!(nu, int(1));
        assert_eq!(x.size(), int(1));
        let cover = p.minimum_cover().unwrap();
        assert_eq!(cover.value(), int(1));
        let dominant = p.dominant_cover().unwrap();
        assert_eq!(dominant.upper.elements, set(&[0, 1]));
        assert_eq!(
            dominant.lower.elements,
            p.dominant_lower_from_upper(set(&[0, 1]))
        );
        assert_eq!(dominant.lower.elements, set(&[]));
        assert_eq!(p.closure_of_matching(&x).elements, dominant.upper.elements);
    }

    #[test]
    fn empty_line_set() {
        let p = MatchingPolytope::new(&Matroid::free(3).unwrap(), &[], 100).unwrap();
        let cover = p.minimum_cover().unwrap();
        assert_eq!(cover.lower.elements, set(&[]));
        assert_eq!(cover.upper.elements, set(&[]));
        assert_eq!(cover.value(), int(0));
        assert_eq!(p.dominant_cover().unwrap(), cover);
    }

    #[test]
    fn unique_cover_is_dominant() {
        // Two disjoint pairs in U(2,4): the only minimum cover is ½(∅ + E).
        let m = Matroid::uniform(4, 2).unwrap();
        let p = MatchingPolytope::new(&m, &[Line::new([0, 1]), Line::new([2, 3])], 100).unwrap();
        let covers = p.minimum_covers(&int(1)).unwrap();
        assert_eq!(covers.len(), 1);
        assert_eq!(p.dominant_cover().unwrap(), covers[0]);
    }
}
