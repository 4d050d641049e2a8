//! The fractional matching polytope of a matroid with lines.
//!
//! `x ≥ 0` is a fractional matching when `a(T)·x ≤ r(T)` for every flat `T`. Only
//! finitely many distinct degree vectors occur, so the polytope is described by one
//! row per distinct `a(T)`, keeping a representative flat of least rank.

mod chain_system;
mod covers;
mod sum;
mod uncross;

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use chain_system::solve_chain_system;
pub use covers::Cover;
pub use sum::FormalSum;
pub use uncross::uncross;

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpSolution, LpStatus};
use crate::matroid::{degree_vector, DegreeVector, ElementSet, Flat, Line, Matroid};
use crate::rational::{self, from_usize, int, Rational};

/// Nonnegative values indexed like the line list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FractionalMatching {
    #[serde(with = "rational::serde_vec")]
    pub values: Vec<Rational>,
}

impl FractionalMatching {
    pub fn zero(lines: usize) -> Self {
        FractionalMatching {
            values: vec![Rational::zero(); lines],
        }
    }

    /// `|x| = Σ x_l`.
    pub fn size(&self) -> Rational {
        self.values.iter().sum()
    }

    pub fn weight(&self, weights: &[Rational]) -> Rational {
        self.values.iter().zip(weights).map(|(x, w)| x * w).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_positive())
            .collect()
    }

    /// `a(X)·x`.
    pub fn load(&self, subset: ElementSet, lines: &[Line]) -> Rational {
        lines
            .iter()
            .zip(&self.values)
            .filter(|(_, x)| !x.is_zero())
            .map(|(l, x)| x * int(crate::matroid::degree(subset, l).into()))
            .sum()
    }

    pub fn is_half_integral(&self) -> bool {
        self.values.iter().all(rational::is_half_integer)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintRow {
    pub degrees: DegreeVector,
    pub flat: Flat,
}

/// `a(T)·x ≤ r(T)`, one row per distinct nonzero degree vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConstraintSystem {
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    /// Keeps the first flat seen per degree vector; `flats` must be sorted by rank.
    pub fn from_flats(flats: &[Flat], lines: &[Line]) -> Self {
        let mut index: HashMap<DegreeVector, usize> = HashMap::new();
        let mut rows = Vec::new();
        for flat in flats {
            let degrees = degree_vector(flat.elements, lines);
            if degrees.is_zero() || index.contains_key(&degrees) {
                continue;
            }
            index.insert(degrees.clone(), rows.len());
            rows.push(ConstraintRow {
                degrees,
                flat: *flat,
            });
        }
        ConstraintSystem { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_lp(&self, objective: &[Rational]) -> LinearProgram {
        LinearProgram {
            objective: objective.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| r.degrees.0.iter().map(|&a| int(a.into())).collect())
                .collect(),
            rhs: self.rows.iter().map(|r| from_usize(r.flat.rank)).collect(),
        }
    }
}

/// LP rows `a(F)·x ≤ r(F)` for an explicit list of flats.
pub(crate) fn flat_rows_lp(
    flats: &[Flat],
    lines: &[Line],
    objective: &[Rational],
) -> LinearProgram {
    LinearProgram {
        objective: objective.to_vec(),
        rows: flats
            .iter()
            .map(|f| {
                degree_vector(f.elements, lines)
                    .0
                    .iter()
                    .map(|&a| int(a.into()))
                    .collect()
            })
            .collect(),
        rhs: flats.iter().map(|f| from_usize(f.rank)).collect(),
    }
}

/// All-flat description of `(M, L)` plus the derived constraint system.
#[derive(Clone, Debug)]
pub struct MatchingPolytope {
    matroid: Matroid,
    lines: Vec<Line>,
    flats: Vec<Flat>,
    system: ConstraintSystem,
}

impl MatchingPolytope {
    pub fn new(matroid: &Matroid, lines: &[Line], budget: usize) -> Result<Self> {
        let flats = matroid.enumerate_flats(budget)?;
        let system = ConstraintSystem::from_flats(&flats, lines);
        Ok(MatchingPolytope {
            matroid: matroid.clone(),
            lines: lines.to_vec(),
            flats,
            system,
        })
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn constraints(&self) -> &ConstraintSystem {
        &self.system
    }

    pub fn full_rank(&self) -> usize {
        self.matroid.full_rank()
    }

    pub fn top(&self) -> Flat {
        *self.flats.last().expect("the ground set is always a flat")
    }

    pub fn bottom(&self) -> Flat {
        self.flats[0]
    }

    /// Basic optimal solution of `max w·x` over the polytope.
    pub fn solve_weighted(&self, weights: &[Rational]) -> Result<LpSolution> {
        if weights.len() != self.lines.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} lines",
                weights.len(),
                self.lines.len()
            )));
        }
        let solution = lp::solve(&self.system.to_lp(weights))?;
        if solution.status != LpStatus::Optimal {
            return Err(Error::Internal(format!(
                "matching LP returned {:?}",
                solution.status
            )));
        }
        Ok(solution)
    }

    /// A vertex `x` of maximum size, and `ν* = |x|`.
    pub fn max_size_matching(&self) -> Result<(FractionalMatching, Rational)> {
        let ones = vec![int(1); self.lines.len()];
        let solution = self.solve_weighted(&ones)?;
        Ok((
            FractionalMatching {
                values: solution.primal,
            },
            solution.objective_value,
        ))
    }

    /// `|x| = r(E)/2`.
    pub fn is_perfect(&self, x: &FractionalMatching) -> bool {
        x.size() * int(2) == from_usize(self.full_rank())
    }

    /// Closure of the union of the lines in the support of `x`.
    pub fn closure_of_matching(&self, x: &FractionalMatching) -> Flat {
        let union = x.support().into_iter().fold(ElementSet::EMPTY, |acc, i| {
            acc.union(self.lines[i].elements)
        });
        self.matroid.cl(union)
    }

    /// Chain-supported optimal dual for integral `w` with every coefficient in `½ℤ`.
    ///
    /// The LP dual is uncrossed to a chain and re-solved on the chain rows to get a
    /// basic dual. That dual is then recomputed through the column-sum-two system on
    /// consecutive row differences, and both routes must agree.
    pub fn half_integer_dual(&self, weights: &[Rational]) -> Result<FormalSum> {
        if weights.iter().any(|w| !w.is_integer() || w.is_negative()) {
            return Err(Error::DimensionMismatch(
                "half-integral duals need nonnegative integral weights".into(),
            ));
        }
        let first = self.solve_weighted(weights)?;
        let dual: FormalSum = self
            .system
            .rows
            .iter()
            .zip(&first.dual)
            .map(|(row, y)| (row.flat, y.clone()))
            .collect();
        let chain = uncross(&self.matroid, &dual)?.chain_order();
        let flats: Vec<Flat> = chain.iter().map(|(f, _)| *f).collect();
        let restricted = lp::solve(&flat_rows_lp(&flats, &self.lines, weights))?;
        if restricted.status != LpStatus::Optimal
            || restricted.objective_value != first.objective_value
        {
            return Err(Error::Internal(
                "chain-restricted dual does not reach the LP optimum".into(),
            ));
        }
        let y: FormalSum = flats
            .iter()
            .zip(&restricted.dual)
            .map(|(f, c)| (*f, c.clone()))
            .collect();
        let via_claim = self.dual_from_basis(&flats, &restricted, weights)?;
        if via_claim != y {
            return Err(Error::Internal(
                "basis inverse route disagrees with the simplex dual".into(),
            ));
        }
        if !y.is_half_integral() {
            return Err(Error::Internal(format!(
                "basic chain dual is not half-integral: {y:?}"
            )));
        }
        Ok(y)
    }

    /// Recomputes the basic dual `y_N = Uᵀ D⁻ᵀ w_B` where `D = U A'` has column sums ≤ 2.
    fn dual_from_basis(
        &self,
        flats: &[Flat],
        solution: &LpSolution,
        weights: &[Rational],
    ) -> Result<FormalSum> {
        let n = self.lines.len();
        let basic_lines: Vec<usize> = solution.basis.iter().copied().filter(|&j| j < n).collect();
        let tight_rows: Vec<usize> = (0..flats.len())
            .filter(|&i| !solution.basis.contains(&(n + i)))
            .collect();
        if basic_lines.len() != tight_rows.len() {
            return Err(Error::Internal(
                "basis is not square on the chain rows".into(),
            ));
        }
        let k = tight_rows.len();
        let a: Vec<DegreeVector> = tight_rows
            .iter()
            .map(|&i| degree_vector(flats[i].elements, &self.lines))
            .collect();
        let d: Vec<Vec<u8>> = (0..k)
            .map(|i| {
                basic_lines
                    .iter()
                    .map(|&l| {
                        let below = if i == 0 { 0 } else { a[i - 1].0[l] };
                        a[i].0[l] - below
                    })
                    .collect()
            })
            .collect();
        // Columns of D^{-1}, one solve per unit vector.
        let mut inverse_columns = Vec::with_capacity(k);
        for c in 0..k {
            let unit: Vec<Rational> = (0..k)
                .map(|i| if i == c { int(1) } else { int(0) })
                .collect();
            inverse_columns.push(solve_chain_system(&d, &unit)?);
        }
        // v = D^{-T} w_B, so v_i = Σ_c (D^{-1})_{c,i} w_c.
        let v: Vec<Rational> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|c| &inverse_columns[i][c] * &weights[basic_lines[c]])
                    .sum()
            })
            .collect();
        let mut y = FormalSum::new();
        for i in 0..k {
            let above = if i + 1 < k {
                v[i + 1].clone()
            } else {
                Rational::zero()
            };
            y.add(flats[tight_rows[i]], &v[i] - above);
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn triangle() -> (Matroid, Vec<Line>) {
        (
            Matroid::free(3).unwrap(),
            vec![Line::new([0, 1]), Line::new([1, 2]), Line::new([0, 2])],
        )
    }

    #[test]
    fn constraint_rows() {
        let (m, lines) = triangle();
        assert_eq!(
            MatchingPolytope::new(&m, &[], 100)
                .unwrap()
                .constraints()
                .len(),
            0
        );
        assert_eq!(
            MatchingPolytope::new(&m, &lines, 100)
                .unwrap()
                .constraints()
                .len(),
            7
        );

        let u42 = Matroid::uniform(4, 2).unwrap();
        let p = MatchingPolytope::new(&u42, &[Line::new([0, 1])], 100).unwrap();
        let rows: Vec<(Vec<u8>, usize)> = p
            .constraints()
            .rows
            .iter()
            .map(|r| (r.degrees.0.clone(), r.flat.rank))
            .collect();
        assert_eq!(rows, vec![(vec![1], 1), (vec![2], 2)]);
    }

    #[test]
    fn triangle_max_size() {
        let (m, lines) = triangle();
        let p = MatchingPolytope::new(&m, &lines, 100).unwrap();
        let (x, nu) = p.max_size_matching().unwrap();
        assert_eq!(nu, ratio(3, 2));
        assert_eq!(x.values, vec![ratio(1, 2); 3]);
        assert!(p.is_perfect(&x));
        assert_eq!(p.closure_of_matching(&x).elements, m.ground());
        assert_eq!(
            p.closure_of_matching(&FractionalMatching::zero(3)).elements,
            ElementSet::EMPTY
        );
    }

    #[test]
    fn max_size_edge_cases() {
        let free3 = Matroid::free(3).unwrap();
        let empty = MatchingPolytope::new(&free3, &[], 100).unwrap();
        let (x, nu) = empty.max_size_matching().unwrap();
        assert_eq!(nu, int(0));
        assert!(!empty.is_perfect(&x));
        let nothing = MatchingPolytope::new(&Matroid::free(0).unwrap(), &[], 100).unwrap();
        assert!(nothing.is_perfect(&FractionalMatching::zero(0)));

        let u42 = Matroid::uniform(4, 2).unwrap();
        let p = MatchingPolytope::new(&u42, &[Line::new([0, 1]), Line::new([2, 3])], 100).unwrap();
        assert_eq!(p.max_size_matching().unwrap().1, int(1));
    }

    #[test]
    fn half_integer_duals() {
        let (m, lines) = triangle();
        let p = MatchingPolytope::new(&m, &lines, 100).unwrap();
        assert!(p.half_integer_dual(&vec![int(0); 3]).unwrap().is_empty());
        let y = p.half_integer_dual(&vec![int(1); 3]).unwrap();
        assert_eq!(y.rank(), ratio(3, 2));
        assert!(y.is_chain() && y.is_half_integral());
        let y = p.half_integer_dual(&[int(2), int(1), int(1)]).unwrap();
        assert_eq!(
            y.rank(),
            p.solve_weighted(&[int(2), int(1), int(1)])
                .unwrap()
                .objective_value
        );
        assert!(p.half_integer_dual(&[ratio(1, 2), int(1), int(1)]).is_err());
    }
}
