//! Primal-dual algorithm for maximum weight (perfect) fractional matchings.
//!
//! The dual is kept as `y = λ₁F₁ + … + λ_kF_k + λE` over a chain of flats. Each round
//! computes a maximum size matching and the dominant cover of `(M ⋆ F, L_y)`, where
//! `L_y` holds the lines whose dual constraint is tight, and either stops with a
//! perfect matching or moves `y` along the direction derived from the cover.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{validate_instance, Chain, ElementSet, Flat, Line, Matroid};
use crate::polytope::{Cover, FormalSum, FractionalMatching, MatchingPolytope};
use crate::rational::{self, from_usize, int, Rational};

/// The chain `F` and the dual `y` supported on `F ∪ {E}`.
#[derive(Clone, Debug)]
pub struct AlgorithmState {
    pub chain: Chain,
    pub dual: FormalSum,
    pub iteration: usize,
}

/// One round of the algorithm. `case` is 1 when the round found a perfect matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    #[serde(with = "rational::serde_str")]
    pub nu: Rational,
    pub psi: usize,
    #[serde(with = "rational::serde_extended")]
    pub eps1: Option<Rational>,
    #[serde(with = "rational::serde_extended")]
    pub eps2: Option<Rational>,
    pub case: u8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace records serialize") + "\n")
            .collect()
    }

    /// First index `i` where `(r(E) − 2ν*, ψ)` fails to drop from record `i − 1` to `i`.
    pub fn first_non_decrease(&self, full_rank: usize) -> Option<usize> {
        let measure = |r: &IterationRecord| (from_usize(full_rank) - &r.nu * int(2), r.psi);
        self.records
            .windows(2)
            .position(|w| measure(&w[1]) >= measure(&w[0]))
            .map(|i| i + 1)
    }
}

/// Output of the weighted solvers: a matching, an optimal dual and the run trace.
#[derive(Clone, Debug)]
pub struct WeightedSolution {
    pub matching: FractionalMatching,
    pub dual: FormalSum,
    pub trace: IterationTrace,
}

impl WeightedSolution {
    pub fn objective(&self, weights: &[Rational]) -> Rational {
        self.matching.weight(weights)
    }
}

pub enum Step {
    Perfect(FractionalMatching, IterationRecord),
    Updated(AlgorithmState, IterationRecord),
}

pub fn iteration_cap(full_rank: usize) -> usize {
    8 * full_rank.pow(3) + 8
}

/// Indices of the lines with `w_l = a(y)_l`.
pub fn restricted_lines(lines: &[Line], weights: &[Rational], dual: &FormalSum) -> Vec<usize> {
    dual.degrees(lines)
        .iter()
        .zip(weights)
        .enumerate()
        .filter(|(_, (a, w))| a == w)
        .map(|(i, _)| i)
        .collect()
}

fn check_weights(lines: &[Line], weights: &[Rational]) -> Result<()> {
    if weights.len() != lines.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} lines",
            weights.len(),
            lines.len()
        )));
    }
    match weights.iter().position(Signed::is_negative) {
        Some(i) => Err(Error::NegativeWeight(i)),
        None => Ok(()),
    }
}

/// `F = ∅`, `y = λE` with `λ = ½ max w`.
pub fn init_state(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
) -> Result<AlgorithmState> {
    check_weights(lines, weights)?;
    if lines.is_empty() && matroid.full_rank() > 0 {
        return Err(Error::NoPerfectMatching);
    }
    let lambda = weights.iter().max().cloned().unwrap_or_else(Rational::zero) / int(2);
    Ok(AlgorithmState {
        chain: Chain::empty(),
        dual: FormalSum::single(matroid.cl(matroid.ground()), lambda),
        iteration: 0,
    })
}

/// `φ(F, X) = Σ_i r(F_i ∪ X_i)² − r(F_i)²` over the blocks of the chain.
pub fn phi(matroid: &Matroid, chain: &Chain, subset: ElementSet) -> usize {
    chain
        .blocks(matroid.ground())
        .iter()
        .map(|&(lower, part)| {
            let base = matroid.r(lower);
            let top = matroid.r(lower.union(subset.intersection(part)));
            top * top - base * base
        })
        .sum()
}

/// `ψ(F, S, T) = φ(F, S) + φ(F, T) + 2 r(E) r_{M⋆F}(T)`.
pub fn psi(matroid: &Matroid, chain: &Chain, lower: ElementSet, upper: ElementSet) -> usize {
    let star_rank: usize = chain
        .blocks(matroid.ground())
        .iter()
        .map(|&(f, part)| matroid.r(f.union(upper.intersection(part))) - matroid.r(f))
        .sum();
    phi(matroid, chain, lower) + phi(matroid, chain, upper) + 2 * matroid.full_rank() * star_rank
}

/// `Σ_i (X_i ∪ F_i − F_i)` as a formal sum over flats of `M`, empty flats dropped.
fn blockwise_lift(matroid: &Matroid, chain: &Chain, star_flat: ElementSet) -> Result<FormalSum> {
    let mut sum = FormalSum::new();
    for (lower, part) in chain.blocks(matroid.ground()) {
        let lifted = lower.union(star_flat.intersection(part));
        let flat = matroid
            .flat(lifted)
            .map_err(|_| Error::Internal(format!("{lifted} does not lift to a flat")))?;
        sum.add(flat, int(1));
        sum.add(matroid.cl(lower), int(-1));
    }
    Ok(sum.without_empty())
}

/// One round: Case 1 returns the perfect matching, Case 2 the updated state.
pub fn step(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
    state: &AlgorithmState,
    budget: usize,
) -> Result<Step> {
    let tight = restricted_lines(lines, weights, &state.dual);
    let tight_lines: Vec<Line> = tight.iter().map(|&i| lines[i]).collect();
    let star = matroid.star(&state.chain)?;
    let polytope = MatchingPolytope::new(&star, &tight_lines, budget)?;
    let (local, nu) = polytope.max_size_matching()?;
    let cover: Cover = polytope.dominant_cover_given(&nu)?;
    let psi_value = psi(
        matroid,
        &state.chain,
        cover.lower.elements,
        cover.upper.elements,
    );
    let iter = state.iteration;

    if polytope.is_perfect(&local) {
        let mut x = FractionalMatching::zero(lines.len());
        for (value, &i) in local.values.into_iter().zip(&tight) {
            x.values[i] = value;
        }
        let record = IterationRecord {
            iter,
            nu,
            psi: psi_value,
            eps1: None,
            eps2: None,
            case: 1,
        };
        return Ok(Step::Perfect(x, record));
    }

    let top = matroid.cl(matroid.ground());
    let mut z = blockwise_lift(matroid, &state.chain, cover.lower.elements)?;
    z.add_scaled(
        &blockwise_lift(matroid, &state.chain, cover.upper.elements)?,
        &int(1),
    );
    z.add(top, int(-1));

    let mut eps1: Option<Rational> = None;
    for (flat, zf) in z.iter() {
        if flat.elements != top.elements && zf.is_negative() {
            let bound = state.dual.coefficient(flat.elements) / -zf;
            eps1 = rational::min_opt(eps1, Some(bound));
        }
    }
    let ay = state.dual.degrees(lines);
    let az = z.degrees(lines);
    let mut eps2: Option<Rational> = None;
    for ((a, d), w) in ay.iter().zip(&az).zip(weights) {
        if d.is_negative() {
            eps2 = rational::min_opt(eps2, Some((a - w) / -d));
        }
    }
    let eps = rational::min_opt(eps1.clone(), eps2.clone()).ok_or(Error::NoPerfectMatching)?;
    if !eps.is_positive() {
        return Err(Error::Internal(format!(
            "non-positive step length {eps} at iteration {iter}"
        )));
    }
    let mut dual = state.dual.clone();
    dual.add_scaled(&z, &eps);
    let flats: Vec<Flat> = dual
        .support()
        .into_iter()
        .filter(|f| f.elements != top.elements)
        .collect();
    if !dual.is_nonnegative_except(Some(top.elements)) {
        return Err(Error::Internal(format!(
            "negative chain coefficient after iteration {iter}"
        )));
    }
    let chain = Chain::new(matroid, flats)?;
    let record = IterationRecord {
        iter,
        nu,
        psi: psi_value,
        eps1,
        eps2,
        case: 2,
    };
    Ok(Step::Updated(
        AlgorithmState {
            chain,
            dual,
            iteration: iter + 1,
        },
        record,
    ))
}

/// Maximum `w`-weight perfect fractional matching with an optimal chain dual.
pub fn solve_max_weight_perfect(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
    budget: usize,
) -> Result<WeightedSolution> {
    validate_instance(matroid, lines)?;
    check_weights(lines, weights)?;
    let full_rank = matroid.full_rank();
    let (_, nu) = MatchingPolytope::new(matroid, lines, budget)?.max_size_matching()?;
    if nu * int(2) != from_usize(full_rank) {
        return Err(Error::NoPerfectMatching);
    }
    if lines.is_empty() {
        return Ok(WeightedSolution {
            matching: FractionalMatching::zero(0),
            dual: FormalSum::new(),
            trace: IterationTrace::default(),
        });
    }
    let cap = iteration_cap(full_rank);
    let mut state = init_state(matroid, lines, weights)?;
    let mut trace = IterationTrace::default();
    loop {
        if state.iteration >= cap {
            return Err(Error::BudgetExceeded {
                what: "primal-dual iterations",
                cap,
            });
        }
        match step(matroid, lines, weights, &state, budget)? {
            Step::Perfect(matching, record) => {
                trace.records.push(record);
                return Ok(WeightedSolution {
                    matching,
                    dual: state.dual,
                    trace,
                });
            }
            Step::Updated(next, record) => {
                trace.records.push(record);
                state = next;
            }
        }
    }
}

/// Maximum `w`-weight fractional matching, not necessarily perfect.
///
/// Adjoins a zero-weight singleton line `{b}` for each element of the greedy base,
/// using a fresh parallel copy of `b` when `{b}` is already a line, and solves the
/// perfect problem on the extended instance. Copies are dropped from the dual flats.
pub fn solve_max_weight(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
    budget: usize,
) -> Result<WeightedSolution> {
    validate_instance(matroid, lines)?;
    check_weights(lines, weights)?;
    let n = matroid.ground_size();
    let base = matroid.greedy_base();
    let mut parents = Vec::new();
    let mut extra_lines = Vec::new();
    for b in base {
        let singleton = ElementSet::singleton(b);
        if lines.iter().any(|l| l.elements == singleton) {
            extra_lines.push(Line::new([n + parents.len()]));
            parents.push(b);
        } else {
            extra_lines.push(Line::new([b]));
        }
    }
    if n + parents.len() > crate::matroid::MAX_GROUND {
        return Err(Error::GroundSetTooLarge(n + parents.len()));
    }
    let extended = if parents.is_empty() {
        matroid.clone()
    } else {
        matroid.parallel_extension(&parents)?
    };
    let all_lines: Vec<Line> = lines.iter().cloned().chain(extra_lines).collect();
    let mut all_weights = weights.to_vec();
    all_weights.resize(all_lines.len(), Rational::zero());
    let solution = solve_max_weight_perfect(&extended, &all_lines, &all_weights, budget)?;
    let ground = matroid.ground();
    let dual = solution.dual.map_flats(|f| Flat {
        elements: f.elements.intersection(ground),
        rank: f.rank,
    });
    let mut matching = solution.matching;
    matching.values.truncate(lines.len());
    Ok(WeightedSolution {
        matching,
        dual,
        trace: solution.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn set(ids: &[usize]) -> ElementSet {
        ids.iter().collect()
    }

    fn triangle() -> (Matroid, Vec<Line>) {
        (
            Matroid::free(3).unwrap(),
            vec![Line::new([0, 1]), Line::new([1, 2]), Line::new([0, 2])],
        )
    }

    #[test]
    fn phi_and_psi_examples() {
        let m = Matroid::free(4).unwrap();
        let chain = Chain::new(&m, vec![m.flat(set(&[0, 1])).unwrap()]).unwrap();
        assert_eq!(phi(&m, &chain, set(&[0, 2])), 6);
        assert_eq!(phi(&m, &chain, set(&[])), 0);
        assert_eq!(phi(&m, &Chain::empty(), set(&[1, 3])), 4);
        let e = m.ground();
        assert_eq!(psi(&m, &Chain::empty(), set(&[]), e), 3 * 16);
        assert_eq!(psi(&m, &Chain::empty(), set(&[]), set(&[])), 0);
    }

    #[test]
    fn restricted_line_filters() {
        let (m, lines) = triangle();
        let state = init_state(&m, &lines, &vec![int(1); 3]).unwrap();
        assert_eq!(state.dual.coefficient(m.ground()), ratio(1, 2));
        assert_eq!(
            restricted_lines(&lines, &vec![int(1); 3], &state.dual),
            vec![0, 1, 2]
        );
        let w = [int(4), int(2), int(2)];
        let state = init_state(&m, &lines, &w).unwrap();
        assert_eq!(state.dual.coefficient(m.ground()), int(2));
        assert_eq!(restricted_lines(&lines, &w, &state.dual), vec![0]);
        let state = init_state(&m, &lines, &vec![int(0); 3]).unwrap();
        assert!(state.dual.is_empty());
        assert_eq!(
            restricted_lines(&lines, &vec![int(0); 3], &state.dual),
            vec![0, 1, 2]
        );
        assert_eq!(
            restricted_lines(
                &lines,
                &vec![int(0); 3],
                &FormalSum::single(m.cl(m.ground()), int(1))
            ),
            Vec::<usize>::new()
        );
    }

    #[test]
    fn init_rejects_bad_input() {
        let (m, lines) = triangle();
        assert_eq!(
            init_state(&m, &[], &[]).unwrap_err(),
            Error::NoPerfectMatching
        );
        assert_eq!(
            init_state(&m, &lines, &[int(1), int(-1), int(0)]).unwrap_err(),
            Error::NegativeWeight(1)
        );
    }

    #[test]
    fn triangle_first_round_is_perfect() {
        let (m, lines) = triangle();
        let sol = solve_max_weight_perfect(&m, &lines, &vec![int(1); 3], 1000).unwrap();
        assert_eq!(sol.objective(&vec![int(1); 3]), ratio(3, 2));
        assert_eq!(sol.matching.values, vec![ratio(1, 2); 3]);
        assert_eq!(sol.dual, FormalSum::single(m.cl(m.ground()), ratio(1, 2)));
        assert_eq!(sol.trace.records.len(), 1);
        assert_eq!(sol.trace.records[0].case, 1);
    }

    #[test]
    fn triangle_skewed_weights() {
        let (m, lines) = triangle();
        let w = [int(2), int(1), int(1)];
        let sol = solve_max_weight_perfect(&m, &lines, &w, 1000).unwrap();
        // Rank-2 flats force 2x_l + x_m + x_n ≤ 2, so |x| = 3/2 pins every x_l to 1/2.
        assert_eq!(sol.objective(&w), int(2));
        assert_eq!(sol.dual.rank(), sol.objective(&w));
        assert_eq!(sol.trace.first_non_decrease(3), None);
    }

    #[test]
    fn two_lines_in_free_two() {
        let m = Matroid::free(2).unwrap();
        let lines = vec![Line::new([0]), Line::new([0, 1])];
        let sol = solve_max_weight_perfect(&m, &lines, &[int(1), int(1)], 1000).unwrap();
        assert_eq!(sol.objective(&[int(1), int(1)]), int(1));
        assert_eq!(sol.trace.records.len(), 1);
    }

    #[test]
    fn zero_weights() {
        let (m, lines) = triangle();
        let sol = solve_max_weight_perfect(&m, &lines, &vec![int(0); 3], 1000).unwrap();
        assert_eq!(sol.objective(&vec![int(0); 3]), int(0));
        assert_eq!(sol.matching.size(), ratio(3, 2));
        assert_eq!(sol.dual.rank(), int(0));
    }

    #[test]
    fn perfect_precheck() {
        let m = Matroid::uniform(4, 2).unwrap();
        let err = solve_max_weight_perfect(&m, &[Line::new([0])], &[int(1)], 1000).unwrap_err();
        assert_eq!(err, Error::NoPerfectMatching);
    }

    #[test]
    fn non_perfect_reduction() {
        let (m, lines) = triangle();
        assert_eq!(
            solve_max_weight(&m, &[], &[], 1000).unwrap().objective(&[]),
            int(0)
        );
        let sol = solve_max_weight(&m, &lines, &vec![int(1); 3], 1000).unwrap();
        assert_eq!(sol.objective(&vec![int(1); 3]), ratio(3, 2));
        let u42 = Matroid::uniform(4, 2).unwrap();
        let sol = solve_max_weight(&u42, &[Line::new([0, 1])], &[int(5)], 1000).unwrap();
        assert_eq!(sol.objective(&[int(5)]), int(5));
        assert_eq!(sol.dual.rank(), int(5));
        // A singleton line on a base element forces a parallel copy.
        let sol = solve_max_weight(
            &u42,
            &[Line::new([0]), Line::new([2, 3])],
            &[int(3), int(1)],
            1000,
        )
        .unwrap();
        assert_eq!(sol.objective(&[int(3), int(1)]), int(2));
    }

    #[test]
    fn trace_json_lines() {
        let record = IterationRecord {
            iter: 0,
            nu: ratio(3, 2),
            psi: 27,
            eps1: None,
            eps2: Some(ratio(1, 2)),
            case: 2,
        };
        let trace = IterationTrace {
            records: vec![record],
        };
        assert_eq!(
            trace.to_json_lines(),
            "{\"iter\":0,\"nu\":\"3/2\",\"psi\":27,\"eps1\":\"inf\",\"eps2\":\"1/2\",\"case\":2}\n"
        );
    }
}
