//! Randomized checks of the structural identities the algorithm relies on.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::oracle::coefficient;
use crate::error::Result;
use crate::matroid::{Chain, ElementSet, Flat, Line, Matroid};
use crate::polytope::MatchingPolytope;
use crate::rational::{from_usize, int, Rational};
use crate::weighted::phi;

/// Outcome of one family of randomized checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub name: &'static str,
    pub checks: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl LemmaReport {
    fn new(name: &'static str) -> Self {
        LemmaReport {
            name,
            checks: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn absorb(&mut self, other: &LemmaReport) {
        self.checks += other.checks;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation.clone_from(&other.first_violation);
        }
    }
}

pub(crate) fn random_subset<R: Rng>(ground: ElementSet, rng: &mut R) -> ElementSet {
    ground.iter().filter(|_| rng.random_bool(0.5)).collect()
}

/// A random chain of proper nonempty flats, built greedily from a shuffled list.
pub fn random_chain<R: Rng>(matroid: &Matroid, flats: &[Flat], rng: &mut R) -> Chain {
    let ground = matroid.ground();
    let mut pool: Vec<Flat> = flats
        .iter()
        .copied()
        .filter(|f| !f.elements.is_empty() && f.elements != ground)
        .collect();
    pool.shuffle(rng);
    let keep = rng.random_range(0..=pool.len().min(4));
    let mut chosen: Vec<Flat> = Vec::new();
    for f in pool {
        if chosen.len() == keep {
            break;
        }
        if chosen.iter().all(|c| c.is_subset(&f) || f.is_subset(c)) && !chosen.contains(&f) {
            chosen.push(f);
        }
    }
    Chain::new(matroid, chosen).expect("comparable proper flats form a chain")
}

/// Extends `chain` by further comparable flats, when any exist.
fn refine<R: Rng>(matroid: &Matroid, chain: &Chain, flats: &[Flat], rng: &mut R) -> Chain {
    let ground = matroid.ground();
    let mut pool: Vec<Flat> = flats
        .iter()
        .copied()
        .filter(|f| !f.elements.is_empty() && f.elements != ground && !chain.flats().contains(f))
        .collect();
    pool.shuffle(rng);
    let mut chosen = chain.flats().to_vec();
    let extra = rng.random_range(1..=2);
    let mut added = 0;
    for f in pool {
        if added == extra {
            break;
        }
        if chosen.iter().all(|c| c.is_subset(&f) || f.is_subset(c)) {
            chosen.push(f);
            added += 1;
        }
    }
    Chain::new(matroid, chosen).expect("comparable proper flats form a chain")
}

/// Random lines of rank 1 or 2: singletons and pairs.
pub fn random_lines<R: Rng>(matroid: &Matroid, count: usize, rng: &mut R) -> Vec<Line> {
    let n = matroid.ground_size();
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            Line::new([a, b])
        })
        .collect()
}

fn star_rank_formula(matroid: &Matroid, chain: &Chain, subset: ElementSet) -> usize {
    chain
        .blocks(matroid.ground())
        .iter()
        .map(|&(f, part)| matroid.r(f.union(subset.intersection(part))) - matroid.r(f))
        .sum()
}

/// Submodularity of rank on flats, with `r(S ∪ T) = r(S ∨ T)`.
pub fn check_submodularity<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    trials: usize,
    rng: &mut R,
) -> LemmaReport {
    let mut report = LemmaReport::new("submodularity");
    for _ in 0..trials {
        let s = flats[rng.random_range(0..flats.len())];
        let t = flats[rng.random_range(0..flats.len())];
        let join = matroid.cl(s.elements.union(t.elements));
        let meet = matroid.r(s.elements.intersection(t.elements));
        let ok = s.rank + t.rank >= join.rank + meet
            && matroid.r(s.elements.union(t.elements)) == join.rank;
        report.record(ok, || format!("S={} T={}", s.elements, t.elements));
    }
    report
}

/// Supermodularity of every `a(·)_l` on flats.
pub fn check_supermodularity<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    lines: &[Line],
    trials: usize,
    rng: &mut R,
) -> LemmaReport {
    let mut report = LemmaReport::new("supermodularity");
    for _ in 0..trials {
        let s = flats[rng.random_range(0..flats.len())];
        let t = flats[rng.random_range(0..flats.len())];
        let join = matroid.cl(s.elements.union(t.elements)).elements;
        let meet = s.elements.intersection(t.elements);
        let bad = lines.iter().find(|l| {
            coefficient(s.elements, l) + coefficient(t.elements, l)
                > coefficient(join, l) + coefficient(meet, l)
        });
        report.record(bad.is_none(), || {
            format!("S={} T={} line={:?}", s.elements, t.elements, bad)
        });
    }
    report
}

/// `r_{M⋆F}(X) = Σ r(X_i ∪ F_i) − r(F_i) ≤ r(X)`, and the blockwise closure formula.
pub fn check_star_rank<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    trials: usize,
    rng: &mut R,
) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("star-rank");
    for _ in 0..trials {
        let chain = random_chain(matroid, flats, rng);
        let star = matroid.star(&chain)?;
        let x = random_subset(matroid.ground(), rng);
        let star_rank = star.r(x);
        let closure_ok = star.cl(x).elements == matroid.star_closure_unchecked(&chain, x);
        let ok = star_rank == star_rank_formula(matroid, &chain, x)
            && star_rank <= matroid.r(x)
            && closure_ok;
        report.record(ok, || format!("chain={chain:?} X={x}"));
    }
    Ok(report)
}

/// `a(S) = Σ a(S_i ∪ F_i) − a(F_i)` for flats `S` of `M ⋆ F`.
pub fn check_degree_identity<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    lines: &[Line],
    trials: usize,
    rng: &mut R,
) -> LemmaReport {
    let mut report = LemmaReport::new("degree-identity");
    for _ in 0..trials {
        let chain = random_chain(matroid, flats, rng);
        let s = matroid.star_closure_unchecked(&chain, random_subset(matroid.ground(), rng));
        let blocks = chain.blocks(matroid.ground());
        let bad = lines.iter().find(|l| {
            let lifted: i64 = blocks
                .iter()
                .map(|&(f, part)| coefficient(f.union(s.intersection(part)), l) - coefficient(f, l))
                .sum();
            lifted != coefficient(s, l)
        });
        report.record(bad.is_none(), || {
            format!("chain={chain:?} S={s} line={bad:?}")
        });
    }
    report
}

fn load(x: &[Rational], set: ElementSet, lines: &[Line]) -> Rational {
    lines
        .iter()
        .zip(x)
        .map(|(l, v)| v * int(coefficient(set, l)))
        .sum()
}

fn feasible(x: &[Rational], flats: &[Flat], lines: &[Line]) -> bool {
    flats
        .iter()
        .all(|f| load(x, f.elements, lines) <= from_usize(f.rank))
}

/// Scales a random direction onto the boundary of the polytope given by `flats`.
fn boundary_point<R: Rng>(flats: &[Flat], lines: &[Line], rng: &mut R) -> Vec<Rational> {
    let direction: Vec<Rational> = lines.iter().map(|_| int(rng.random_range(0..4))).collect();
    let scale = flats
        .iter()
        .filter_map(|f| {
            let a = load(&direction, f.elements, lines);
            (!a.is_zero()).then(|| from_usize(f.rank) / a)
        })
        .min();
    match scale {
        Some(t) => direction.iter().map(|d| d * &t).collect(),
        None => vec![Rational::zero(); lines.len()],
    }
}

/// Both directions of lifting matchings between `M ⋆ F` and `M`.
pub fn check_lift<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    lines: &[Line],
    trials: usize,
    budget: usize,
    rng: &mut R,
) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("lift");
    let polytope = MatchingPolytope::new(matroid, lines, budget)?;
    for trial in 0..trials {
        let chain = random_chain(matroid, flats, rng);
        let star = matroid.star(&chain)?;
        let star_flats = star.enumerate_flats(budget)?;
        // Forward: star-feasible points are feasible in M.
        let x = boundary_point(&star_flats, lines, rng);
        report.record(feasible(&x, flats, lines), || {
            format!("forward chain={chain:?} x={x:?}")
        });

        // Backward: a point of M, and a chain of flats tight for it.
        let x = if trial % 2 == 0 {
            let w: Vec<Rational> = lines.iter().map(|_| int(rng.random_range(0..5))).collect();
            polytope.solve_weighted(&w)?.primal
        } else {
            boundary_point(flats, lines, rng)
        };
        let tight: Vec<Flat> = flats
            .iter()
            .copied()
            .filter(|f| load(&x, f.elements, lines) == from_usize(f.rank))
            .collect();
        let chain = random_chain(matroid, &tight, rng);
        let star = matroid.star(&chain)?;
        let star_flats = star.enumerate_flats(budget)?;
        report.record(feasible(&x, &star_flats, lines), || {
            format!("backward chain={chain:?} x={x:?}")
        });
    }
    Ok(report)
}

/// `φ(F, X') − φ(F, X) ≤ 2 r(E) (r_{M⋆F}(X') − r_{M⋆F}(X))`, equality iff the ranks agree.
pub fn check_psi1<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    trials: usize,
    rng: &mut R,
) -> LemmaReport {
    let mut report = LemmaReport::new("psi1");
    let full = matroid.full_rank();
    for _ in 0..trials {
        let chain = random_chain(matroid, flats, rng);
        let big = random_subset(matroid.ground(), rng);
        let small = random_subset(big, rng);
        let lhs = phi(matroid, &chain, big) - phi(matroid, &chain, small);
        let rank_gap =
            star_rank_formula(matroid, &chain, big) - star_rank_formula(matroid, &chain, small);
        let rhs = rank_gap * 2 * full;
        let ok = lhs <= rhs && ((lhs == rhs) == (rank_gap == 0));
        report.record(ok, || {
            format!("chain={chain:?} X={small} X'={big} lhs={lhs} rhs={rhs}")
        });
    }
    report
}

/// For a refinement `F' ⊃ F` with equal star ranks of `X`: `φ(F, X) ≤ φ(F', X)`,
/// equality iff `F' ∪ {F_i ∨ X_i}` is a chain.
pub fn check_psi2<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    trials: usize,
    rng: &mut R,
) -> LemmaReport {
    let mut report = LemmaReport::new("psi2");
    let ground = matroid.ground();
    let mut attempts = 0;
    while report.checks < trials && attempts < trials * 50 {
        attempts += 1;
        let chain = random_chain(matroid, flats, rng);
        let finer = refine(matroid, &chain, flats, rng);
        if finer.len() == chain.len() {
            continue;
        }
        let x = random_subset(ground, rng);
        if star_rank_formula(matroid, &chain, x) != star_rank_formula(matroid, &finer, x) {
            continue;
        }
        let coarse_phi = phi(matroid, &chain, x);
        let fine_phi = phi(matroid, &finer, x);
        let mut members: Vec<ElementSet> = finer.flats().iter().map(|f| f.elements).collect();
        for (f, part) in chain.blocks(ground) {
            members.push(matroid.cl(f.union(x.intersection(part))).elements);
        }
        let is_chain = members
            .iter()
            .all(|a| members.iter().all(|b| a.is_subset(*b) || b.is_subset(*a)));
        let ok = coarse_phi <= fine_phi && ((coarse_phi == fine_phi) == is_chain);
        report.record(ok, || {
            format!(
                "F={chain:?} F'={finer:?} X={x} phi={coarse_phi} phi'={fine_phi} chain={is_chain}"
            )
        });
    }
    report
}

/// `M ⋆ (F₁ ∪ F₂) = (M ⋆ F₁) ⋆ F₂` on random subsets.
pub fn check_composition<R: Rng>(
    matroid: &Matroid,
    flats: &[Flat],
    trials: usize,
    rng: &mut R,
) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("composition");
    for _ in 0..trials {
        let chain = random_chain(matroid, flats, rng);
        let (first, second): (Vec<Flat>, Vec<Flat>) =
            chain.flats().iter().partition(|_| rng.random_bool(0.5));
        let first = Chain::new(matroid, first)?;
        let inner = matroid.star(&first)?;
        let second: Vec<Flat> = second.iter().map(|f| inner.cl(f.elements)).collect();
        let twice = inner.star(&Chain::new(&inner, second)?)?;
        let once = matroid.star(&chain)?;
        let x = random_subset(matroid.ground(), rng);
        report.record(once.r(x) == twice.r(x), || format!("chain={chain:?} X={x}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lemmas_hold_on_small_matroids() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [
            Matroid::uniform(5, 3).unwrap(),
            Matroid::graphic(4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap(),
            Matroid::free(4).unwrap(),
        ] {
            let flats = m.enumerate_flats(1000).unwrap();
            let lines = random_lines(&m, 4, &mut rng);
            for report in [
                check_submodularity(&m, &flats, 50, &mut rng),
                check_supermodularity(&m, &flats, &lines, 50, &mut rng),
                check_star_rank(&m, &flats, 50, &mut rng).unwrap(),
                check_degree_identity(&m, &flats, &lines, 50, &mut rng),
                check_lift(&m, &flats, &lines, 10, 1000, &mut rng).unwrap(),
                check_psi1(&m, &flats, 50, &mut rng),
                check_psi2(&m, &flats, 20, &mut rng),
                check_composition(&m, &flats, 30, &mut rng).unwrap(),
            ] {
                assert!(report.passed(), "{report:?}");
                assert!(report.checks > 0, "{report:?}");
            }
        }
    }
}
