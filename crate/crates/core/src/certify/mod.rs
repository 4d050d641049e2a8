//! Certificates recomputed from scratch, independent of the solver's internals.
//!
//! Verifiers only trust the matroid rank oracle. Flats are rescanned, degree vectors
//! recounted, and optima come from a separately coded simplex.

mod lemmas;
mod oracle;
mod vertices;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use lemmas::{
    check_composition, check_degree_identity, check_lift, check_psi1, check_psi2, check_star_rank,
    check_submodularity, check_supermodularity, random_chain, random_lines, LemmaReport,
};
pub use oracle::{all_flats, brute_force_optimum, coefficient, simplex, unique_solution};
pub use vertices::{enumerate_optimal_vertices, is_vertex, MAX_VERTEX_LINES, MAX_VERTEX_ROWS};

use crate::error::Result;
use crate::matroid::{Chain, ElementSet, Line, Matroid};
use crate::polytope::{Cover, FormalSum, FractionalMatching, MatchingPolytope};
use crate::rational::{self, from_usize, int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    PrimalFeasible,
    DualFeasible,
    OptimalPair,
    HalfIntegral,
    TightClosure,
    DominantValid,
    Lift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub verdict: Verdict,
    pub violation: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Certificate {
    fn pass(kind: CertificateKind) -> Self {
        Certificate {
            kind,
            verdict: Verdict::Pass,
            violation: None,
            witness: None,
        }
    }

    fn fail(kind: CertificateKind, violation: Value) -> Self {
        Certificate {
            kind,
            verdict: Verdict::Fail,
            violation: Some(violation),
            witness: None,
        }
    }

    fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn ids(set: ElementSet) -> Vec<usize> {
    set.to_vec()
}

fn text(value: &Rational) -> String {
    rational::format(value)
}

/// `a(X)·x`, counted directly.
fn load(x: &[Rational], set: ElementSet, lines: &[Line]) -> Rational {
    lines
        .iter()
        .zip(x)
        .map(|(l, v)| v * int(oracle::coefficient(set, l)))
        .sum()
}

/// `x ≥ 0` and `a(T)·x ≤ r(T)` for every flat.
pub fn verify_matching(
    matroid: &Matroid,
    lines: &[Line],
    x: &FractionalMatching,
    budget: usize,
) -> Result<Certificate> {
    let kind = CertificateKind::PrimalFeasible;
    if x.values.len() != lines.len() {
        return Ok(Certificate::fail(
            kind,
            json!({"length": x.values.len(), "lines": lines.len()}),
        ));
    }
    if let Some(l) = x.values.iter().position(Signed::is_negative) {
        return Ok(Certificate::fail(
            kind,
            json!({"line": l, "value": text(&x.values[l])}),
        ));
    }
    for (set, rank) in oracle::all_flats(matroid, budget)? {
        let lhs = load(&x.values, set, lines);
        if lhs > from_usize(rank) {
            return Ok(Certificate::fail(
                kind,
                json!({"flat": ids(set), "lhs": text(&lhs), "rhs": rank}),
            ));
        }
    }
    Ok(Certificate::pass(kind).with_witness(json!({"size": text(&x.size())})))
}

/// `a(y) ≥ w`, `y ≥ 0` off `E` (and on `E` too unless `perfect`), every term a genuine flat.
pub fn verify_dual(
    matroid: &Matroid,
    lines: &[Line],
    weights: &[Rational],
    y: &FormalSum,
    perfect: bool,
) -> Certificate {
    let kind = CertificateKind::DualFeasible;
    let ground = matroid.ground();
    for (flat, c) in y.iter() {
        let closed = matroid.check(flat.elements).is_ok() && matroid.is_flat(flat.elements);
        if !closed || matroid.r(flat.elements) != flat.rank {
            return Certificate::fail(kind, json!({"not_a_flat": ids(flat.elements)}));
        }
        let free_sign = perfect && flat.elements == ground;
        if c.is_negative() && !free_sign {
            return Certificate::fail(kind, json!({"flat": ids(flat.elements), "coeff": text(c)}));
        }
    }
    for (l, (line, w)) in lines.iter().zip(weights).enumerate() {
        let a: Rational = y
            .iter()
            .map(|(f, c)| c * int(oracle::coefficient(f.elements, line)))
            .sum();
        if a < *w {
            return Certificate::fail(kind, json!({"line": l, "a(y)": text(&a), "w": text(w)}));
        }
    }
    let rank: Rational = y.iter().map(|(f, c)| c * from_usize(f.rank)).sum();
    Certificate::pass(kind).with_witness(json!({"r(y)": text(&rank)}))
}

/// `w·x = r(y)`, `w_l = a(y)_l` on the support of `x`, `a(F)x = r(F)` on the support of `y`.
pub fn verify_optimal_pair(
    lines: &[Line],
    weights: &[Rational],
    x: &FractionalMatching,
    y: &FormalSum,
) -> Certificate {
    let kind = CertificateKind::OptimalPair;
    let objective: Rational = x.values.iter().zip(weights).map(|(a, b)| a * b).sum();
    let rank: Rational = y.iter().map(|(f, c)| c * from_usize(f.rank)).sum();
    if objective != rank {
        return Certificate::fail(kind, json!({"w·x": text(&objective), "r(y)": text(&rank)}));
    }
    for (l, (line, v)) in lines.iter().zip(&x.values).enumerate() {
        if v.is_zero() {
            continue;
        }
        let a: Rational = y
            .iter()
            .map(|(f, c)| c * int(oracle::coefficient(f.elements, line)))
            .sum();
        if a != weights[l] {
            return Certificate::fail(
                kind,
                json!({"line": l, "a(y)": text(&a), "w": text(&weights[l])}),
            );
        }
    }
    for (flat, _) in y.iter() {
        let lhs = load(&x.values, flat.elements, lines);
        if lhs != from_usize(flat.rank) {
            return Certificate::fail(
                kind,
                json!({"flat": ids(flat.elements), "a(F)x": text(&lhs), "r(F)": flat.rank}),
            );
        }
    }
    Certificate::pass(kind).with_witness(json!({"objective": text(&objective)}))
}

/// The optimal-pair checks, plus the reported objective against `w·x`.
pub fn verify_reported_pair(
    lines: &[Line],
    weights: &[Rational],
    x: &FractionalMatching,
    y: &FormalSum,
    reported: &Rational,
) -> Certificate {
    let cert = verify_optimal_pair(lines, weights, x, y);
    let objective = x.weight(weights);
    if cert.passed() && objective != *reported {
        return Certificate::fail(
            CertificateKind::OptimalPair,
            json!({"reported": text(reported), "w·x": text(&objective)}),
        );
    }
    cert
}

/// Chain support and every coefficient in `½ℤ`.
pub fn verify_half_integral(y: &FormalSum) -> Certificate {
    let kind = CertificateKind::HalfIntegral;
    let support: Vec<ElementSet> = y.iter().map(|(f, _)| f.elements).collect();
    for a in &support {
        for b in &support {
            if !a.is_subset(*b) && !b.is_subset(*a) {
                return Certificate::fail(kind, json!({"crossing": [ids(*a), ids(*b)]}));
            }
        }
    }
    for (flat, c) in y.iter() {
        if !(c * int(2)).is_integer() {
            return Certificate::fail(kind, json!({"flat": ids(flat.elements), "coeff": text(c)}));
        }
    }
    Certificate::pass(kind)
}

/// Whether a vertex spans a tight flat.
///
/// Reports both `|x|` and `2|x| = a(cl(x))·x` against `r(cl(x))`. The verdict follows
/// the literal `|x| = r(cl(x))`; the witness carries both readings.
pub fn verify_tight_closure(
    matroid: &Matroid,
    lines: &[Line],
    x: &FractionalMatching,
    budget: usize,
) -> Result<Option<Certificate>> {
    if !is_vertex(matroid, lines, x, budget)? {
        return Ok(None);
    }
    let kind = CertificateKind::TightClosure;
    let union = x
        .support()
        .into_iter()
        .fold(ElementSet::EMPTY, |acc, l| acc.union(lines[l].elements));
    let closure = matroid.cl(union);
    let size = x.size();
    let rank = from_usize(closure.rank);
    let literal = size == rank;
    let doubled = &size * int(2) == rank;
    let tight_load = load(&x.values, closure.elements, lines) == rank;
    let witness = json!({
        "size": text(&size),
        "closure": ids(closure.elements),
        "rank": closure.rank,
        "literal": literal,
        "doubled": doubled,
        "tight": tight_load,
    });
    let cert = if literal {
        Certificate::pass(kind)
    } else {
        Certificate::fail(kind, json!({"size": text(&size), "rank": closure.rank}))
    };
    Ok(Some(cert.with_witness(witness)))
}

/// Dominant cover checks on tiny instances: it is a minimum cover, every minimum cover
/// sits between `S*` and `T*`, `S* = cl(∪_{l ⊄ T*} (T* ∩ l))`, and `T*` is the
/// intersection of `cl(x)` over the optimal vertices at `w = 1`.
pub fn verify_dominant(
    matroid: &Matroid,
    lines: &[Line],
    cover: &Cover,
    budget: usize,
) -> Result<Certificate> {
    let kind = CertificateKind::DominantValid;
    let ones = vec![int(1); lines.len()];
    let nu =
        brute_force_optimum(matroid, lines, &ones, false, budget)?.unwrap_or_else(Rational::zero);
    let (s, t) = (cover.lower.elements, cover.upper.elements);
    let covers_all = s.is_subset(t)
        && lines
            .iter()
            .all(|l| oracle::coefficient(s, l) + oracle::coefficient(t, l) >= 2);
    let value = from_usize(matroid.r(s) + matroid.r(t)) / int(2);
    if !covers_all || value != nu || !matroid.is_flat(s) || !matroid.is_flat(t) {
        return Ok(Certificate::fail(
            kind,
            json!({"minimum_cover": false, "value": text(&value), "nu": text(&nu)}),
        ));
    }
    let polytope = MatchingPolytope::new(matroid, lines, budget)?;
    let covers = polytope.minimum_covers(&nu)?;
    if let Some(c) = covers
        .iter()
        .find(|c| !s.is_subset(c.lower.elements) || !c.upper.elements.is_subset(t))
    {
        return Ok(Certificate::fail(
            kind,
            json!({"sandwich": [ids(c.lower.elements), ids(c.upper.elements)]}),
        ));
    }
    let lower = lines
        .iter()
        .filter(|l| !l.elements.is_subset(t))
        .fold(ElementSet::EMPTY, |acc, l| {
            acc.union(t.intersection(l.elements))
        });
    let expected = matroid.cl(lower).elements;
    if expected != s {
        return Ok(Certificate::fail(
            kind,
            json!({"lower_identity": ids(expected), "lower": ids(s)}),
        ));
    }
    let vertices = enumerate_optimal_vertices(matroid, lines, &ones, budget)?;
    let intersection = vertices.iter().fold(matroid.ground(), |acc, x| {
        let union = x
            .support()
            .into_iter()
            .fold(ElementSet::EMPTY, |u, l| u.union(lines[l].elements));
        acc.intersection(matroid.cl(union).elements)
    });
    if intersection != t {
        return Ok(Certificate::fail(
            kind,
            json!({"closure_intersection": ids(intersection), "upper": ids(t)}),
        ));
    }
    Ok(Certificate::pass(kind).with_witness(json!({
        "minimum_covers": covers.len(),
        "optimal_vertices": vertices.len(),
    })))
}

/// Lifting between `M ⋆ F` and `M`: star-feasible implies feasible, and feasible with
/// every chain flat tight implies star-feasible. Only reports the implications.
pub fn verify_lift(
    matroid: &Matroid,
    chain: &Chain,
    lines: &[Line],
    x: &FractionalMatching,
    budget: usize,
) -> Result<Certificate> {
    let kind = CertificateKind::Lift;
    let star = matroid.star(chain)?;
    let in_star = verify_matching(&star, lines, x, budget)?.passed();
    let in_base = verify_matching(matroid, lines, x, budget)?.passed();
    let chain_tight = chain
        .flats()
        .iter()
        .all(|f| load(&x.values, f.elements, lines) == from_usize(f.rank));
    let witness =
        json!({"star_feasible": in_star, "feasible": in_base, "chain_tight": chain_tight});
    if in_star && !in_base {
        return Ok(Certificate::fail(kind, json!({"direction": "forward"})).with_witness(witness));
    }
    if in_base && chain_tight && !in_star {
        return Ok(Certificate::fail(kind, json!({"direction": "backward"})).with_witness(witness));
    }
    Ok(Certificate::pass(kind).with_witness(witness))
}
