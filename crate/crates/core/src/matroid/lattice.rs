use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElementSet, Matroid};
use crate::error::{Error, Result};

/// Flat-count cap used when no budget is given.
pub const DEFAULT_FLAT_BUDGET: usize = 20_000;

/// A closed set together with its rank.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Flat {
    pub elements: ElementSet,
    pub rank: usize,
}

impl fmt::Debug for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.elements, self.rank)
    }
}

impl Flat {
    pub fn is_subset(&self, other: &Flat) -> bool {
        self.elements.is_subset(other.elements)
    }

    /// Neither flat contains the other.
    pub fn crosses(&self, other: &Flat) -> bool {
        !self.is_subset(other) && !other.is_subset(self)
    }
}

impl Matroid {
    /// `{e : r(X + e) = r(X)}`.
    pub fn closure(&self, subset: ElementSet) -> Result<Flat> {
        self.check(subset)?;
        Ok(self.cl(subset))
    }

    pub(crate) fn cl(&self, subset: ElementSet) -> Flat {
        let rank = self.r(subset);
        let mut elements = subset;
        for e in self.ground().difference(subset) {
            if self.r(subset.with(e)) == rank {
                elements = elements.with(e);
            }
        }
        Flat { elements, rank }
    }

    pub fn is_flat(&self, subset: ElementSet) -> bool {
        self.check(subset).is_ok() && self.cl(subset).elements == subset
    }

    /// Wraps `subset` as a flat, failing if it is not closed.
    pub fn flat(&self, subset: ElementSet) -> Result<Flat> {
        let closed = self.closure(subset)?;
        if closed.elements != subset {
            return Err(Error::NotAFlat(subset));
        }
        Ok(closed)
    }

    fn check_flat(&self, flat: &Flat) -> Result<()> {
        if !self.is_flat(flat.elements) || self.r(flat.elements) != flat.rank {
            return Err(Error::NotAFlat(flat.elements));
        }
        Ok(())
    }

    /// `cl(S ∪ T)`.
    pub fn join(&self, s: &Flat, t: &Flat) -> Result<Flat> {
        self.check_flat(s)?;
        self.check_flat(t)?;
        Ok(self.cl(s.elements.union(t.elements)))
    }

    /// `S ∩ T`.
    pub fn meet(&self, s: &Flat, t: &Flat) -> Result<Flat> {
        self.check_flat(s)?;
        self.check_flat(t)?;
        let elements = s.elements.intersection(t.elements);
        Ok(Flat {
            elements,
            rank: self.r(elements),
        })
    }

    pub(crate) fn join_unchecked(&self, s: &Flat, t: &Flat) -> Flat {
        self.cl(s.elements.union(t.elements))
    }

    pub(crate) fn meet_unchecked(&self, s: &Flat, t: &Flat) -> Flat {
        let elements = s.elements.intersection(t.elements);
        Flat {
            elements,
            rank: self.r(elements),
        }
    }

    /// Every flat exactly once, sorted by rank and then lexicographically.
    ///
    /// Breadth-first over the lattice: start from `cl(∅)` and close `F + e` for every
    /// discovered flat `F` and element `e ∉ F`.
    pub fn enumerate_flats(&self, budget: usize) -> Result<Vec<Flat>> {
        let bottom = self.cl(ElementSet::EMPTY);
        let mut seen: HashSet<ElementSet> = HashSet::from([bottom.elements]);
        let mut queue = VecDeque::from([bottom]);
        let mut flats = Vec::new();
        while let Some(flat) = queue.pop_front() {
            flats.push(flat);
            for e in self.ground().difference(flat.elements) {
                let next = self.cl(flat.elements.with(e));
                if seen.insert(next.elements) {
                    if seen.len() > budget {
                        return Err(Error::BudgetExceeded {
                            what: "flat enumeration",
                            cap: budget,
                        });
                    }
                    queue.push_back(next);
                }
            }
        }
        flats.sort_by(|a, b| a.rank.cmp(&b.rank).then(a.elements.lex_cmp(b.elements)));
        Ok(flats)
    }
}

impl Matroid {
    /// `X ⋆ F`: the closure of `X` in `M ⋆ F`, computed blockwise as
    /// `∪_i cl((X ∩ F_{i+1}) ∪ F_i) \ F_i`.
    pub fn star_closure(&self, chain: &Chain, subset: ElementSet) -> Result<ElementSet> {
        self.check(subset)?;
        chain.validate(self)?;
        Ok(self.star_closure_unchecked(chain, subset))
    }

    pub(crate) fn star_closure_unchecked(&self, chain: &Chain, subset: ElementSet) -> ElementSet {
        chain
            .blocks(self.ground())
            .into_iter()
            .map(|(lower, part)| {
                let upper = lower.union(part);
                self.cl(subset.intersection(upper).union(lower))
                    .elements
                    .difference(lower)
            })
            .fold(ElementSet::EMPTY, ElementSet::union)
    }
}

/// Strictly nested flats `F_1 ⊂ … ⊂ F_k`, each proper and nonempty.
///
/// The sentinels `F_0 = ∅` and `F_{k+1} = E` are implicit.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    flats: Vec<Flat>,
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.flats).finish()
    }
}

impl Chain {
    pub fn empty() -> Self {
        Chain { flats: Vec::new() }
    }

    /// Sorts the flats by size and validates them against `matroid`.
    pub fn new(matroid: &Matroid, mut flats: Vec<Flat>) -> Result<Self> {
        flats.sort_by_key(|f| f.elements.len());
        let chain = Chain { flats };
        chain.validate(matroid)?;
        Ok(chain)
    }

    pub fn validate(&self, matroid: &Matroid) -> Result<()> {
        let ground = matroid.ground();
        for flat in &self.flats {
            matroid.check_flat(flat)?;
            if flat.elements.is_empty() || flat.elements == ground {
                return Err(Error::InvalidChain(format!(
                    "{} is not a proper nonempty flat",
                    flat.elements
                )));
            }
        }
        for pair in self.flats.windows(2) {
            if pair[0].elements == pair[1].elements || !pair[0].is_subset(&pair[1]) {
                return Err(Error::InvalidChain(format!(
                    "{} and {} are not strictly nested",
                    pair[0].elements, pair[1].elements
                )));
            }
        }
        Ok(())
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// `(F_i, F_{i+1} \ F_i)` for `i = 0..=k`, with the sentinels filled in.
    pub fn blocks(&self, ground: ElementSet) -> Vec<(ElementSet, ElementSet)> {
        let mut bounds = Vec::with_capacity(self.flats.len() + 2);
        bounds.push(ElementSet::EMPTY);
        bounds.extend(self.flats.iter().map(|f| f.elements));
        bounds.push(ground);
        bounds
            .windows(2)
            .map(|w| (w[0], w[1].difference(w[0])))
            .collect()
    }

    /// Union of two chains; fails unless the result is again a chain.
    pub fn merge(&self, other: &Chain, matroid: &Matroid) -> Result<Chain> {
        let mut flats = self.flats.clone();
        for flat in &other.flats {
            if !flats.iter().any(|f| f.elements == flat.elements) {
                flats.push(*flat);
            }
        }
        Chain::new(matroid, flats)
    }
}
