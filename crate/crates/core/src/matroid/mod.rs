//! Finite matroids with exact, memoized rank evaluation.
//!
//! A [`Matroid`] is an immutable, cheaply clonable handle. Concrete kinds (uniform,
//! free, graphic, linear over GF(p) or the rationals, partition) are combined with
//! restriction, contraction, direct sums, parallel extensions and the chain
//! operation [`Matroid::star`], which forms the direct sum of the minors
//! `(M|F_{i+1})/F_i` over a chain of flats without materializing them.

mod lattice;
mod linear;
mod lines;
mod set;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;

pub use lattice::{Chain, Flat, DEFAULT_FLAT_BUDGET};
pub use lines::{degree, degree_vector, validate_instance, DegreeVector, Line};
pub use set::{ElementSet, MAX_GROUND};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone)]
pub struct Matroid(Arc<Inner>);

struct Inner {
    ground_size: usize,
    kind: Kind,
    cache: RwLock<HashMap<u64, usize>>,
}

#[derive(Clone)]
pub(crate) enum Kind {
    Uniform {
        rank: usize,
    },
    Free,
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    LinearGf {
        p: u64,
        rows: usize,
        columns: Vec<Vec<u64>>,
    },
    LinearQ {
        rows: usize,
        scaled: Vec<Vec<BigInt>>,
    },
    Partition {
        capacities: Vec<usize>,
        block_of: Vec<usize>,
    },
    /// New element `i` is `elements[i]` of the base.
    Restriction {
        base: Matroid,
        elements: Vec<usize>,
    },
    Contraction {
        base: Matroid,
        contracted: ElementSet,
        elements: Vec<usize>,
    },
    DirectSum {
        parts: Vec<Matroid>,
        offsets: Vec<usize>,
    },
    Star {
        base: Matroid,
        chain: Chain,
        /// `(F_i, F_{i+1} \ F_i, r(F_i))` for `i = 0..=k`.
        blocks: Vec<(ElementSet, ElementSet, usize)>,
    },
    /// Element `base_size + j` is parallel to `parents[j]`.
    ParallelExtension {
        base: Matroid,
        parents: Vec<usize>,
    },
}

impl Matroid {
    fn from_kind(ground_size: usize, kind: Kind) -> Result<Self> {
        if ground_size > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(ground_size));
        }
        Ok(Matroid(Arc::new(Inner {
            ground_size,
            kind,
            cache: RwLock::new(HashMap::new()),
        })))
    }

    /// `U_{k,n}`.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidMatroid(format!(
                "uniform rank {k} exceeds size {n}"
            )));
        }
        Self::from_kind(n, Kind::Uniform { rank: k })
    }

    pub fn free(n: usize) -> Result<Self> {
        Self::from_kind(n, Kind::Free)
    }

    /// Cycle matroid of a multigraph; edge index is element id.
    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::InvalidMatroid(format!(
                "edge ({u},{v}) references a vertex outside 0..{vertices}"
            )));
        }
        Self::from_kind(edges.len(), Kind::Graphic { vertices, edges })
    }

    /// Column matroid over GF(p); column index is element id.
    pub fn linear_gf(p: u64, columns: Vec<Vec<u64>>) -> Result<Self> {
        if p > (1 << 31) || !linear::is_prime(p) {
            return Err(Error::InvalidMatroid(format!(
                "{p} is not a prime below 2^31"
            )));
        }
        let rows = uniform_height(&columns)?;
        let columns = columns
            .into_iter()
            .map(|c| c.into_iter().map(|v| v % p).collect())
            .collect::<Vec<Vec<u64>>>();
        Self::from_kind(columns.len(), Kind::LinearGf { p, rows, columns })
    }

    /// Column matroid over the rationals.
    pub fn linear_q(columns: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = uniform_height(&columns)?;
        let scaled = columns.iter().map(|c| linear::integer_column(c)).collect();
        Self::from_kind(columns.len(), Kind::LinearQ { rows, scaled })
    }

    /// Partition matroid on consecutive blocks; at most `capacities[b]` elements of block `b`.
    pub fn partition(block_sizes: Vec<usize>, capacities: Vec<usize>) -> Result<Self> {
        if block_sizes.len() != capacities.len() {
            return Err(Error::InvalidMatroid(format!(
                "{} blocks but {} capacities",
                block_sizes.len(),
                capacities.len()
            )));
        }
        let block_of: Vec<usize> = block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
            .collect();
        Self::from_kind(
            block_of.len(),
            Kind::Partition {
                capacities,
                block_of,
            },
        )
    }

    /// `M|X`, with the elements of `X` renumbered `0..|X|` in increasing order.
    pub fn restriction(&self, subset: ElementSet) -> Result<Self> {
        self.check(subset)?;
        Self::from_kind(
            subset.len(),
            Kind::Restriction {
                base: self.clone(),
                elements: subset.to_vec(),
            },
        )
    }

    /// `M/X` on `E \ X`, renumbered `0..|E \ X|` in increasing order.
    pub fn contraction(&self, subset: ElementSet) -> Result<Self> {
        self.check(subset)?;
        let elements = self.ground().difference(subset).to_vec();
        Self::from_kind(
            elements.len(),
            Kind::Contraction {
                base: self.clone(),
                contracted: subset,
                elements,
            },
        )
    }

    /// Direct sum; the elements of `parts[j]` follow those of `parts[..j]`.
    pub fn direct_sum(parts: &[Matroid]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0;
        for part in parts {
            offsets.push(total);
            total += part.ground_size();
        }
        Self::from_kind(
            total,
            Kind::DirectSum {
                parts: parts.to_vec(),
                offsets,
            },
        )
    }

    /// Adjoins one new element parallel to each entry of `parents`.
    pub fn parallel_extension(&self, parents: &[usize]) -> Result<Self> {
        for &p in parents {
            if p >= self.ground_size() {
                return Err(Error::ElementOutOfRange {
                    element: p,
                    ground_size: self.ground_size(),
                });
            }
        }
        Self::from_kind(
            self.ground_size() + parents.len(),
            Kind::ParallelExtension {
                base: self.clone(),
                parents: parents.to_vec(),
            },
        )
    }

    /// `M ⋆ F`: the direct sum of `(M|F_{i+1})/F_i` over the chain, on the same ground set.
    pub fn star(&self, chain: &Chain) -> Result<Self> {
        chain.validate(self)?;
        if chain.is_empty() {
            return Ok(self.clone());
        }
        let blocks = chain
            .blocks(self.ground())
            .into_iter()
            .map(|(lower, part)| (lower, part, self.r(lower)))
            .collect();
        Self::from_kind(
            self.ground_size(),
            Kind::Star {
                base: self.clone(),
                chain: chain.clone(),
                blocks,
            },
        )
    }

    pub fn ground_size(&self) -> usize {
        self.0.ground_size
    }

    pub fn ground(&self) -> ElementSet {
        ElementSet::full(self.ground_size())
    }

    pub fn full_rank(&self) -> usize {
        self.r(self.ground())
    }

    /// Base matroid and chain when this matroid was built by [`Matroid::star`].
    pub fn star_parts(&self) -> Option<(&Matroid, &Chain)> {
        match &self.0.kind {
            Kind::Star { base, chain, .. } => Some((base, chain)),
            _ => None,
        }
    }

    pub(crate) fn check(&self, subset: ElementSet) -> Result<()> {
        if subset.span() > self.ground_size() {
            return Err(Error::ElementOutOfRange {
                element: subset.span() - 1,
                ground_size: self.ground_size(),
            });
        }
        Ok(())
    }

    /// Exact rank of `subset`.
    pub fn rank(&self, subset: ElementSet) -> Result<usize> {
        self.check(subset)?;
        Ok(self.r(subset))
    }

    /// Rank without the range check; `subset` must lie in the ground set.
    pub(crate) fn r(&self, subset: ElementSet) -> usize {
        debug_assert!(subset.span() <= self.ground_size());
        match &self.0.kind {
            Kind::Uniform { rank } => subset.len().min(*rank),
            Kind::Free => subset.len(),
            Kind::Partition {
                capacities,
                block_of,
                ..
            } => {
                let mut counts = vec![0usize; capacities.len()];
                for e in subset {
                    counts[block_of[e]] += 1;
                }
                counts.iter().zip(capacities).map(|(&c, &k)| c.min(k)).sum()
            }
            _ => self.cached_rank(subset),
        }
    }

    fn cached_rank(&self, subset: ElementSet) -> usize {
        if let Some(&rank) = self
            .0
            .cache
            .read()
            .expect("rank cache poisoned")
            .get(&subset.bits())
        {
            return rank;
        }
        let rank = self.compute_rank(subset);
        self.0
            .cache
            .write()
            .expect("rank cache poisoned")
            .insert(subset.bits(), rank);
        rank
    }

    fn compute_rank(&self, subset: ElementSet) -> usize {
        match &self.0.kind {
            Kind::Uniform { .. } | Kind::Free | Kind::Partition { .. } => unreachable!(),
            Kind::Graphic { vertices, edges } => linear::graphic_rank(*vertices, edges, subset),
            Kind::LinearGf { p, rows, columns } => linear::gf_rank(*p, *rows, columns, subset),
            Kind::LinearQ { rows, scaled, .. } => linear::integer_rank(*rows, scaled, subset),
            Kind::Restriction { base, elements } => {
                base.r(subset.iter().map(|e| elements[e]).collect())
            }
            Kind::Contraction {
                base,
                contracted,
                elements,
            } => {
                let lifted: ElementSet = subset.iter().map(|e| elements[e]).collect();
                base.r(lifted.union(*contracted)) - base.r(*contracted)
            }
            Kind::DirectSum { parts, offsets } => parts
                .iter()
                .zip(offsets)
                .map(|(part, &offset)| {
                    let local =
                        (subset.bits() >> offset) & ElementSet::full(part.ground_size()).bits();
                    part.r(ElementSet::from_bits(local))
                })
                .sum(),
            Kind::Star { base, blocks, .. } => blocks
                .iter()
                .map(|&(lower, part, lower_rank)| {
                    let piece = subset.intersection(part);
                    if piece.is_empty() {
                        0
                    } else {
                        base.r(piece.union(lower)) - lower_rank
                    }
                })
                .sum(),
            Kind::ParallelExtension { base, parents } => {
                let n = base.ground_size();
                let mut mapped = subset.intersection(base.ground());
                for e in subset.difference(base.ground()) {
                    mapped = mapped.with(parents[e - n]);
                }
                base.r(mapped)
            }
        }
    }

    /// Lexicographically first base, by greedy extension in element order.
    pub fn greedy_base(&self) -> ElementSet {
        let mut base = ElementSet::EMPTY;
        let mut rank = 0;
        for e in self.ground() {
            let next = base.with(e);
            let r = self.r(next);
            if r > rank {
                base = next;
                rank = r;
            }
        }
        base
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.0.kind {
            Kind::Uniform { .. } => "uniform",
            Kind::Free => "free",
            Kind::Graphic { .. } => "graphic",
            Kind::LinearGf { .. } => "linear_gf",
            Kind::LinearQ { .. } => "linear_q",
            Kind::Partition { .. } => "partition",
            Kind::Restriction { .. } => "restriction",
            Kind::Contraction { .. } => "contraction",
            Kind::DirectSum { .. } => "direct_sum",
            Kind::Star { .. } => "star",
            Kind::ParallelExtension { .. } => "parallel_extension",
        }
    }
}

fn uniform_height<T>(columns: &[Vec<T>]) -> Result<usize> {
    let rows = columns.first().map_or(0, Vec::len);
    if let Some((i, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != rows) {
        return Err(Error::InvalidMatroid(format!(
            "column {i} has {} entries, expected {rows}",
            c.len()
        )));
    }
    Ok(rows)
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matroid")
            .field("kind", &self.kind_name())
            .field("ground_size", &self.ground_size())
            .finish()
    }
}
