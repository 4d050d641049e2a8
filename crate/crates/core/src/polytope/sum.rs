use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::matroid::{degree, ElementSet, Flat, Line};
use crate::rational::{self, from_usize, Rational};

/// A finitely supported rational combination of flats, `y = Σ y_F F`.
///
/// Zero coefficients are never stored. Rank and degree extend linearly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<Flat, Rational>,
}

impl FormalSum {
    pub fn new() -> Self {
        FormalSum::default()
    }

    pub fn single(flat: Flat, coefficient: Rational) -> Self {
        let mut sum = FormalSum::new();
        sum.add(flat, coefficient);
        sum
    }

    pub fn add(&mut self, flat: Flat, coefficient: Rational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(flat).or_insert_with(Rational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&flat);
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &FormalSum, scale: &Rational) {
        for (flat, c) in &other.terms {
            self.add(*flat, c * scale);
        }
    }

    pub fn coefficient(&self, elements: ElementSet) -> Rational {
        self.terms
            .iter()
            .find(|(f, _)| f.elements == elements)
            .map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Flat, &Rational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<Flat> {
        self.terms.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `r(y) = Σ y_F r(F)`.
    pub fn rank(&self) -> Rational {
        self.terms.iter().map(|(f, c)| c * from_usize(f.rank)).sum()
    }

    /// `a(y) = Σ y_F a(F)`.
    pub fn degrees(&self, lines: &[Line]) -> Vec<Rational> {
        lines
            .iter()
            .map(|line| {
                self.terms
                    .iter()
                    .map(|(f, c)| c * Rational::from_integer(degree(f.elements, line).into()))
                    .sum()
            })
            .collect()
    }

    /// `f(y) = Σ y_F r(F)²`, the uncrossing potential.
    pub fn potential(&self) -> Rational {
        self.terms
            .iter()
            .map(|(f, c)| c * from_usize(f.rank * f.rank))
            .sum()
    }

    pub fn is_chain(&self) -> bool {
        let support: Vec<&Flat> = self.terms.keys().collect();
        support
            .iter()
            .enumerate()
            .all(|(i, s)| support[i + 1..].iter().all(|t| !s.crosses(t)))
    }

    /// Support sorted by inclusion; only meaningful when [`FormalSum::is_chain`] holds.
    pub fn chain_order(&self) -> Vec<(Flat, Rational)> {
        let mut terms: Vec<(Flat, Rational)> =
            self.terms.iter().map(|(f, c)| (*f, c.clone())).collect();
        terms.sort_by_key(|(f, _)| f.elements.len());
        terms
    }

    pub fn is_half_integral(&self) -> bool {
        self.terms.values().all(rational::is_half_integer)
    }

    /// True when every coefficient is nonnegative, except possibly that of `except`.
    pub fn is_nonnegative_except(&self, except: Option<ElementSet>) -> bool {
        self.terms
            .iter()
            .all(|(f, c)| Some(f.elements) == except || !c.is_negative())
    }

    /// Drops terms on the empty flat, which contribute nothing to rank or degree.
    pub fn without_empty(mut self) -> Self {
        self.terms.retain(|f, _| !f.elements.is_empty());
        self
    }

    /// Replaces every flat through `map`, merging coefficients of coinciding images.
    pub fn map_flats(&self, map: impl Fn(&Flat) -> Flat) -> Self {
        let mut out = FormalSum::new();
        for (f, c) in &self.terms {
            out.add(map(f), c.clone());
        }
        out
    }
}

impl FromIterator<(Flat, Rational)> for FormalSum {
    fn from_iter<I: IntoIterator<Item = (Flat, Rational)>>(iter: I) -> Self {
        let mut sum = FormalSum::new();
        for (f, c) in iter {
            sum.add(f, c);
        }
        sum
    }
}
