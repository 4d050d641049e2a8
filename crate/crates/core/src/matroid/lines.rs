use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElementSet, Matroid};
use crate::error::{Error, Result};

/// A subset of the ground set of rank 1 or 2. Lines need not be flats.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Line {
    pub elements: ElementSet,
}

impl Line {
    pub fn new<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        Line {
            elements: elements.into_iter().collect(),
        }
    }
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.elements)
    }
}

/// 0 if `X` misses the line, 2 if it contains it, 1 otherwise.
pub fn degree(subset: ElementSet, line: &Line) -> u8 {
    let common = subset.intersection(line.elements);
    if common.is_empty() {
        0
    } else if common == line.elements {
        2
    } else {
        1
    }
}

/// Per-line coefficients `a(X)_l ∈ {0, 1, 2}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeVector(pub Vec<u8>);

impl DegreeVector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `a(X)`; depends only on the sets, never on the matroid.
pub fn degree_vector(subset: ElementSet, lines: &[Line]) -> DegreeVector {
    DegreeVector(lines.iter().map(|l| degree(subset, l)).collect())
}

/// Checks loop-freeness and `1 <= r(l) <= 2` for every line.
pub fn validate_instance(matroid: &Matroid, lines: &[Line]) -> Result<()> {
    for e in matroid.ground() {
        if matroid.r(ElementSet::singleton(e)) == 0 {
            return Err(Error::LoopsPresent(e));
        }
    }
    for line in lines {
        matroid.check(line.elements)?;
        let rank = matroid.r(line.elements);
        if !(1..=2).contains(&rank) {
            return Err(Error::NotALine {
                line: line.elements,
                rank,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_cases() {
        let line = Line::new([0, 1]);
        assert_eq!(degree(ElementSet::EMPTY, &line), 0);
        assert_eq!(degree([0, 1, 2].iter().collect(), &line), 2);
        assert_eq!(degree(ElementSet::singleton(0), &line), 1);
        assert_eq!(
            degree_vector(ElementSet::singleton(1), &[line, Line::new([2])]),
            DegreeVector(vec![1, 0])
        );
    }

    #[test]
    fn validation() {
        let free3 = Matroid::free(3).unwrap();
        assert_eq!(validate_instance(&free3, &[Line::new([0, 1])]), Ok(()));

        let with_loop = Matroid::graphic(2, vec![(0, 1), (0, 1), (1, 1)]).unwrap();
        assert_eq!(
            validate_instance(&with_loop, &[]),
            Err(Error::LoopsPresent(2))
        );

        let free4 = Matroid::free(4).unwrap();
        assert_eq!(
            validate_instance(&free4, &[Line::new([0, 1, 2])]),
            Err(Error::NotALine {
                line: [0, 1, 2].iter().collect(),
                rank: 3
            })
        );
        assert!(matches!(
            validate_instance(&free3, &[Line::new([7])]),
            Err(Error::ElementOutOfRange { .. })
        ));
        assert!(matches!(
            validate_instance(&free3, &[Line::new([])]),
            Err(Error::NotALine { rank: 0, .. })
        ));
    }
}
