//! Exact maximum-weight fractional matroid matching.
//!
//! Given a loopless matroid `M`, a set `L` of lines (subsets of rank 1 or 2) and
//! nonnegative weights `w`, a fractional matching is a vector `x ≥ 0` on the lines
//! with `a(T)·x ≤ r(T)` for every flat `T`, where `a(T)_l` is 0, 1 or 2 depending on
//! whether `T` misses, meets or contains `l`.
//!
//! * [`matroid`]: matroids, flats, chains, lines and the chain operation `M ⋆ F`.
//! * [`lp`]: an exact rational simplex solver.
//! * [`polytope`]: the matching polytope, covers, uncrossing and half-integral duals.
//! * [`weighted`]: the primal-dual maximum-weight algorithm and its potentials.
//! * [`certify`]: independent oracles and verifiers.
//! * [`sweep`]: seeded random instances and the batch checker.
//! * [`instance`]: JSON instance and result files.

pub mod certify;
pub mod error;
pub mod instance;
pub mod lp;
pub mod matroid;
pub mod polytope;
pub mod rational;
pub mod sweep;
pub mod weighted;

pub use error::{Error, Result};
pub use matroid::{Chain, ElementSet, Flat, Line, Matroid};
pub use rational::Rational;
