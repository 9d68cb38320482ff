//! Exact computation of the local normal zeta functions of the free
//! class-two nilpotent groups on 2, 3 and 4 generators, together with
//! independent brute-force oracles over small primes.
//!
//! The crate is organised around the pipeline
//!
//! * [`exactalg`] — exact Laurent-polynomial / rational-function arithmetic
//!   in the formal variables `p` and `T = p^{-s}`,
//! * [`combinat`] — Gaussian binomials, flag-variety point counts, the
//!   multiplicity function `mu` and sublattice counts,
//! * [`intlinalg`] — Hermite/Smith normal forms and sublattice enumeration,
//! * [`geometry`] — the Pfaffian quadric fourfold over small finite fields,
//! * [`zetacore`] — assembly of the structured zeta functions and the
//!   summation-lemma machinery,
//! * [`oracle`] — normal-subgroup counting by direct lattice enumeration.

pub mod combinat;
pub mod exactalg;
pub mod geometry;
pub mod intlinalg;
pub mod oracle;
pub mod zetacore;

pub use exactalg::{GeomFactor, LaurentPoly, RatFun, RatFunAtPrime, TruncSeries};
pub use intlinalg::{IntMatrix, LatticeType, SublatticeHnf};
pub use zetacore::Group;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A geometric-series expansion was requested for a factor `1 - p^a T^0`.
    #[error("cannot expand denominator factor 1 - p^{0}*T^0 as a power series in T")]
    NonExpandableFactor(u32),
    /// An enumeration would visit more lattices than the configured budget.
    #[error("enumeration of {lattices} lattices exceeds the budget of {budget}")]
    BudgetExceeded { lattices: u128, budget: u64 },
    /// `hnf` was handed a matrix whose columns do not span a finite-index lattice.
    #[error("matrix does not have full column rank {0}")]
    RankDeficient(usize),
    /// `divisor_type` was handed a lattice whose index is not a power of q.
    #[error("lattice index {index} is not a power of {q}")]
    NotPrimePowerIndex { index: String, q: u64 },
    /// The plane set could not be split into two rulings.
    #[error("ruling classification failed: {0}")]
    RulingPartition(String),
    /// A summation case descriptor outside the implemented family.
    #[error("unknown lattice-case descriptor: {0}")]
    UnknownCase(String),
    /// No monomial relates a zeta function to its p,T-inversion.
    #[error("functional equation check failed: {0}")]
    FunctionalEquation(String),
    /// Malformed starred index set for a decomposition coefficient.
    #[error("malformed index set: {0}")]
    MalformedIndexSet(String),
    /// Text or JSON parse failure for rendered values.
    #[error("parse error: {0}")]
    Parse(String),
    /// Cache I/O failure (soft: callers may recompute).
    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
