//! Exact arithmetic for Laurent polynomials and rational functions in the
//! two formal variables `p` and `T = p^{-s}`.
//!
//! Rational functions are kept with factored geometric denominators
//! `1 - p^a T^b` and are never gcd-reduced; equality is decided by
//! cross-multiplication. Coefficients are arbitrary-precision integers.

mod laurent;
mod ratfun;
mod render;

pub use laurent::{Exp, LaurentPoly};
pub use ratfun::{FactorSet, GeomFactor, RatFun, RatFunAtPrime, TruncSeries};
pub use render::{parse_laurent, parse_ratfun};
