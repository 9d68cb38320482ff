use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exponent type for both variables. Everything in scope stays tiny.
pub type Exp = i32;

/// A Laurent polynomial in `p` and `T` with integer coefficients.
///
/// Terms are a sorted map from `(e_p, e_T)` to a nonzero coefficient, so two
/// values are equal iff their term maps are equal and rendering is
/// byte-stable.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<(Exp, Exp), BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn monomial(coeff: impl Into<BigInt>, p_exp: Exp, t_exp: Exp) -> Self {
        let c = coeff.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((p_exp, t_exp), c);
        }
        LaurentPoly { terms }
    }

    /// Builds from raw `(e_p, e_T, coeff)` triples, merging duplicates.
    pub fn from_terms<I, C>(iter: I) -> Self
    where
        I: IntoIterator<Item = (Exp, Exp, C)>,
        C: Into<BigInt>,
    {
        let mut poly = Self::zero();
        for (ep, et, c) in iter {
            poly.add_term(ep, et, c.into());
        }
        poly
    }

    pub(crate) fn add_term(&mut self, p_exp: Exp, t_exp: Exp, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((p_exp, t_exp)) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&(0, 0))
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exp, Exp, &BigInt)> {
        self.terms.iter().map(|(&(ep, et), c)| (ep, et, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, p_exp: Exp, t_exp: Exp) -> BigInt {
        self.terms
            .get(&(p_exp, t_exp))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Substitutes `p -> p^{-1}` and `T -> T^{-1}` simultaneously.
    pub fn invert_vars(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(ep, et), c)| ((-ep, -et), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `p -> p^{-1}` only (used for `b_I(p^{-1})`).
    pub fn invert_p(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(ep, et), c)| ((-ep, et), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by the monomial `c * p^a T^b`.
    pub fn mul_monomial(&self, coeff: &BigInt, p_exp: Exp, t_exp: Exp) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(ep, et), c)| ((ep + p_exp, et + t_exp), c * coeff))
                .collect(),
        }
    }

    pub fn min_t_exp(&self) -> Option<Exp> {
        self.terms.keys().map(|&(_, et)| et).min()
    }

    pub fn max_t_exp(&self) -> Option<Exp> {
        self.terms.keys().map(|&(_, et)| et).max()
    }

    /// Degree in `p` (largest exponent); `None` for the zero polynomial.
    pub fn p_degree(&self) -> Option<Exp> {
        self.terms.keys().map(|&(ep, _)| ep).max()
    }

    pub fn min_p_exp(&self) -> Option<Exp> {
        self.terms.keys().map(|&(ep, _)| ep).min()
    }

    /// The coefficient of `T^k` as a Laurent polynomial in `p` alone.
    pub fn coeff_of_t(&self, t_exp: Exp) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(_, et), _)| et == t_exp)
                .map(|(&(ep, _), c)| ((ep, 0), c.clone()))
                .collect(),
        }
    }

    /// Drops every term with `T`-exponent above `order`.
    pub fn truncate_t(&self, order: Exp) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(_, et), _)| et <= order)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    /// Multiplication that discards terms with `T`-exponent above `order`.
    pub fn mul_truncated(&self, other: &LaurentPoly, order: Exp) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&(ep1, et1), c1) in &self.terms {
            if et1 > order - other.min_t_exp().unwrap_or(0) {
                continue;
            }
            for (&(ep2, et2), c2) in &other.terms {
                let et = et1 + et2;
                if et > order {
                    continue;
                }
                out.add_term(ep1 + ep2, et, c1 * c2);
            }
        }
        out
    }

    /// Exact substitution `p = q`. Requires the result to be integral, which
    /// holds whenever all `p`-exponents are nonnegative and more generally for
    /// every value in scope; asserts otherwise.
    pub fn eval_p(&self, q: &BigInt) -> BTreeMap<Exp, BigInt> {
        let mut shift: BTreeMap<Exp, Exp> = BTreeMap::new();
        for &(ep, et) in self.terms.keys() {
            let cur = shift.entry(et).or_insert(0);
            *cur = (*cur).min(ep);
        }
        let mut out = BTreeMap::new();
        for (&(ep, et), c) in &self.terms {
            let m = shift[&et];
            let entry = out.entry(et).or_insert_with(BigInt::zero);
            *entry += c * q.pow((ep - m) as u32);
        }
        let mut final_out = BTreeMap::new();
        for (et, val) in out {
            let m = shift[&et];
            let v = if m < 0 {
                let d = q.pow((-m) as u32);
                let (quot, rem) = num_integer::Integer::div_rem(&val, &d);
                assert!(
                    rem.is_zero(),
                    "evaluation at p = {q} is not integral for the T^{et} coefficient"
                );
                quot
            } else if m > 0 {
                val * q.pow(m as u32)
            } else {
                val
            };
            if !v.is_zero() {
                final_out.insert(et, v);
            }
        }
        final_out
    }

    /// Evaluates a polynomial in `p` alone at `p = q`.
    pub fn eval_p_scalar(&self, q: &BigInt) -> BigInt {
        let m = self.eval_p(q);
        assert!(m.len() <= 1, "eval_p_scalar on a polynomial involving T");
        m.get(&0).cloned().unwrap_or_else(BigInt::zero)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&(ep, et), c) in &rhs.terms {
            out.add_term(ep, et, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&(ep, et), c) in &rhs.terms {
            out.add_term(ep, et, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&(ep1, et1), c1) in &self.terms {
            for (&(ep2, et2), c2) in &rhs.terms {
                out.add_term(ep1 + ep2, et1 + et2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, -c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    /// Text form; round-trips through [`super::parse_laurent`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(ep, et), c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || (ep == 0 && et == 0) {
                factors.push(abs.to_string());
            }
            if ep != 0 {
                factors.push(if ep == 1 {
                    "p".to_string()
                } else {
                    format!("p^{ep}")
                });
            }
            if et != 0 {
                factors.push(if et == 1 {
                    "T".to_string()
                } else {
                    format!("T^{et}")
                });
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> LaurentPoly {
        LaurentPoly::monomial(1, 1, 0)
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = LaurentPoly::from_terms([(1, 0, 1), (1, 0, -1), (0, 0, 2)]);
        assert_eq!(a, LaurentPoly::monomial(2, 0, 0));
        assert_eq!(a.num_terms(), 1);
    }

    #[test]
    fn arithmetic_basics() {
        let a = &p() + &LaurentPoly::one();
        let b = &p() - &LaurentPoly::one();
        let prod = &a * &b;
        assert_eq!(prod, LaurentPoly::from_terms([(2, 0, 1), (0, 0, -1)]));
    }

    #[test]
    fn invert_vars_negates_exponents() {
        let a = LaurentPoly::from_terms([(2, 3, 5), (-1, 0, 1)]);
        let inv = a.invert_vars();
        assert_eq!(inv.coeff(-2, -3), BigInt::from(5));
        assert_eq!(inv.coeff(1, 0), BigInt::from(1));
        assert_eq!(inv.invert_vars(), a);
    }

    #[test]
    fn eval_p_handles_negative_exponents_when_integral() {
        // p^{-1} * (p^2 + p) = p + 1 at p = 2 -> 3
        let a = LaurentPoly::from_terms([(1, 0, 1), (0, 0, 1)]);
        let shifted = a.mul_monomial(&BigInt::from(1), -1, 0);
        let b = &shifted * &p();
        assert_eq!(b.eval_p_scalar(&BigInt::from(2)), BigInt::from(3));
    }

    #[test]
    fn display_is_stable() {
        let a = LaurentPoly::from_terms([(0, 0, 1), (24, 10, -1)]);
        assert_eq!(a.to_string(), "1 - p^24*T^10");
    }
}
