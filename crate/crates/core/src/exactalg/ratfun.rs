use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::{Exp, LaurentPoly};
use crate::{Error, Result};

/// The denominator factor `1 - p^a T^b` with `b >= 1`, so geometric expansion
/// in `T` is always well defined.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub struct GeomFactor {
    pub p_exp: u32,
    pub t_exp: u32,
}

impl GeomFactor {
    pub fn new(p_exp: u32, t_exp: u32) -> Self {
        assert!(t_exp >= 1, "geometric factor needs positive T-exponent");
        GeomFactor { p_exp, t_exp }
    }

    pub fn as_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms([
            (0, 0, BigInt::one()),
            (self.p_exp as Exp, self.t_exp as Exp, -BigInt::one()),
        ])
    }
}

impl fmt::Display for GeomFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.as_poly())
    }
}

/// Multiset of geometric factors.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FactorSet {
    counts: BTreeMap<GeomFactor, u32>,
}

impl FactorSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_factors<I: IntoIterator<Item = GeomFactor>>(iter: I) -> Self {
        let mut s = Self::empty();
        for f in iter {
            s.insert(f, 1);
        }
        s
    }

    pub fn insert(&mut self, f: GeomFactor, multiplicity: u32) {
        if multiplicity > 0 {
            *self.counts.entry(f).or_insert(0) += multiplicity;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GeomFactor, u32)> + '_ {
        self.counts.iter().map(|(&f, &m)| (f, m))
    }

    pub fn factor_count(&self) -> u32 {
        self.counts.values().sum()
    }

    /// Union with maximum multiplicity (the common denominator for addition).
    pub fn union_max(&self, other: &FactorSet) -> FactorSet {
        let mut out = self.clone();
        for (f, m) in other.iter() {
            let cur = out.counts.entry(f).or_insert(0);
            *cur = (*cur).max(m);
        }
        out
    }

    /// Multiset sum (the denominator of a product).
    pub fn sum(&self, other: &FactorSet) -> FactorSet {
        let mut out = self.clone();
        for (f, m) in other.iter() {
            out.insert(f, m);
        }
        out
    }

    /// Multiset difference `self - other`; panics if not a superset.
    fn difference(&self, other: &FactorSet) -> FactorSet {
        let mut out = self.clone();
        for (f, m) in other.iter() {
            let cur = out.counts.get_mut(&f).expect("difference of non-superset");
            assert!(*cur >= m, "difference of non-superset");
            *cur -= m;
            if *cur == 0 {
                out.counts.remove(&f);
            }
        }
        out
    }

    /// Expands the product of all factors as a polynomial.
    pub fn expand(&self) -> LaurentPoly {
        let mut out = LaurentPoly::one();
        for (f, m) in self.iter() {
            let fp = f.as_poly();
            for _ in 0..m {
                out = &out * &fp;
            }
        }
        out
    }

    /// Sum of `p`-exponents (with multiplicity); used by inversion.
    fn total_p_exp(&self) -> i64 {
        self.iter().map(|(f, m)| f.p_exp as i64 * m as i64).sum()
    }

    fn total_t_exp(&self) -> i64 {
        self.iter().map(|(f, m)| f.t_exp as i64 * m as i64).sum()
    }
}

/// An exact rational function `num / prod(1 - p^a T^b)`.
///
/// No gcd reduction is ever performed; [`RatFun::equal`] decides equality by
/// cross-multiplication, which is exact on this representation.
#[derive(Clone, Debug)]
pub struct RatFun {
    num: LaurentPoly,
    den: FactorSet,
}

impl RatFun {
    pub fn zero() -> Self {
        RatFun {
            num: LaurentPoly::zero(),
            den: FactorSet::empty(),
        }
    }

    pub fn one() -> Self {
        RatFun {
            num: LaurentPoly::one(),
            den: FactorSet::empty(),
        }
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        RatFun {
            num,
            den: FactorSet::empty(),
        }
    }

    pub fn monomial(coeff: impl Into<BigInt>, p_exp: Exp, t_exp: Exp) -> Self {
        Self::from_poly(LaurentPoly::monomial(coeff, p_exp, t_exp))
    }

    pub fn new(num: LaurentPoly, den: FactorSet) -> Self {
        RatFun { num, den }
    }

    /// `1 / (1 - p^a T^b)`.
    pub fn geom_inverse(f: GeomFactor) -> Self {
        RatFun {
            num: LaurentPoly::one(),
            den: FactorSet::from_factors([f]),
        }
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &FactorSet {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        let den = self.den.union_max(&other.den);
        let left = &self.num * &den.difference(&self.den).expand();
        let right = &other.num * &den.difference(&other.den).expand();
        RatFun {
            num: &left + &right,
            den,
        }
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun {
            num: &self.num * &other.num,
            den: self.den.sum(&other.den),
        }
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, poly: &LaurentPoly) -> RatFun {
        RatFun {
            num: &self.num * poly,
            den: self.den.clone(),
        }
    }

    /// Exact equality by cross-multiplication. When the two denominators are
    /// equal as multisets this reduces to numerator comparison.
    pub fn equal(&self, other: &RatFun) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        // Only clear the factors the other side is missing.
        let den = self.den.union_max(&other.den);
        let left = &self.num * &den.difference(&self.den).expand();
        let right = &other.num * &den.difference(&other.den).expand();
        left == right
    }

    /// Substitutes `p -> p^{-1}`, `T -> T^{-1}`.
    ///
    /// Each factor satisfies `1 - p^{-a}T^{-b} = (-p^{-a}T^{-b})(1 - p^a T^b)`,
    /// so the result keeps the same factor multiset and the inverted numerator
    /// picks up the accumulated sign and monomial.
    pub fn invert(&self) -> RatFun {
        let n = self.den.factor_count();
        let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let p_shift = self.den.total_p_exp();
        let t_shift = self.den.total_t_exp();
        let num = self
            .num
            .invert_vars()
            .mul_monomial(&sign, p_shift as Exp, t_shift as Exp);
        RatFun {
            num,
            den: self.den.clone(),
        }
    }

    /// Coefficients of the formal `T`-expansion, `T^0 .. T^order`, each a
    /// Laurent polynomial in `p` alone. Terms of the numerator with negative
    /// `T`-exponent feed into the expansion but only the power-series part is
    /// returned.
    pub fn series(&self, order: u32) -> Result<Vec<LaurentPoly>> {
        let t = self.series_trunc(order as Exp)?;
        Ok((0..=order as Exp).map(|k| t.coeff(k)).collect())
    }

    /// Full truncated `T`-expansion including any negative-exponent part.
    pub fn series_trunc(&self, order: Exp) -> Result<TruncSeries> {
        for (f, _) in self.den.iter() {
            if f.t_exp == 0 {
                return Err(Error::NonExpandableFactor(f.p_exp));
            }
        }
        let mut acc = self.num.truncate_t(order);
        for (f, m) in self.den.iter() {
            for _ in 0..m {
                acc = expand_against(&acc, f.p_exp as Exp, f.t_exp as Exp, order);
            }
        }
        Ok(TruncSeries { order, poly: acc })
    }

    /// Exact substitution `p = q` for a prime (or any integer >= 2).
    pub fn eval_p(&self, q: u64) -> RatFunAtPrime {
        let qb = BigInt::from(q);
        RatFunAtPrime {
            q,
            num: self.num.eval_p(&qb),
            den: self.den.clone(),
        }
    }
}

/// Multiplies a `T`-truncated polynomial by the geometric series of
/// `1/(1 - p^a T^b)`, truncating at `order`.
fn expand_against(acc: &LaurentPoly, a: Exp, b: Exp, order: Exp) -> LaurentPoly {
    let min_t = match acc.min_t_exp() {
        Some(m) => m,
        None => return LaurentPoly::zero(),
    };
    let reach = order - min_t;
    let mut out = LaurentPoly::zero();
    let mut k = 0;
    while k * b <= reach {
        let shifted = acc.mul_monomial(&BigInt::one(), a * k, b * k).truncate_t(order);
        out = &out + &shifted;
        k += 1;
    }
    out
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        let mut first = true;
        for (fac, m) in self.den.iter() {
            for _ in 0..m {
                if !first {
                    write!(f, "*")?;
                }
                write!(f, "{fac}")?;
                first = false;
            }
        }
        write!(f, ")")
    }
}

/// A `T`-truncated Laurent series with polynomial-in-`p` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    order: Exp,
    poly: LaurentPoly,
}

impl TruncSeries {
    pub fn zero(order: Exp) -> Self {
        TruncSeries {
            order,
            poly: LaurentPoly::zero(),
        }
    }

    pub fn one(order: Exp) -> Self {
        TruncSeries {
            order,
            poly: LaurentPoly::one(),
        }
    }

    pub fn from_poly(poly: LaurentPoly, order: Exp) -> Self {
        TruncSeries {
            order,
            poly: poly.truncate_t(order),
        }
    }

    pub fn order(&self) -> Exp {
        self.order
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    /// Coefficient of `T^k` as a polynomial in `p`.
    pub fn coeff(&self, k: Exp) -> LaurentPoly {
        self.poly.coeff_of_t(k)
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order.min(other.order);
        TruncSeries {
            order,
            poly: (&self.poly + &other.poly).truncate_t(order),
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order.min(other.order);
        TruncSeries {
            order,
            poly: (&self.poly - &other.poly).truncate_t(order),
        }
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order.min(other.order);
        TruncSeries {
            order,
            poly: self.poly.mul_truncated(&other.poly, order),
        }
    }

    pub fn mul_poly(&self, poly: &LaurentPoly) -> TruncSeries {
        TruncSeries {
            order: self.order,
            poly: self.poly.mul_truncated(poly, self.order),
        }
    }

    /// Equality on the common truncation order.
    pub fn agrees_with(&self, other: &TruncSeries) -> bool {
        let order = self.order.min(other.order);
        self.poly.truncate_t(order) == other.poly.truncate_t(order)
    }
}

/// A rational function in `T` alone, with `p` specialised to an integer `q`.
/// The factor set is interpreted with `p = q`.
#[derive(Clone, Debug)]
pub struct RatFunAtPrime {
    q: u64,
    num: BTreeMap<Exp, BigInt>,
    den: FactorSet,
}

impl RatFunAtPrime {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Coefficients of `T^0 .. T^order` of the `T`-expansion, exact integers.
    pub fn series(&self, order: u32) -> Result<Vec<BigInt>> {
        for (f, _) in self.den.iter() {
            if f.t_exp == 0 {
                return Err(Error::NonExpandableFactor(f.p_exp));
            }
        }
        let order = order as Exp;
        let min_t = self.num.keys().copied().min().unwrap_or(0).min(0);
        let width = (order - min_t) as usize + 1;
        let qb = BigInt::from(self.q);
        // acc[i] = coefficient of T^{min_t + i}
        let mut acc = vec![BigInt::zero(); width];
        for (&et, c) in &self.num {
            if et <= order {
                acc[(et - min_t) as usize] += c;
            }
        }
        for (f, m) in self.den.iter() {
            let qa = qb.pow(f.p_exp);
            let b = f.t_exp as usize;
            for _ in 0..m {
                // Multiply by sum_k q^{ak} T^{bk}: in-place prefix recurrence
                // acc[i] += q^a * acc[i - b].
                for i in b..width {
                    let add = &acc[i - b] * &qa;
                    acc[i] += add;
                }
            }
        }
        let mut out = Vec::with_capacity(order as usize + 1);
        for k in 0..=order {
            if k < min_t {
                out.push(BigInt::zero());
            } else {
                out.push(acc[(k - min_t) as usize].clone());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_over_1mt() -> RatFun {
        RatFun::new(
            LaurentPoly::monomial(1, 0, 1),
            FactorSet::from_factors([GeomFactor::new(0, 1)]),
        )
    }

    #[test]
    fn add_identity_and_example() {
        let z = t_over_1mt();
        assert!(RatFun::zero().add(&z).equal(&z));
        assert!(RatFun::one().mul(&z).equal(&z));
        // T/(1-T) + 1 = 1/(1-T)
        let sum = z.add(&RatFun::one());
        assert!(sum.equal(&RatFun::geom_inverse(GeomFactor::new(0, 1))));
    }

    #[test]
    fn equal_examples() {
        let z = t_over_1mt();
        assert!(z.equal(&z));
        // (1-T^2)/((1-T)(1-T)) == (1+T)/(1-T)
        let lhs = RatFun::new(
            LaurentPoly::from_terms([(0, 0, 1), (0, 2, -1)]),
            FactorSet::from_factors([GeomFactor::new(0, 1), GeomFactor::new(0, 1)]),
        );
        let rhs = RatFun::new(
            LaurentPoly::from_terms([(0, 0, 1), (0, 1, 1)]),
            FactorSet::from_factors([GeomFactor::new(0, 1)]),
        );
        assert!(lhs.equal(&rhs));
        // 1/(1-pT) != 1/(1-T)
        let a = RatFun::geom_inverse(GeomFactor::new(1, 1));
        let b = RatFun::geom_inverse(GeomFactor::new(0, 1));
        assert!(!a.equal(&b));
    }

    #[test]
    fn invert_monomial_and_geom() {
        let m = RatFun::monomial(1, 2, 3);
        assert!(m.invert().equal(&RatFun::monomial(1, -2, -3)));
        // (1/(1-pT))^inv = -pT/(1-pT)
        let g = RatFun::geom_inverse(GeomFactor::new(1, 1));
        let expected = RatFun::new(
            LaurentPoly::monomial(-1, 1, 1),
            FactorSet::from_factors([GeomFactor::new(1, 1)]),
        );
        assert!(g.invert().equal(&expected));
        assert!(g.invert().invert().equal(&g));
    }

    #[test]
    fn series_geometric() {
        let g = RatFun::geom_inverse(GeomFactor::new(1, 1));
        let s = g.series(2).unwrap();
        assert_eq!(s[0], LaurentPoly::one());
        assert_eq!(s[1], LaurentPoly::monomial(1, 1, 0));
        assert_eq!(s[2], LaurentPoly::monomial(1, 2, 0));
    }

    #[test]
    fn series_rejects_t0_factor() {
        let bad = RatFun::new(
            LaurentPoly::one(),
            FactorSet {
                counts: [(GeomFactor { p_exp: 1, t_exp: 0 }, 1)].into_iter().collect(),
            },
        );
        assert!(matches!(bad.series(1), Err(Error::NonExpandableFactor(1))));
    }

    #[test]
    fn eval_p_basics() {
        let m = RatFun::monomial(1, 1, 1);
        let e = m.eval_p(2);
        let s = e.series(1).unwrap();
        assert_eq!(s[0], BigInt::zero());
        assert_eq!(s[1], BigInt::from(2));
    }

    #[test]
    fn heisenberg_series() {
        // 1/((1-T)(1-pT)(1-p^2 T^3)): a_1 = 1+p, a_3 coefficient at p=2 is 19.
        let z = RatFun::new(
            LaurentPoly::one(),
            FactorSet::from_factors([
                GeomFactor::new(0, 1),
                GeomFactor::new(1, 1),
                GeomFactor::new(2, 3),
            ]),
        );
        let s = z.series(3).unwrap();
        assert_eq!(s[1], LaurentPoly::from_terms([(0, 0, 1), (1, 0, 1)]));
        assert_eq!(s[3].eval_p_scalar(&BigInt::from(2)), BigInt::from(19));
        let sq = z.eval_p(2).series(3).unwrap();
        assert_eq!(sq, vec![1.into(), 3.into(), 7.into(), 19.into()]);
    }
}
