//! Stratum generating functions `A_I` summed directly from the lattice
//! parametrisation: for each elementary-divisor type the columns carry
//! `mu`-distributed valuation parameters, and the starred strata subtract
//! capped minima of designated parameters from the `T`-weight.
//!
//! These finite sums are the arbiter for the closed-form factors: the
//! assembled zeta function must agree with `sum_I c_{I,p} A_I` term by term.

use num_bigint::BigInt;
use num_traits::One;

use crate::combinat::{flag_count, FlagType};
use crate::exactalg::{Exp, LaurentPoly, TruncSeries};
use crate::{Error, Result};

use super::fano_count;

/// A stratum descriptor: a set of starred levels (`subset of {1,2,3}`, the
/// flag part lying on the quadric) and trailing plain levels, all larger
/// than every starred level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CaseDescriptor {
    stars: Vec<u32>,
    plains: Vec<u32>,
}

impl CaseDescriptor {
    pub fn new(stars: Vec<u32>, plains: Vec<u32>) -> Result<Self> {
        let sorted = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&stars) || !sorted(&plains) {
            return Err(Error::MalformedIndexSet(
                "indices must be strictly increasing".into(),
            ));
        }
        if stars.iter().any(|&s| !(1..=3).contains(&s)) {
            return Err(Error::MalformedIndexSet("stars must lie in {1,2,3}".into()));
        }
        if plains.iter().any(|&j| !(1..=5).contains(&j)) {
            return Err(Error::MalformedIndexSet("levels must lie in {1,..,5}".into()));
        }
        if let (Some(&smax), Some(&pmin)) = (stars.last(), plains.first()) {
            if pmin <= smax {
                return Err(Error::MalformedIndexSet(
                    "plain levels must exceed every starred level".into(),
                ));
            }
        }
        Ok(CaseDescriptor { stars, plains })
    }

    /// Parses a descriptor such as `"1*,2*,4"` or `"2,3"` or `""`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut stars = Vec::new();
        let mut plains = Vec::new();
        for piece in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some(idx) = piece.strip_suffix('*') {
                stars.push(idx.trim().parse().map_err(|_| {
                    Error::MalformedIndexSet(format!("bad starred index '{piece}'"))
                })?);
            } else {
                plains.push(piece.parse().map_err(|_| {
                    Error::MalformedIndexSet(format!("bad index '{piece}'"))
                })?);
            }
        }
        Self::new(stars, plains)
    }

    pub fn stars(&self) -> &[u32] {
        &self.stars
    }

    pub fn plains(&self) -> &[u32] {
        &self.plains
    }

    /// All levels, sorted (the underlying lattice type).
    pub fn levels(&self) -> Vec<u32> {
        let mut all = self.stars.clone();
        all.extend_from_slice(&self.plains);
        all.sort_unstable();
        all
    }

    pub fn is_plain(&self) -> bool {
        self.stars.is_empty()
    }
}

impl std::fmt::Display for CaseDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.stars.iter().map(|s| format!("{s}*")).collect();
        parts.extend(self.plains.iter().map(|j| j.to_string()));
        if parts.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{{{}}}", parts.join(","))
        }
    }
}

/// The truncated stratum sum `A_I` to order `order` in `T` (always at
/// symbolic `p`). The summation bound over the multiplicities `r_i` is
/// raised automatically until every omitted term provably exceeds the
/// truncation order; `r_hint` only sets a starting point.
pub fn truncated_a(case: &CaseDescriptor, r_hint: u32, order: Exp) -> TruncSeries {
    let levels = case.levels();
    if levels.is_empty() {
        return TruncSeries::one(order);
    }
    // Per unit of r_i the T-order grows by at least (4+i) minus the maximal
    // min-corrections the level can absorb (2 for a starred point, 1 for a
    // starred line or plane).
    let w_min = |i: u32| -> Exp {
        if case.stars.contains(&i) {
            if i == 1 {
                3
            } else {
                (3 + i) as Exp
            }
        } else {
            (4 + i) as Exp
        }
    };
    let w_mins: Vec<Exp> = levels.iter().map(|&i| w_min(i)).collect();
    let _ = r_hint; // the weight bound supersedes any hint
    let mut out = TruncSeries::zero(order);
    let mut r = vec![0u32; levels.len()];
    enumerate_r(&w_mins, order, 0, &mut r, &mut |r| {
        out = out.add(&case_term(case, &levels, r, order));
    });
    out
}

fn enumerate_r(
    w_mins: &[Exp],
    budget: Exp,
    pos: usize,
    r: &mut Vec<u32>,
    f: &mut impl FnMut(&[u32]),
) {
    if pos == w_mins.len() {
        f(r);
        return;
    }
    let tail_min: Exp = w_mins[pos + 1..].iter().sum();
    let mut ri = 1u32;
    while w_mins[pos] * ri as Exp + tail_min <= budget {
        r[pos] = ri;
        enumerate_r(w_mins, budget - w_mins[pos] * ri as Exp, pos + 1, r, f);
        ri += 1;
    }
}

/// One `r`-vector's contribution: spectator parameters integrate to a
/// monomial, participating parameters to the capped-minimum inner sum.
fn case_term(case: &CaseDescriptor, levels: &[u32], r: &[u32], order: Exp) -> TruncSeries {
    let r_of = |i: u32| -> u32 {
        levels
            .iter()
            .position(|&l| l == i)
            .map(|k| r[k])
            .unwrap_or(0)
    };
    let i_last = *levels.last().unwrap();
    let base_p: Exp = levels
        .iter()
        .zip(r)
        .map(|(&i, &ri)| 4 * (i * ri) as Exp)
        .sum();
    let base_t: Exp = levels
        .iter()
        .zip(r)
        .map(|(&i, &ri)| ((4 + i) * ri) as Exp)
        .sum();
    let smax = case.stars.last().copied();
    let mut spectator_exp: Exp = 0;
    let mut participants: Vec<(u32, u32)> = Vec::new(); // (modulus exponent, shift)
    for c in 1..=i_last {
        let shift: u32 = levels
            .iter()
            .zip(r)
            .filter(|(&k, _)| k < c)
            .map(|(_, &ri)| ri)
            .sum();
        for v in 1..=(6 - c) {
            let m: u32 = levels
                .iter()
                .zip(r)
                .filter(|(&k, _)| k >= c && k <= 6 - v)
                .map(|(_, &ri)| ri)
                .sum();
            if m == 0 {
                continue;
            }
            let participating = smax.map(|s| c <= s && v <= c).unwrap_or(false);
            if participating {
                participants.push((m, shift));
            } else {
                spectator_exp += m as Exp - 1;
            }
        }
    }
    let poly = if case.stars.is_empty() {
        LaurentPoly::monomial(1, base_p + spectator_exp, base_t)
    } else {
        let cap2: u32 = case.stars.iter().map(|&s| r_of(s)).sum();
        let cap1 = if case.stars.contains(&1) {
            Some(r_of(1))
        } else {
            None
        };
        let inner = inner_sum(&participants, cap1, cap2);
        inner.mul_monomial(&BigInt::one(), base_p + spectator_exp, base_t)
    };
    TruncSeries::from_poly(poly, order)
}

/// Tail mass `sum_{b >= w} mu(m, b)` as a `p`-exponent: `m - max(1, w)` for
/// `w <= m`, none above.
fn tail(m: u32, w: i64) -> Option<i64> {
    if w > m as i64 {
        None
    } else {
        Some(m as i64 - w.max(1))
    }
}

/// The capped-minimum sum over participating parameters.
///
/// With `cap1 = None`: `sum_b prod_j mu(m_j, b_j) T^{-min(cap2, b_j + sh_j)}`.
/// With `cap1 = Some(r1)` the designated first parameter also enters a
/// second minimum `min(r1, b_1)` (the point-level correction), and the two
/// minima are summed in the exponent.
fn inner_sum(parts: &[(u32, u32)], cap1: Option<u32>, cap2: u32) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    match cap1 {
        None => {
            let g = |u: i64| -> Option<i64> {
                if u > cap2 as i64 {
                    return None;
                }
                let mut e = 0i64;
                for &(m, sh) in parts {
                    e += tail(m, u - sh as i64)?;
                }
                Some(e)
            };
            for u in 1..=cap2 as i64 {
                if let Some(e) = g(u) {
                    out.add_term(e as Exp, -u as Exp, BigInt::one());
                }
                if let Some(e) = g(u + 1) {
                    out.add_term(e as Exp, -u as Exp, -BigInt::one());
                }
            }
        }
        Some(r1) => {
            let f = |v1: i64, v2: i64| -> Option<i64> {
                if v1 > r1 as i64 || v2 > cap2 as i64 {
                    return None;
                }
                let (m0, sh0) = parts[0];
                debug_assert_eq!(sh0, 0);
                let mut e = tail(m0, v1.max(v2))?;
                for &(m, sh) in &parts[1..] {
                    e += tail(m, v2 - sh as i64)?;
                }
                Some(e)
            };
            for u1 in 1..=r1 as i64 {
                for u2 in 1..=cap2 as i64 {
                    for (d1, d2, sgn) in [(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, 1)] {
                        if let Some(e) = f(u1 + d1, u2 + d2) {
                            out.add_term(e as Exp, -(u1 + u2) as Exp, BigInt::from(sgn));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The decomposition coefficient `c_{I,p}` of the stratum, from the
/// regrouped form of the corrected sum:
///
/// * plain `I`: `b_I(p) - n_{i_1}(p) b_{(I - i_1)}(p)` with the shifted flag
///   counted in ambient `P^{5-i_1}` (second term only for `i_1 <= 3`);
/// * starred `J_1 u {k*} u J_2`: `n_k b_{J_2-k} b_{J_1} - n_{j_1}
///   b_{(J_2 - j_1)} b_{J_1 u {k}}` with lower flags counted in the ambient
///   of their Igusa factor (`P^{k-1}` resp. `P^{j_1-1}`).
pub fn coeff_c(case: &CaseDescriptor) -> LaurentPoly {
    let b = |ambient: u32, idx: &[u32]| flag_count(&FlagType::new(ambient, idx.to_vec()));
    if case.is_plain() {
        let plains = case.plains();
        let Some(&i1) = plains.first() else {
            return LaurentPoly::one();
        };
        let mut out = b(5, plains);
        if i1 <= 3 {
            let rest: Vec<u32> = plains[1..].iter().map(|&j| j - i1).collect();
            out = &out - &(&fano_count(i1) * &b(5 - i1, &rest));
        }
        out
    } else {
        let k = *case.stars().last().unwrap();
        let lower_stars = &case.stars()[..case.stars().len() - 1];
        let plains = case.plains();
        let shifted: Vec<u32> = plains.iter().map(|&j| j - k).collect();
        let mut out = &(&fano_count(k) * &b(5 - k, &shifted)) * &b(k - 1, lower_stars);
        if let Some(&j1) = plains.first() {
            if j1 <= 3 {
                let rest: Vec<u32> = plains[1..].iter().map(|&j| j - j1).collect();
                out = &out
                    - &(&(&fano_count(j1) * &b(5 - j1, &rest)) * &b(j1 - 1, case.stars()));
            }
        }
        out
    }
}

/// The full index family of the stratum decomposition: plain subsets of
/// `{1..5}`, and for each top star `k in {1,2,3}` all lower-star subsets
/// with trailing plain subsets of `{k+1..5}`.
pub fn decomposition_cases() -> Vec<CaseDescriptor> {
    let subsets = |lo: u32, hi: u32| -> Vec<Vec<u32>> {
        let items: Vec<u32> = (lo..=hi).collect();
        (0..(1u32 << items.len()))
            .map(|mask| {
                items
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    };
    let mut out = Vec::new();
    for plains in subsets(1, 5) {
        out.push(CaseDescriptor::new(Vec::new(), plains).unwrap());
    }
    for k in 1..=3u32 {
        for mut lower in subsets(1, k - 1) {
            lower.push(k);
            for plains in subsets(k + 1, 5) {
                out.push(CaseDescriptor::new(lower.clone(), plains).unwrap());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::mu;
    use crate::exactalg::{FactorSet, RatFun};
    use crate::zetacore::{exceptional, x_var, y_var};

    /// Brute-force reference: sums mu-weighted valuation tuples directly
    /// over every parameter of the type (feasible for small cases only).
    fn a_series_brute(case: &CaseDescriptor, order: Exp) -> TruncSeries {
        let levels = case.levels();
        if levels.is_empty() {
            return TruncSeries::one(order);
        }
        let w_min_total: Exp = levels.iter().map(|&i| (2 + i) as Exp).sum();
        let r_cap = (order / w_min_total.max(1)) as u32 + 1;
        let mut out = TruncSeries::zero(order);
        let mut r = vec![1u32; levels.len()];
        loop {
            out = out.add(&brute_term(case, &levels, &r, order));
            let mut pos = 0;
            loop {
                if pos == r.len() {
                    return out;
                }
                r[pos] += 1;
                if r[pos] <= r_cap {
                    break;
                }
                r[pos] = 1;
                pos += 1;
            }
        }
    }

    fn brute_term(case: &CaseDescriptor, levels: &[u32], r: &[u32], order: Exp) -> TruncSeries {
        let r_of = |i: u32| -> u32 {
            levels
                .iter()
                .position(|&l| l == i)
                .map(|k| r[k])
                .unwrap_or(0)
        };
        let i_last = *levels.last().unwrap();
        let base_p: Exp = levels.iter().zip(r).map(|(&i, &ri)| 4 * (i * ri) as Exp).sum();
        let base_t: Exp = levels.iter().zip(r).map(|(&i, &ri)| ((4 + i) * ri) as Exp).sum();
        if base_t - 3 * levels.len() as Exp * 10 > order {
            return TruncSeries::zero(order);
        }
        let smax = case.stars.last().copied();
        // collect every parameter with its modulus, flagging participants
        let mut params: Vec<(u32, u32, bool)> = Vec::new(); // (m, shift, participating)
        for c in 1..=i_last {
            let shift: u32 = levels
                .iter()
                .zip(r)
                .filter(|(&k, _)| k < c)
                .map(|(_, &ri)| ri)
                .sum();
            for v in 1..=(6 - c) {
                let m: u32 = levels
                    .iter()
                    .zip(r)
                    .filter(|(&k, _)| k >= c && k <= 6 - v)
                    .map(|(_, &ri)| ri)
                    .sum();
                if m == 0 {
                    continue;
                }
                let participating = smax.map(|s| c <= s && v <= c).unwrap_or(false);
                params.push((m, shift, participating));
            }
        }
        let cap2: u32 = case.stars.iter().map(|&s| r_of(s)).sum();
        let two_mins = case.stars.contains(&1);
        // odometer over valuation tuples b_j in 1..=m_j
        let mut b: Vec<u32> = params.iter().map(|_| 1).collect();
        let mut total = LaurentPoly::zero();
        loop {
            let mut weight = LaurentPoly::one();
            for (j, &(m, _, _)) in params.iter().enumerate() {
                weight = &weight * &mu(m, b[j]);
            }
            if !weight.is_zero() {
                let mut correction: Exp = 0;
                if smax.is_some() {
                    let mut min2 = cap2 as i64;
                    let mut first_part = true;
                    for (j, &(_, sh, participating)) in params.iter().enumerate() {
                        if !participating {
                            continue;
                        }
                        if first_part && two_mins {
                            let r1 = r_of(1) as i64;
                            correction += r1.min(b[j] as i64) as Exp;
                        }
                        first_part = false;
                        min2 = min2.min(b[j] as i64 + sh as i64);
                    }
                    correction += min2 as Exp;
                }
                total = &total + &weight.mul_monomial(&BigInt::one(), 0, -correction);
            }
            let mut pos = params.len();
            loop {
                if pos == 0 {
                    let poly = total.mul_monomial(&BigInt::one(), base_p, base_t);
                    return TruncSeries::from_poly(poly, order);
                }
                pos -= 1;
                b[pos] += 1;
                if b[pos] <= params[pos].0 {
                    break;
                }
                b[pos] = 1;
            }
        }
    }

    #[test]
    fn plain_singleton_matches_closed_form() {
        // A_{1} = p^{-5} X_1 / (1 - X_1)
        let a = truncated_a(&CaseDescriptor::parse("1").unwrap(), 0, 30);
        let x1 = x_var(1);
        let rhs = RatFun::new(
            LaurentPoly::monomial(1, x1.p_exp - 5, x1.t_exp),
            FactorSet::from_factors([x1.one_minus()]),
        );
        assert!(a.agrees_with(&rhs.series_trunc(30).unwrap()));
    }

    #[test]
    fn plain_matches_brute_force() {
        for desc in ["1", "2", "1,2", "3", "1,3"] {
            let case = CaseDescriptor::parse(desc).unwrap();
            let fast = truncated_a(&case, 0, 16);
            let brute = a_series_brute(&case, 16);
            assert!(fast.agrees_with(&brute), "mismatch for plain case {desc}");
        }
    }

    #[test]
    fn starred_matches_brute_force() {
        for desc in ["1*", "2*", "3*", "1*,2*", "1*,2", "2*,3", "1*,2*,3*", "1*,3*", "2*,3*"] {
            let case = CaseDescriptor::parse(desc).unwrap();
            let fast = truncated_a(&case, 0, 14);
            let brute = a_series_brute(&case, 14);
            assert!(fast.agrees_with(&brute), "mismatch for starred case {desc}");
        }
    }

    #[test]
    fn exceptional_identity_low_order() {
        // A_{i*} - A_{i} = series(E_i)
        for i in 1..=3u32 {
            let star = truncated_a(&CaseDescriptor::new(vec![i], vec![]).unwrap(), 0, 25);
            let plain = truncated_a(&CaseDescriptor::new(vec![], vec![i]).unwrap(), 0, 25);
            let lhs = star.sub(&plain);
            let rhs = exceptional(i).series_trunc(25).unwrap();
            assert!(lhs.agrees_with(&rhs), "exceptional identity fails at i={i}");
        }
    }

    #[test]
    fn lower_igusa_extraction_example() {
        // (A_{1*,2*} - A_{1*,2}) = p^{-1} Y_1/(1-Y_1) (A_{2*} - A_2)
        let order = 30;
        let lhs = truncated_a(&CaseDescriptor::parse("1*,2*").unwrap(), 0, order).sub(
            &truncated_a(&CaseDescriptor::parse("1*,2").unwrap(), 0, order),
        );
        let y1 = y_var(1);
        let factor = RatFun::new(
            LaurentPoly::monomial(1, y1.p_exp - 1, y1.t_exp),
            FactorSet::from_factors([y1.one_minus()]),
        );
        let diff = truncated_a(&CaseDescriptor::parse("2*").unwrap(), 0, order)
            .sub(&truncated_a(&CaseDescriptor::parse("2").unwrap(), 0, order));
        let rhs = diff.mul(&factor.series_trunc(order).unwrap());
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn coeff_examples() {
        assert_eq!(coeff_c(&CaseDescriptor::parse("").unwrap()), LaurentPoly::one());
        // c_{1} = binom(6,1)_p - n_1(p)
        let c1 = coeff_c(&CaseDescriptor::parse("1").unwrap());
        let expected = &crate::combinat::gauss_binom(6, 1) - &fano_count(1);
        assert_eq!(c1, expected);
        // c_{1*} = n_1(p)
        assert_eq!(coeff_c(&CaseDescriptor::parse("1*").unwrap()), fano_count(1));
    }

    #[test]
    fn family_has_eighty_cases() {
        let fam = decomposition_cases();
        assert_eq!(fam.len(), 80);
        // no duplicates
        let mut keys: Vec<String> = fam.iter().map(|c| c.to_string()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 80);
    }

    #[test]
    fn rejects_malformed_descriptors() {
        assert!(CaseDescriptor::parse("4*").is_err());
        assert!(CaseDescriptor::parse("2*,1").is_err());
        assert!(CaseDescriptor::parse("1,1").is_err());
    }
}
