//! Plain-text and JSON renderings of [`LaurentPoly`] and [`RatFun`].
//!
//! Both renderings round-trip: `parse_laurent(x.to_string()) == x` and the
//! serde JSON form (`{"terms": [[e_p, e_T, "coeff"], ..], "factors": [[a, b], ..]}`)
//! deserialises back to an equal value. Coefficients travel as decimal
//! strings so arbitrary precision survives.

use num_bigint::BigInt;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::laurent::{Exp, LaurentPoly};
use super::ratfun::{FactorSet, GeomFactor, RatFun};
use crate::{Error, Result};

/// Parses the `Display` form of a Laurent polynomial, e.g. `1 - p^24*T^10`.
pub fn parse_laurent(input: &str) -> Result<LaurentPoly> {
    let s = input.trim();
    if s == "0" {
        return Ok(LaurentPoly::zero());
    }
    let mut terms: Vec<(Exp, Exp, BigInt)> = Vec::new();
    let mut rest = s;
    let mut sign = BigInt::one();
    if let Some(r) = rest.strip_prefix('-') {
        sign = -sign;
        rest = r.trim_start();
    }
    loop {
        let (term_str, next) = split_term(rest);
        let (ep, et, coeff) = parse_term(term_str)?;
        terms.push((ep, et, coeff * &sign));
        match next {
            None => break,
            Some((next_sign, r)) => {
                sign = if next_sign { -BigInt::one() } else { BigInt::one() };
                rest = r;
            }
        }
    }
    Ok(LaurentPoly::from_terms(terms))
}

/// Splits off the leading term; returns the remainder with its sign
/// (`true` = minus) when another term follows.
fn split_term(s: &str) -> (&str, Option<(bool, &str)>) {
    for (idx, _) in s.match_indices(|c| c == '+' || c == '-') {
        // Exponent minus signs are glued to '^'; term separators are spaced.
        let before = &s[..idx];
        if before.ends_with(' ') {
            let minus = s.as_bytes()[idx] == b'-';
            return (before.trim_end(), Some((minus, s[idx + 1..].trim_start())));
        }
    }
    (s.trim(), None)
}

fn parse_term(term: &str) -> Result<(Exp, Exp, BigInt)> {
    let mut coeff = BigInt::one();
    let mut ep: Exp = 0;
    let mut et: Exp = 0;
    for factor in term.split('*') {
        let f = factor.trim();
        if f.is_empty() {
            return Err(Error::Parse(format!("empty factor in term '{term}'")));
        }
        if let Some(rest) = f.strip_prefix("p^") {
            ep += rest
                .parse::<Exp>()
                .map_err(|e| Error::Parse(format!("bad exponent '{rest}': {e}")))?;
        } else if f == "p" {
            ep += 1;
        } else if let Some(rest) = f.strip_prefix("T^") {
            et += rest
                .parse::<Exp>()
                .map_err(|e| Error::Parse(format!("bad exponent '{rest}': {e}")))?;
        } else if f == "T" {
            et += 1;
        } else {
            let c: BigInt = f
                .parse()
                .map_err(|e| Error::Parse(format!("bad coefficient '{f}': {e}")))?;
            coeff *= c;
        }
    }
    Ok((ep, et, coeff))
}

/// Parses the `Display` form of a rational function,
/// e.g. `(1 + p*T) / ((1 - T)*(1 - p^2*T^3))` or a bare polynomial.
pub fn parse_ratfun(input: &str) -> Result<RatFun> {
    let s = input.trim();
    let Some(split_at) = s.find(") / (") else {
        return Ok(RatFun::from_poly(parse_laurent(s)?));
    };
    let num_part = &s[..split_at + 1];
    let den_part = &s[split_at + 4..];
    let num_inner = num_part
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse("numerator not parenthesised".into()))?;
    let den_inner = den_part
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse("denominator not parenthesised".into()))?;
    let num = parse_laurent(num_inner)?;
    let mut den = FactorSet::empty();
    for piece in den_inner.split(")*(") {
        let poly = parse_laurent(piece.trim_matches(|c| c == '(' || c == ')'))?;
        den.insert(factor_from_poly(&poly)?, 1);
    }
    Ok(RatFun::new(num, den))
}

fn factor_from_poly(poly: &LaurentPoly) -> Result<GeomFactor> {
    let terms: Vec<_> = poly.terms().collect();
    if terms.len() == 2 && terms[0] == (0, 0, &BigInt::one()) {
        let (a, b, c) = terms[1];
        if *c == -BigInt::one() && a >= 0 && b >= 1 {
            return Ok(GeomFactor::new(a as u32, b as u32));
        }
    }
    Err(Error::Parse(format!(
        "denominator factor '{poly}' is not of the form 1 - p^a*T^b"
    )))
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let triples: Vec<(Exp, Exp, String)> = self
            .terms()
            .map(|(ep, et, c)| (ep, et, c.to_string()))
            .collect();
        triples.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let triples: Vec<(Exp, Exp, String)> = Vec::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(triples.len());
        for (ep, et, c) in triples {
            let coeff: BigInt = c
                .parse()
                .map_err(|e| D::Error::custom(format!("bad coefficient '{c}': {e}")))?;
            terms.push((ep, et, coeff));
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

#[derive(Serialize, Deserialize)]
struct RatFunJson {
    terms: LaurentPoly,
    factors: Vec<(u32, u32)>,
}

impl Serialize for RatFun {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut factors = Vec::new();
        for (f, m) in self.den().iter() {
            for _ in 0..m {
                factors.push((f.p_exp, f.t_exp));
            }
        }
        RatFunJson {
            terms: self.num().clone(),
            factors,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatFun {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RatFunJson::deserialize(deserializer)?;
        let mut den = FactorSet::empty();
        for (a, b) in raw.factors {
            if b == 0 {
                return Err(D::Error::custom("factor with T-exponent 0"));
            }
            den.insert(GeomFactor::new(a, b), 1);
        }
        Ok(RatFun::new(raw.terms, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let poly = LaurentPoly::from_terms([(0, 0, 1), (24, 10, -1), (-2, 3, 7)]);
        assert_eq!(parse_laurent(&poly.to_string()).unwrap(), poly);
        assert_eq!(parse_laurent("1 - p^24*T^10").unwrap().to_string(), "1 - p^24*T^10");
    }

    #[test]
    fn ratfun_text_round_trip() {
        let rf = RatFun::new(
            LaurentPoly::from_terms([(0, 0, 1), (1, 1, 2)]),
            FactorSet::from_factors([GeomFactor::new(0, 1), GeomFactor::new(2, 3)]),
        );
        let back = parse_ratfun(&rf.to_string()).unwrap();
        assert!(back.equal(&rf));
        assert_eq!(back.to_string(), rf.to_string());
    }

    #[test]
    fn json_round_trip() {
        let rf = RatFun::new(
            LaurentPoly::from_terms([(0, 0, 1), (9, 5, -1)]),
            FactorSet::from_factors([GeomFactor::new(8, 3)]),
        );
        let js = serde_json::to_string(&rf).unwrap();
        let back: RatFun = serde_json::from_str(&js).unwrap();
        assert!(back.equal(&rf));
    }
}
