//! Exact verification of the summation lemmas behind the closed-form
//! factors: the shifting, binomial, translation and geometric-progression
//! ("crucial") identities, and the upper/lower Igusa extraction lemmas.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinat::{flag_dim, mu, FlagType};
use crate::exactalg::{Exp, FactorSet, LaurentPoly, RatFun, TruncSeries};

use super::cases::{truncated_a, CaseDescriptor};
use super::{x_var, y_var};

/// One verified identity (or a counterexample report).
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub cases_checked: usize,
    pub failures: Vec<String>,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(LemmaCheck::passed)
    }
}

/// `sum_{b_1..b_c = 1..r} prod_j mu(r, b_j) T^{-t min(r, b_1, .., b_c)}`
/// computed exhaustively.
fn capped_mu_sum(r: u32, c: u32, t: u32, from: u32) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    let mut b = vec![from; c as usize];
    if from > r {
        return out;
    }
    loop {
        let mut weight = LaurentPoly::one();
        for &bj in &b {
            weight = &weight * &mu(r, bj);
        }
        let m = b.iter().copied().min().unwrap_or(r).min(r);
        out = &out + &weight.mul_monomial(&BigInt::one(), 0, -((t * m) as Exp));
        let mut pos = 0;
        loop {
            if pos == b.len() {
                return out;
            }
            b[pos] += 1;
            if b[pos] <= r {
                break;
            }
            b[pos] = from;
            pos += 1;
        }
    }
}

fn check_shifting(r_max: u32) -> LemmaCheck {
    let mut failures = Vec::new();
    let mut cases = 0;
    for r in 1..=r_max {
        for c in [1u32, 3, 6] {
            for t in [1u32, 2] {
                cases += 1;
                let lhs = capped_mu_sum(r + 1, c, t, 1);
                // T^{-t} ( sum at r ) + T^{-t} p^{c r} (1 - p^{-c})
                let mut rhs = capped_mu_sum(r, c, t, 1)
                    .mul_monomial(&BigInt::one(), 0, -(t as Exp));
                rhs = &rhs
                    + &LaurentPoly::from_terms([
                        ((c * r) as Exp, -(t as Exp), 1),
                        ((c * r) as Exp - c as Exp, -(t as Exp), -1),
                    ]);
                if lhs != rhs {
                    failures.push(format!("shifting fails at r={r} c={c} t={t}"));
                }
            }
        }
    }
    LemmaCheck {
        name: "shifting".into(),
        cases_checked: cases,
        failures,
    }
}

fn check_binomial(n_max: u32, k_max: u32) -> LemmaCheck {
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 1..=n_max {
        for k in 1..=k_max {
            cases += 1;
            let lhs = LaurentPoly::from_terms([
                ((n * k) as Exp, 0, 1),
                ((n * k) as Exp - n as Exp, 0, -1),
            ]);
            // sum_{m=1}^{n} C(n,m) (p^k (1-p^{-1}))^m (p^{k-1})^{n-m}
            let jump = LaurentPoly::from_terms([(k as Exp, 0, 1), (k as Exp - 1, 0, -1)]);
            let stay = LaurentPoly::monomial(1, k as Exp - 1, 0);
            let mut rhs = LaurentPoly::zero();
            for m in 1..=n {
                let mut term = LaurentPoly::monomial(binom(n, m), 0, 0);
                for _ in 0..m {
                    term = &term * &jump;
                }
                for _ in 0..n - m {
                    term = &term * &stay;
                }
                rhs = &rhs + &term;
            }
            if lhs != rhs {
                failures.push(format!("binomial fails at n={n} k={k}"));
            }
        }
    }
    LemmaCheck {
        name: "binomial".into(),
        cases_checked: cases,
        failures,
    }
}

fn binom(n: u32, k: u32) -> i64 {
    let mut out = 1i64;
    for i in 0..k {
        out = out * (n - i) as i64 / (i + 1) as i64;
    }
    out
}

fn check_translation(r_max: u32) -> LemmaCheck {
    let mut failures = Vec::new();
    let mut cases = 0;
    for r in 1..=r_max {
        for c in [1u32, 3, 6] {
            for t in [1u32, 2] {
                cases += 1;
                // sum over b_j in 2..=r+1 of mu(r+1; b) T^{-t min(r+1, b)}
                let lhs = capped_mu_sum(r + 1, c, t, 2);
                let rhs = capped_mu_sum(r, c, t, 1)
                    .mul_monomial(&BigInt::one(), 0, -(t as Exp));
                if lhs != rhs {
                    failures.push(format!("translation fails at r={r} c={c} t={t}"));
                }
            }
        }
    }
    LemmaCheck {
        name: "translation".into(),
        cases_checked: cases,
        failures,
    }
}

/// The geometric-progression lemma: for each Fano level,
/// `sum_r p^{(id+dim) r} T^{(d+i) r} (mu-sum with min over c_i parameters)`
/// truncates to the stated two-factor rational function.
fn check_crucial(order: Exp) -> LemmaCheck {
    let d = 4u32;
    let mut failures = Vec::new();
    let mut cases = 0;
    for i in 1..=3u32 {
        cases += 1;
        let fd = super::fano_data(i);
        let (di, ci, t) = (fd.dim, fd.codim, fd.t);
        let a = (i * d + di) as Exp; // p-exponent per r
        let b = (d + i) as Exp; // T-exponent per r
        let mut lhs = TruncSeries::zero(order);
        let mut r = 1u32;
        while b * r as Exp - (t * r) as Exp <= order {
            let inner = capped_mu_sum(r, ci, t, 1);
            let term = inner.mul_monomial(&BigInt::one(), a * r as Exp, b * r as Exp);
            lhs = lhs.add(&TruncSeries::from_poly(term, order));
            r += 1;
        }
        // p^a T^{b-t} (1 - p^a T^b) / ((1 - p^a T^{b-t})(1 - p^{a+c} T^b))
        let rhs = RatFun::new(
            LaurentPoly::from_terms([(a, b - t as Exp, 1), (2 * a, 2 * b - t as Exp, -1)]),
            FactorSet::from_factors([
                crate::exactalg::GeomFactor::new(a as u32, (b - t as Exp) as u32),
                crate::exactalg::GeomFactor::new(a as u32 + ci, b as u32),
            ]),
        );
        let rhs = rhs.series_trunc(order).expect("expandable");
        if !lhs.agrees_with(&rhs) {
            failures.push(format!("crucial lemma fails at level {i}"));
        }
    }
    LemmaCheck {
        name: "crucial".into(),
        cases_checked: cases,
        failures,
    }
}

/// Upper extraction: `A_{J1 u i* u J2} - A_{J1 u i u J2} =
/// p^{-dim F_{J2 - i}} prod_{j in J2} series(X_j/(1-X_j)) (A_{J1 u i*} - A_{J1 u i})`
/// with the shifted flag in ambient `P^{5-i}`.
fn check_upper_extraction(order: Exp) -> LemmaCheck {
    let reps: Vec<(u32, Vec<u32>, Vec<u32>)> = vec![
        (1, vec![], vec![3]),
        (1, vec![], vec![2, 4]),
        (2, vec![], vec![4]),
        (2, vec![1], vec![4]),
        (3, vec![1, 2], vec![5]),
        (3, vec![], vec![4, 5]),
    ];
    let mut failures = Vec::new();
    let cases = reps.len();
    for (i, j1, j2) in reps {
        let with = |top_plain: bool, trailing: &[u32]| -> CaseDescriptor {
            let mut stars = j1.clone();
            let mut plains = Vec::new();
            if top_plain {
                plains.push(i);
            } else {
                stars.push(i);
            }
            plains.extend_from_slice(trailing);
            CaseDescriptor::new(stars, plains).unwrap()
        };
        let lhs = truncated_a(&with(false, &j2), 0, order)
            .sub(&truncated_a(&with(true, &j2), 0, order));
        let shifted: Vec<u32> = j2.iter().map(|&j| j - i).collect();
        let dim = flag_dim(&FlagType::new(5 - i, shifted));
        let mut rhs = truncated_a(&with(false, &[]), 0, order)
            .sub(&truncated_a(&with(true, &[]), 0, order))
            .mul_poly(&LaurentPoly::monomial(1, -(dim as Exp), 0));
        for &j in &j2 {
            let x = x_var(j);
            let factor = RatFun::new(
                x.as_poly(),
                FactorSet::from_factors([x.one_minus()]),
            );
            rhs = rhs.mul(&factor.series_trunc(order).expect("expandable"));
        }
        if !lhs.agrees_with(&rhs) {
            failures.push(format!("upper extraction fails at i={i} J1={j1:?} J2={j2:?}"));
        }
    }
    LemmaCheck {
        name: "upper-extraction".into(),
        cases_checked: cases,
        failures,
    }
}

/// Lower extraction: the four summation lemmas feeding the lower Igusa
/// factors, e.g. `A_{1*,2*} - A_{1*,2} = p^{-dim F_1} Y_1/(1-Y_1) (A_{2*} - A_2)`.
fn check_lower_extraction(order: Exp) -> LemmaCheck {
    // (stars with top, lower-star set, flag-type of J1 inside P^{top-1})
    let reps: Vec<(Vec<u32>, u32)> = vec![
        (vec![1, 2], 2),
        (vec![1, 3], 3),
        (vec![2, 3], 3),
        (vec![1, 2, 3], 3),
    ];
    let mut failures = Vec::new();
    let cases = reps.len();
    for (stars, top) in reps {
        let lower: Vec<u32> = stars.iter().copied().filter(|&s| s != top).collect();
        let star_case = CaseDescriptor::new(stars.clone(), vec![]).unwrap();
        let mixed_case = CaseDescriptor::new(lower.clone(), vec![top]).unwrap();
        let lhs = truncated_a(&star_case, 0, order).sub(&truncated_a(&mixed_case, 0, order));
        let dim = flag_dim(&FlagType::new(top - 1, lower.clone()));
        let mut rhs = truncated_a(&CaseDescriptor::new(vec![top], vec![]).unwrap(), 0, order)
            .sub(&truncated_a(&CaseDescriptor::new(vec![], vec![top]).unwrap(), 0, order))
            .mul_poly(&LaurentPoly::monomial(1, -(dim as Exp), 0));
        for &j in &lower {
            let y = y_var(j);
            let factor = RatFun::new(y.as_poly(), FactorSet::from_factors([y.one_minus()]));
            rhs = rhs.mul(&factor.series_trunc(order).expect("expandable"));
        }
        if !lhs.agrees_with(&rhs) {
            failures.push(format!("lower extraction fails for stars {stars:?}"));
        }
    }
    LemmaCheck {
        name: "lower-extraction".into(),
        cases_checked: cases,
        failures,
    }
}

/// Runs every lemma family; the checks are independent and run in parallel
/// with a deterministic report order.
pub fn lemma_suite() -> LemmaReport {
    let jobs: Vec<Box<dyn Fn() -> LemmaCheck + Send + Sync>> = vec![
        Box::new(|| check_shifting(5)),
        Box::new(|| check_binomial(6, 5)),
        Box::new(|| check_translation(5)),
        Box::new(|| check_crucial(40)),
        Box::new(|| check_upper_extraction(40)),
        Box::new(|| check_lower_extraction(40)),
    ];
    let checks: Vec<LemmaCheck> = jobs.par_iter().map(|j| j()).collect();
    LemmaReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifting_hand_case() {
        // r=1, c=1, t=2: LHS over b in 1..2 with mu(2, b):
        //   mu(2,1) T^{-2} + mu(2,2) T^{-2*2-ish}
        let lhs = capped_mu_sum(2, 1, 2, 1);
        // = (p - 1) T^{-2} + 1 * T^{-4}  (min(2, 2) = 2)
        let expected = LaurentPoly::from_terms([(1, -2, 1), (0, -2, -1), (0, -4, 1)]);
        assert_eq!(lhs, expected);
        let check = check_shifting(1);
        assert!(check.passed(), "{:?}", check.failures);
    }

    #[test]
    fn binomial_hand_case() {
        // n=2, k=1: p^2 (1 - p^{-2}) = p^2 - 1
        let check = check_binomial(2, 1);
        assert!(check.passed(), "{:?}", check.failures);
    }

    #[test]
    fn full_suite_passes() {
        let report = lemma_suite();
        for check in &report.checks {
            assert!(
                check.passed(),
                "lemma family '{}' failed: {:?}",
                check.name,
                check.failures
            );
        }
    }
}
