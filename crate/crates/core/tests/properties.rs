//! Property-based checks of the exact-arithmetic layer and the
//! integer-linear-algebra kernels.

use num_bigint::BigInt;
use proptest::prelude::*;

use nilzeta_core::exactalg::{
    parse_laurent, parse_ratfun, FactorSet, GeomFactor, LaurentPoly, RatFun,
};
use nilzeta_core::intlinalg::{hnf, kernel_index, IntMatrix, SublatticeHnf};

fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-4i32..5), (-3i32..4), (-9i64..10)), 0..6)
        .prop_map(LaurentPoly::from_terms)
}

/// Nonnegative exponents only (safe for evaluation and series convolution).
fn arb_poly_nonneg() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((0i32..5), (0i32..4), (-9i64..10)), 0..6)
        .prop_map(LaurentPoly::from_terms)
}

fn arb_factors() -> impl Strategy<Value = FactorSet> {
    prop::collection::vec(((0u32..4), (1u32..4)), 0..3)
        .prop_map(|v| FactorSet::from_factors(v.into_iter().map(|(a, b)| GeomFactor::new(a, b))))
}

fn arb_ratfun() -> impl Strategy<Value = RatFun> {
    (arb_poly(), arb_factors()).prop_map(|(num, den)| RatFun::new(num, den))
}

fn arb_ratfun_nonneg() -> impl Strategy<Value = RatFun> {
    (arb_poly_nonneg(), arb_factors()).prop_map(|(num, den)| RatFun::new(num, den))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(x in arb_ratfun(), y in arb_ratfun(), z in arb_ratfun()) {
        prop_assert!(x.add(&y).equal(&y.add(&x)));
        prop_assert!(x.mul(&y).equal(&y.mul(&x)));
        prop_assert!(x.add(&y).add(&z).equal(&x.add(&y.add(&z))));
        prop_assert!(x.mul(&y).mul(&z).equal(&x.mul(&y.mul(&z))));
        prop_assert!(x.mul(&y.add(&z)).equal(&x.mul(&y).add(&x.mul(&z))));
        prop_assert!(x.add(&x.neg()).equal(&RatFun::zero()));
    }

    #[test]
    fn invert_is_involution(x in arb_ratfun()) {
        prop_assert!(x.invert().invert().equal(&x));
    }

    #[test]
    fn series_multiplicativity(x in arb_ratfun_nonneg(), y in arb_ratfun_nonneg()) {
        let n = 6u32;
        let sx = x.series(n).unwrap();
        let sy = y.series(n).unwrap();
        let sxy = x.mul(&y).series(n).unwrap();
        for k in 0..=n as usize {
            let mut conv = LaurentPoly::zero();
            for j in 0..=k {
                conv = &conv + &(&sx[j] * &sy[k - j]);
            }
            prop_assert_eq!(&conv, &sxy[k], "convolution differs at T^{}", k);
        }
    }

    #[test]
    fn series_commutes_with_eval(x in arb_ratfun_nonneg(), q in 2u64..6) {
        let n = 6u32;
        let symbolic = x.series(n).unwrap();
        let numeric = x.eval_p(q).series(n).unwrap();
        let qb = BigInt::from(q);
        for k in 0..=n as usize {
            prop_assert_eq!(symbolic[k].eval_p_scalar(&qb), numeric[k].clone());
        }
    }

    #[test]
    fn text_rendering_round_trips(x in arb_poly()) {
        let text = x.to_string();
        prop_assert_eq!(parse_laurent(&text).unwrap(), x);
    }

    #[test]
    fn ratfun_renderings_round_trip(x in arb_ratfun()) {
        let text = x.to_string();
        let parsed = parse_ratfun(&text).unwrap();
        prop_assert!(parsed.equal(&x));
        let json = serde_json::to_string(&x).unwrap();
        let from_json: RatFun = serde_json::from_str(&json).unwrap();
        prop_assert!(from_json.equal(&x));
    }

    #[test]
    fn hnf_preserves_lattice(entries in prop::collection::vec(-6i64..7, 9)) {
        let m = IntMatrix::from_rows(entries.chunks(3).map(|r| r.to_vec()).collect::<Vec<_>>());
        if let Ok(h) = hnf(&m) {
            // every original column lies in the HNF lattice
            for j in 0..3 {
                let col: Vec<BigInt> = (0..3).map(|i| m[(i, j)].clone()).collect();
                prop_assert!(h.contains(&col));
            }
            // determinant magnitude is preserved
            let det = det3(&m);
            prop_assert_eq!(h.index().clone(), BigInt::from(det.abs()));
        }
    }
}

fn det3(m: &IntMatrix) -> i64 {
    let g = |i: usize, j: usize| -> i64 { i64::try_from(&m[(i, j)]).unwrap() };
    g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
        - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
}

/// Randomised kernel-index cross-check against direct enumeration of the
/// finite quotient.
#[test]
fn kernel_index_matches_enumeration() {
    let mut seed = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed
    };
    for q in [2u64, 3] {
        for e in 1u32..=2 {
            for _round in 0..6 {
                let dim = 3usize;
                let d_src = 2usize;
                let blocks = 2usize;
                // random stacked matrix with small entries
                let a = IntMatrix::from_rows(
                    (0..dim * blocks)
                        .map(|_| (0..d_src).map(|_| (next() % 5) as i64 - 2).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                );
                let l = SublatticeHnf::scaled(dim, q.pow(e) as i64);
                let exponent = kernel_index(&a, &l, q).unwrap();
                // direct: count image of (Z/q^e)^{d_src} under A mod q^e
                let modulus = q.pow(e) as i64;
                let mut images = std::collections::HashSet::new();
                for g0 in 0..modulus {
                    for g1 in 0..modulus {
                        let mut img = Vec::with_capacity(dim * blocks);
                        for r in 0..dim * blocks {
                            let v = i64::try_from(&a[(r, 0)]).unwrap() * g0
                                + i64::try_from(&a[(r, 1)]).unwrap() * g1;
                            img.push(v.rem_euclid(modulus));
                        }
                        images.insert(img);
                    }
                }
                let expected = (images.len() as f64).log(q as f64).round() as u32;
                assert_eq!(
                    q.pow(exponent) as usize,
                    images.len(),
                    "kernel index exponent {exponent} vs enumerated image {} (expected exp {expected})",
                    images.len()
                );
            }
        }
    }
}
