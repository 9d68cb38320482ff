//! Cross-module consistency: the assembled zeta functions against the
//! enumeration oracles, and the stratum decomposition against the
//! closed-form factors.

use num_bigint::BigInt;

use nilzeta_core::oracle::{self, OracleConfig};
use nilzeta_core::zetacore::{
    self, coeff_c, decomposition_cases, truncated_a, zeta_local, Group,
};

fn series_at(group: Group, q: u64, upto: u32) -> Vec<BigInt> {
    zeta_local(group).eval_p(q).series(upto).unwrap()
}

#[test]
fn oracle_matches_series_small() {
    let cfg = OracleConfig::without_cache();
    let checks: Vec<(Group, u64, u32)> = vec![
        (Group::F22, 2, 8),
        (Group::F22, 3, 6),
        (Group::F22, 5, 5),
        (Group::F23, 2, 4),
        (Group::F23, 3, 3),
        (Group::F24, 2, 3),
        (Group::F24, 3, 2),
    ];
    for (group, q, upto) in checks {
        let spec = oracle::lie_ring(group);
        let series = series_at(group, q, upto);
        for n in 0..=upto {
            let counted = oracle::count_normal_sublattices(&spec, q, n, &cfg).unwrap();
            assert_eq!(
                counted, series[n as usize],
                "{group:?} q={q} n={n}: oracle {counted} vs series {}",
                series[n as usize]
            );
        }
    }
}

#[test]
fn cross_oracle_consistency() {
    // direct full-rank ideal counting equals the central reduction
    let cfg = OracleConfig::without_cache();
    for (group, q) in [
        (Group::F22, 2u64),
        (Group::F22, 3),
        (Group::F23, 2),
        (Group::F23, 3),
        (Group::F24, 2),
    ] {
        let spec = oracle::lie_ring(group);
        for n in 0..=2u32 {
            let direct = oracle::direct_ideal_count(&spec, q, n, &cfg).unwrap();
            let central = oracle::count_normal_sublattices(&spec, q, n, &cfg).unwrap();
            assert_eq!(direct, central, "{group:?} q={q} n={n}");
        }
    }
}

#[test]
fn decomposition_matches_assembled_zeta() {
    // sum_I c_{I,p} A_I agrees with W_0 + n_1 W_1 + n_2 W_2 + n_3 W_3
    // as truncated series at symbolic p.
    let order = 15;
    let mut lhs = nilzeta_core::TruncSeries::zero(order);
    for case in decomposition_cases() {
        let coeff = coeff_c(&case);
        let contribution = truncated_a(&case, 0, order).mul_poly(&coeff);
        lhs = lhs.add(&contribution);
    }
    let mut strata = zetacore::w_factor(0);
    for i in 1..=3 {
        strata = strata.add(&zetacore::w_factor(i).mul_poly(&zetacore::fano_count(i)));
    }
    let rhs = strata.series_trunc(order).unwrap();
    assert!(
        lhs.agrees_with(&rhs),
        "stratum decomposition disagrees with the assembled corrected sum"
    );
}

#[test]
fn nonnegative_integer_coefficients() {
    // a_{p^n} evaluated at q in {2,3} is a nonnegative integer for F24.
    for q in [2u64, 3] {
        let series = series_at(Group::F24, q, 12);
        for (n, c) in series.iter().enumerate() {
            assert!(c >= &BigInt::from(0), "negative coefficient at n={n}, q={q}");
        }
    }
}

#[test]
fn series_of_eval_commutes_with_eval_of_series() {
    for group in [Group::F22, Group::F23, Group::F24] {
        let symbolic = zetacore::series_coeffs(group, 8).coeffs;
        for q in [2u64, 3] {
            let direct = series_at(group, q, 8);
            let qb = BigInt::from(q);
            for n in 0..=8usize {
                assert_eq!(symbolic[n].eval_p_scalar(&qb), direct[n]);
            }
        }
    }
}
