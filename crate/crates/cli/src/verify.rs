//! `nilzeta verify-all`: the CI entry point. Runs every verification the
//! library supports and emits one verdict document. Hard checks decide the
//! exit code; the q = 2 oracle comparisons for F24 are soft (reported but
//! non-fatal, matching the almost-all-primes remit of the closed forms).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use nilzeta_core::exactalg::{parse_ratfun, LaurentPoly};
use nilzeta_core::geometry;
use nilzeta_core::oracle::{self, OracleConfig, WeightCase};
use nilzeta_core::zetacore::{
    abscissa_estimate, check_functional_equation, exceptional, fano_count, fano_data,
    lemma_suite, truncated_a, w_factor, x_var, zeta_local, CaseDescriptor, Group,
};

#[derive(Args)]
pub struct VerifyArgs {
    /// Reduced smoke profile: small primes and truncations only.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct Check {
    name: String,
    hard: bool,
    passed: bool,
    details: String,
}

struct Verdict {
    checks: Vec<Check>,
}

impl Verdict {
    fn record(&mut self, name: &str, hard: bool, outcome: Result<String, String>) {
        let (passed, details) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check {
            name: name.to_string(),
            hard,
            passed,
            details,
        });
    }

    fn hard_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.hard)
    }
}

fn ensure(cond: bool, ok: &str, fail: &str) -> Result<String, String> {
    if cond {
        Ok(ok.to_string())
    } else {
        Err(fail.to_string())
    }
}

pub fn run(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = OracleConfig::default();
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if let Some(dir) = args.cache_dir {
        cfg.cache_dir = if dir.as_os_str().is_empty() {
            None
        } else {
            Some(dir)
        };
    }
    let fast = args.fast;
    let mut verdict = Verdict { checks: Vec::new() };

    // 1. F23 closed form
    let explicit = parse_ratfun(
        "(1 + p^3*T^3 + p^4*T^3 + p^6*T^5 + p^7*T^5 + p^10*T^8) / \
         ((1 - T)*(1 - p*T)*(1 - p^2*T)*(1 - p^5*T^3)*(1 - p^8*T^5)*(1 - p^9*T^6))",
    )
    .expect("parse closed form");
    verdict.record(
        "f23-closed-form",
        true,
        ensure(
            zeta_local(Group::F23).equal(&explicit),
            "assembled zeta equals the explicit fraction",
            "assembled F23 zeta differs from the closed form",
        ),
    );

    // 2. functional equations
    let fe_ok = check_functional_equation(Group::F24)
        .map(|fe| (fe.sign, fe.p_exp, fe.t_exp) == (1, 45, 14))
        .unwrap_or(false)
        && check_functional_equation(Group::F22)
            .map(|fe| (fe.sign, fe.p_exp, fe.t_exp) == (-1, 3, 5))
            .unwrap_or(false)
        && check_functional_equation(Group::F23)
            .map(|fe| (fe.sign, fe.p_exp, fe.t_exp) == (1, 15, 9))
            .unwrap_or(false);
    verdict.record(
        "functional-equations",
        true,
        ensure(
            fe_ok,
            "F24: +p^45 T^14; F23: +p^15 T^9; F22: -p^3 T^5",
            "a functional equation has the wrong monomial",
        ),
    );

    // 3. oracle match
    let hard_runs: Vec<(Group, u64, u32)> = if fast {
        vec![(Group::F22, 2, 5), (Group::F23, 2, 3), (Group::F24, 2, 2)]
    } else {
        vec![
            (Group::F22, 2, 8),
            (Group::F22, 3, 8),
            (Group::F22, 5, 8),
            (Group::F23, 2, 5),
            (Group::F23, 3, 5),
            (Group::F24, 3, 3),
        ]
    };
    let mut oracle_failures = Vec::new();
    for (group, q, upto) in &hard_runs {
        let spec = oracle::lie_ring(*group);
        let series = zeta_local(*group).eval_p(*q).series(*upto).unwrap();
        for n in 0..=*upto {
            match oracle::count_normal_sublattices(&spec, *q, n, &cfg) {
                Ok(c) if c == series[n as usize] => {}
                Ok(c) => oracle_failures.push(format!(
                    "{} q={q} n={n}: {c} vs {}",
                    group.name(),
                    series[n as usize]
                )),
                Err(e) => oracle_failures.push(format!("{} q={q} n={n}: {e}", group.name())),
            }
        }
    }
    verdict.record(
        "oracle-match",
        true,
        if oracle_failures.is_empty() {
            Ok(format!("{} hard comparisons match", hard_runs.len()))
        } else {
            Err(oracle_failures.join("; "))
        },
    );
    // soft: F24 at q = 2
    let soft_upto = if fast { 2 } else { 4 };
    let spec24 = oracle::lie_ring(Group::F24);
    let series24 = zeta_local(Group::F24).eval_p(2).series(soft_upto).unwrap();
    let mut soft_failures = Vec::new();
    for n in 0..=soft_upto {
        match oracle::count_normal_sublattices(&spec24, 2, n, &cfg) {
            Ok(c) if c == series24[n as usize] => {}
            Ok(c) => soft_failures.push(format!("n={n}: {c} vs {}", series24[n as usize])),
            Err(e) => soft_failures.push(format!("n={n}: {e}")),
        }
    }
    verdict.record(
        "oracle-match-f24-q2",
        false,
        if soft_failures.is_empty() {
            Ok(format!("matches for n <= {soft_upto}"))
        } else {
            Err(format!(
                "exceptional-prime evidence: {}",
                soft_failures.join("; ")
            ))
        },
    );

    // 4. cross-oracle
    let mut cross_failures = Vec::new();
    let cross_n = if fast { 1 } else { 2 };
    for group in [Group::F22, Group::F23, Group::F24] {
        let spec = oracle::lie_ring(group);
        for q in [2u64, 3] {
            for n in 0..=cross_n {
                let direct = oracle::direct_ideal_count(&spec, q, n, &cfg);
                let central = oracle::count_normal_sublattices(&spec, q, n, &cfg);
                match (direct, central) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (Ok(a), Ok(b)) => cross_failures
                        .push(format!("{} q={q} n={n}: {a} vs {b}", group.name())),
                    (a, b) => cross_failures.push(format!(
                        "{} q={q} n={n}: {a:?} vs {b:?}",
                        group.name()
                    )),
                }
            }
        }
    }
    verdict.record(
        "cross-oracle",
        true,
        if cross_failures.is_empty() {
            Ok("direct ideal counts equal the central reduction".into())
        } else {
            Err(cross_failures.join("; "))
        },
    );

    // 5. abscissas
    use num_rational::Ratio;
    let absc_ok = abscissa_estimate(Group::F22, 12) == Ratio::new(2, 1)
        && abscissa_estimate(Group::F23, 12) == Ratio::new(3, 1)
        && abscissa_estimate(Group::F24, 12) == Ratio::new(4, 1);
    verdict.record(
        "abscissas",
        true,
        ensure(absc_ok, "2, 3, 4 at N = 12", "an abscissa estimate is off"),
    );

    // 6. geometry
    let mut geo_failures = Vec::new();
    let geo_primes: &[u64] = if fast { &[2] } else { &[2, 3] };
    for &q in geo_primes {
        for (dim, kind) in [(0usize, "points"), (1, "lines"), (2, "planes")] {
            let n = geometry::enumerate_quadric(q, dim).map(|v| v.len()).unwrap_or(0);
            if n as u64 != geometry::quadric_count_formula(q, dim) {
                geo_failures.push(format!("{kind} at q={q}: {n}"));
            }
        }
        match geometry::enumerate_quadric(q, 2).and_then(|p| geometry::classify_rulings(&p)) {
            Ok((a, b)) => {
                let n3 = fano_count(3).eval_p_scalar(&BigInt::from(q));
                if BigInt::from(a.len()) != n3 || BigInt::from(b.len()) != n3 {
                    geo_failures.push(format!("ruling sizes at q={q}"));
                }
                if q == 2 {
                    if a.iter().any(|pl| geometry::stacked_rank(2, &pl.basis) != 4) {
                        geo_failures.push("ruling A rank".into());
                    }
                    if b.iter().any(|pl| geometry::stacked_rank(2, &pl.basis) != 3) {
                        geo_failures.push("ruling B rank".into());
                    }
                }
            }
            Err(e) => geo_failures.push(format!("rulings at q={q}: {e}")),
        }
    }
    verdict.record(
        "quadric-geometry",
        true,
        if geo_failures.is_empty() {
            Ok("counts, ruling split, and congruence ranks all match".into())
        } else {
            Err(geo_failures.join("; "))
        },
    );

    // 7. exceptional identity
    let order = if fast { 20 } else { 40 };
    let mut exc_ok = true;
    for i in 1..=3u32 {
        let star = truncated_a(&CaseDescriptor::new(vec![i], vec![]).unwrap(), 0, order);
        let plain = truncated_a(&CaseDescriptor::new(vec![], vec![i]).unwrap(), 0, order);
        if !star.sub(&plain).agrees_with(&exceptional(i).series_trunc(order).unwrap()) {
            exc_ok = false;
        }
    }
    verdict.record(
        "exceptional-identity",
        true,
        ensure(
            exc_ok,
            &format!("A_(i*) - A_i equals series(E_i) to order {order}"),
            "an exceptional-factor identity fails",
        ),
    );

    // 8. lemma suite
    if fast {
        verdict.record("lemma-suite", true, Ok("skipped in fast mode".into()));
    } else {
        let report = lemma_suite();
        let summary: Vec<String> = report
            .checks
            .iter()
            .map(|c| format!("{} ({})", c.name, c.cases_checked))
            .collect();
        verdict.record(
            "lemma-suite",
            true,
            if report.passed() {
                Ok(summary.join(", "))
            } else {
                Err(report
                    .checks
                    .iter()
                    .flat_map(|c| c.failures.clone())
                    .collect::<Vec<_>>()
                    .join("; "))
            },
        );
    }

    // 9. weight lemmas
    let weight_runs: Vec<(WeightCase, Vec<u32>)> = if fast {
        vec![
            (WeightCase::Point, vec![1]),
            (WeightCase::Line, vec![1]),
            (WeightCase::PlaneB, vec![1]),
        ]
    } else {
        let mut runs = vec![
            (WeightCase::Point, vec![1]),
            (WeightCase::Point, vec![2]),
            (WeightCase::Line, vec![1]),
            (WeightCase::Line, vec![2]),
            (WeightCase::PlaneA, vec![1]),
            (WeightCase::PlaneA, vec![2]),
            (WeightCase::PlaneB, vec![1]),
            (WeightCase::PlaneB, vec![2]),
            (WeightCase::Generic, vec![1, 1, 1]),
            (WeightCase::Generic, vec![2, 2, 2]),
        ];
        for a in 1..=2 {
            for b in 1..=2 {
                runs.push((WeightCase::PointLine, vec![a, b]));
                for c in 1..=2 {
                    runs.push((WeightCase::MixedR3, vec![a, b, c]));
                }
            }
        }
        runs
    };
    for (hard_q, hard) in [(3u64, true), (2u64, false)] {
        if fast && !hard {
            continue;
        }
        let mut failures = Vec::new();
        let mut tuples = 0u64;
        for (case, r) in &weight_runs {
            match oracle::verify_weight_lemma(*case, hard_q, r, &cfg) {
                Ok(rep) => {
                    tuples += rep.tuples_checked;
                    if !rep.passed() {
                        failures.push(format!(
                            "{} r={r:?}: {} mismatches",
                            rep.case, rep.mismatch_count
                        ));
                    }
                }
                Err(e) => failures.push(format!("{case:?} r={r:?}: {e}")),
            }
        }
        verdict.record(
            &format!("weight-lemmas-q{hard_q}"),
            hard,
            if failures.is_empty() {
                Ok(format!("zero mismatches over {tuples} lift tuples"))
            } else {
                Err(failures.join("; "))
            },
        );
    }

    // 10. multiplicity
    let bound = if fast { 2 } else { 3 };
    verdict.record(
        "multiplicity",
        true,
        match oracle::verify_multiplicity(2, bound, &cfg) {
            Ok(rep) if rep.passed() => Ok(format!(
                "{} buckets up to index exponent {bound} match",
                rep.buckets.len()
            )),
            Ok(rep) => Err(rep.mismatches.join("; ")),
            Err(e) => Err(e.to_string()),
        },
    );

    // 11. inversion identities
    let mut inv_ok = true;
    for k in 1..=5u32 {
        let vars: Vec<_> = (6 - k..=5).map(x_var).collect();
        let ig = nilzeta_core::zetacore::igusa(k, &vars);
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let scaled = ig.mul_poly(&LaurentPoly::monomial(sign, (k * (k + 1) / 2) as i32, 0));
        inv_ok &= ig.invert().equal(&scaled);
    }
    for i in 1..=3u32 {
        let fd = fano_data(i);
        let e = exceptional(i);
        inv_ok &= e.invert().equal(&e.mul_poly(&LaurentPoly::monomial(
            -1,
            (fd.ambient_dim + fd.dim) as i32,
            0,
        )));
        inv_ok &= fd.count_poly.invert_p()
            == fd
                .count_poly
                .mul_monomial(&BigInt::from(1), -(fd.dim as i32), 0);
        let weighted = w_factor(i).mul_poly(&fano_count(i));
        inv_ok &= weighted
            .invert()
            .equal(&weighted.mul_poly(&LaurentPoly::monomial(-1, 15, 0)));
    }
    let w0 = w_factor(0);
    inv_ok &= w0
        .invert()
        .equal(&w0.mul_poly(&LaurentPoly::monomial(-1, 15, 0)));
    verdict.record(
        "inversion-identities",
        true,
        ensure(
            inv_ok,
            "Igusa, exceptional, Fano, and stratum inversions all verified",
            "an inversion identity fails",
        ),
    );

    let passed = verdict.hard_passed();
    if args.json {
        let doc = json!({
            "passed": passed,
            "fast": fast,
            "checks": verdict.checks,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        for c in &verdict.checks {
            let tag = match (c.passed, c.hard) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "SOFT-FAIL",
            };
            println!("{tag:9} {:24} {}", c.name, c.details);
        }
        println!("{}", if passed { "verdict: PASS" } else { "verdict: FAIL" });
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
