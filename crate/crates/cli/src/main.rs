//! `nilzeta`: exact local normal zeta functions of the free class-two
//! nilpotent groups on 2-4 generators, with brute-force lattice oracles.
//!
//! All numeric output is exact: integers and integer-coefficient
//! polynomials rendered as strings. Identical inputs produce identical
//! output (the oracle reports additionally carry a `runtime_ms` field).
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage error,
//! 3 enumeration budget exceeded.

mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use nilzeta_core::combinat;
use nilzeta_core::exactalg::LaurentPoly;
use nilzeta_core::geometry;
use nilzeta_core::oracle::{self, OracleConfig, WeightCase};
use nilzeta_core::zetacore::{
    abscissa_estimate, check_functional_equation, fano_count, lemma_suite, series_coeffs,
    zeta_local, Group,
};

#[derive(Parser)]
#[command(
    name = "nilzeta",
    about = "Exact normal zeta functions of free class-two nilpotent groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zeta-function operations: show, series, check-fe, abscissa, lemmas.
    Zeta(ZetaArgs),
    /// Brute-force oracles: count, direct, weights, multiplicity.
    Oracle(OracleArgs),
    /// The Pfaffian quadric over a small prime field.
    Geometry(GeometryArgs),
    /// q-combinatorics helpers (always JSON output).
    Combinat(CombinatArgs),
    /// Runs the full verification suite and emits a verdict document.
    VerifyAll(verify::VerifyArgs),
}

#[derive(Args)]
struct ZetaArgs {
    #[command(subcommand)]
    op: ZetaOp,
}

#[derive(Subcommand)]
enum ZetaOp {
    /// Prints the local zeta function as an exact rational function.
    Show {
        #[arg(long)]
        group: String,
        #[arg(long)]
        json: bool,
    },
    /// Coefficients a_{p^n} for n <= upto (integers with --prime, else
    /// polynomials in p).
    Series {
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 8)]
        upto: u32,
        #[arg(long)]
        json: bool,
    },
    /// Verifies the p -> 1/p functional equation and prints its monomial.
    CheckFe {
        #[arg(long)]
        group: String,
        #[arg(long)]
        json: bool,
    },
    /// Growth-abscissa estimate max_n (deg_p a_{p^n} + 1)/n.
    Abscissa {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 12)]
        upto: u32,
        #[arg(long)]
        json: bool,
    },
    /// Verifies the summation-lemma families exactly.
    Lemmas {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    op: OracleOp,
    /// Enumeration budget in visited lattices.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Cache directory (env NILZETA_CACHE_DIR also works; empty disables).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleOp {
    /// Counts normal subgroups of index q^n for n <= upto by central-lattice
    /// enumeration and compares with the zeta-function series.
    Count {
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        upto: u32,
        #[arg(long)]
        json: bool,
    },
    /// Direct full-rank ideal count (n <= 2), compared with the series.
    Direct {
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 2)]
        upto: u32,
        #[arg(long)]
        json: bool,
    },
    /// Verifies one weight-function lemma case.
    Weights {
        /// generic | point | line | point-line | plane-A | plane-B | mixed-r3
        #[arg(long)]
        case: String,
        #[arg(long)]
        prime: u64,
        /// Comma-separated multiplicities, one per level of the case.
        #[arg(long)]
        r: String,
        #[arg(long)]
        json: bool,
    },
    /// Compares divisor-type histograms against the closed-form counts.
    Multiplicity {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 3)]
        bound: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(long)]
    prime: u64,
    /// points | lines | planes | rulings
    #[arg(long, conflicts_with = "flags")]
    count: Option<String>,
    /// Flag type to count by brute force, e.g. "1,2" (with --ambient).
    #[arg(long)]
    flags: Option<String>,
    /// Ambient projective dimension for --flags.
    #[arg(long, default_value_t = 2)]
    ambient: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CombinatArgs {
    #[command(subcommand)]
    op: CombinatOp,
}

#[derive(Subcommand)]
enum CombinatOp {
    /// Gaussian binomial binom(n, k)_p.
    GaussBinom {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: i64,
    },
    /// Flag-variety point count b_I(p) in ambient P^m.
    FlagCount {
        #[arg(long)]
        ambient: u32,
        /// Comma-separated flag type, e.g. "1,2"; empty for the trivial flag.
        #[arg(long, default_value = "")]
        r#type: String,
    },
    /// mu(a, b) = |{x in pZ_p/(p^a) : v_p(x) = b}|.
    Mu {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Number of sublattices of Z^d of index p^k.
    SublatticeCount {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
    },
    /// Number of maximal lattices of elementary-divisor type (I, r) in Z^6;
    /// type syntax "1:1,3:2" for r_1 = 1, r_3 = 2.
    LatticeTypeCount {
        #[arg(long)]
        r#type: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            if let Some(nilzeta_core::Error::BudgetExceeded { .. }) =
                err.downcast_ref::<nilzeta_core::Error>()
            {
                eprintln!("error: {err}");
                return ExitCode::from(3);
            }
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Zeta(args) => zeta_cmd(args)?,
        Command::Oracle(args) => oracle_cmd(args)?,
        Command::Geometry(args) => geometry_cmd(args)?,
        Command::Combinat(args) => combinat_cmd(args)?,
        Command::VerifyAll(args) => return verify::run(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn poly_str(p: &LaurentPoly) -> String {
    p.to_string()
}

fn zeta_cmd(args: ZetaArgs) -> anyhow::Result<()> {
    match args.op {
        ZetaOp::Show { group, json } => {
            let g = Group::parse(&group)?;
            let zeta = zeta_local(g);
            if json {
                let report = json!({
                    "group": g.name(),
                    "operation": "show",
                    "inputs": {},
                    "result": zeta,
                    "verified": true,
                    "details": "factored denominator; numerator over the common denominator",
                });
                println!("{}", serde_json::to_string(&report)?);
            } else {
                println!("{zeta}");
            }
        }
        ZetaOp::Series {
            group,
            prime,
            upto,
            json,
        } => {
            let g = Group::parse(&group)?;
            anyhow::ensure!(upto <= 24, "series truncation is limited to N <= 24");
            let rendered: Vec<String> = match prime {
                Some(q) => zeta_local(g)
                    .eval_p(q)
                    .series(upto)?
                    .iter()
                    .map(BigInt::to_string)
                    .collect(),
                None => series_coeffs(g, upto).coeffs.iter().map(poly_str).collect(),
            };
            if json {
                let report = json!({
                    "group": g.name(),
                    "operation": "series",
                    "inputs": {"prime": prime, "upto": upto},
                    "result": rendered,
                    "verified": true,
                    "details": "coefficients of T^0..T^N",
                });
                println!("{}", serde_json::to_string(&report)?);
            } else {
                println!("[{}]", rendered.join(","));
            }
        }
        ZetaOp::CheckFe { group, json } => {
            #[derive(serde::Serialize)]
            struct FeOut {
                sign: i8,
                p_exp: i64,
                t_exp: i64,
                verified: bool,
            }
            let g = Group::parse(&group)?;
            let fe = check_functional_equation(g)?;
            if json {
                let out = FeOut {
                    sign: fe.sign,
                    p_exp: fe.p_exp,
                    t_exp: fe.t_exp,
                    verified: true,
                };
                println!("{}", serde_json::to_string(&out)?);
            } else {
                let sign = if fe.sign >= 0 { "+" } else { "-" };
                println!(
                    "zeta({}) inverts to {sign}p^{} T^{} times itself",
                    g.name(),
                    fe.p_exp,
                    fe.t_exp
                );
            }
        }
        ZetaOp::Abscissa { group, upto, json } => {
            let g = Group::parse(&group)?;
            let a = abscissa_estimate(g, upto);
            if json {
                let report = json!({
                    "group": g.name(),
                    "operation": "abscissa",
                    "inputs": {"upto": upto},
                    "result": {"numerator": *a.numer(), "denominator": *a.denom()},
                    "verified": true,
                    "details": "max over n of (deg_p a_{p^n} + 1)/n",
                });
                println!("{}", serde_json::to_string(&report)?);
            } else if a.is_integer() {
                println!("{}", a.numer());
            } else {
                println!("{}/{}", a.numer(), a.denom());
            }
        }
        ZetaOp::Lemmas { json } => {
            let report = lemma_suite();
            if json {
                let doc = json!({
                    "group": null,
                    "operation": "lemmas",
                    "inputs": {},
                    "result": report.checks,
                    "verified": report.passed(),
                    "details": "shifting, binomial, translation, crucial, and both extraction families",
                });
                println!("{}", serde_json::to_string(&doc)?);
            } else {
                for check in &report.checks {
                    println!(
                        "{}: {} ({} cases)",
                        check.name,
                        if check.passed() { "ok" } else { "FAILED" },
                        check.cases_checked
                    );
                    for f in &check.failures {
                        println!("  counterexample: {f}");
                    }
                }
            }
            anyhow::ensure!(report.passed(), "lemma suite reported counterexamples");
        }
    }
    Ok(())
}

fn oracle_config(budget: Option<u64>, cache_dir: Option<PathBuf>) -> OracleConfig {
    let mut cfg = OracleConfig::default();
    if let Some(b) = budget {
        cfg.budget = b;
    }
    if let Some(dir) = cache_dir {
        cfg.cache_dir = if dir.as_os_str().is_empty() {
            None
        } else {
            Some(dir)
        };
    }
    cfg
}

fn oracle_cmd(args: OracleArgs) -> anyhow::Result<()> {
    let cfg = oracle_config(args.budget, args.cache_dir);
    match args.op {
        OracleOp::Count {
            group,
            prime,
            upto,
            json,
        } => {
            let g = Group::parse(&group)?;
            let spec = oracle::lie_ring(g);
            let start = std::time::Instant::now();
            let mut counts = Vec::new();
            for n in 0..=upto {
                counts.push(oracle::count_normal_sublattices(&spec, prime, n, &cfg)?);
            }
            let runtime_ms = start.elapsed().as_millis() as u64;
            let formula: Vec<BigInt> = zeta_local(g).eval_p(prime).series(upto)?;
            let matches = counts == formula;
            if json {
                let doc = json!({
                    "inputs": {"group": g.name(), "prime": prime, "upto": upto},
                    "counts": counts.iter().map(BigInt::to_string).collect::<Vec<_>>(),
                    "formula_counts": formula.iter().map(BigInt::to_string).collect::<Vec<_>>(),
                    "match": matches,
                    "runtime_ms": runtime_ms,
                });
                println!("{doc}");
            } else {
                for (n, (c, f)) in counts.iter().zip(&formula).enumerate() {
                    let mark = if c == f { "ok" } else { "MISMATCH" };
                    println!("a_{prime}^{n}: counted {c}, formula {f} [{mark}]");
                }
            }
            anyhow::ensure!(matches, "oracle count disagrees with the zeta series");
        }
        OracleOp::Direct {
            group,
            prime,
            upto,
            json,
        } => {
            let g = Group::parse(&group)?;
            let spec = oracle::lie_ring(g);
            let start = std::time::Instant::now();
            let mut counts = Vec::new();
            for n in 0..=upto {
                counts.push(oracle::direct_ideal_count(&spec, prime, n, &cfg)?);
            }
            let runtime_ms = start.elapsed().as_millis() as u64;
            let formula: Vec<BigInt> = zeta_local(g).eval_p(prime).series(upto)?;
            let matches = counts == formula;
            if json {
                let doc = json!({
                    "inputs": {"group": g.name(), "prime": prime, "upto": upto, "mode": "direct"},
                    "counts": counts.iter().map(BigInt::to_string).collect::<Vec<_>>(),
                    "formula_counts": formula.iter().map(BigInt::to_string).collect::<Vec<_>>(),
                    "match": matches,
                    "runtime_ms": runtime_ms,
                });
                println!("{doc}");
            } else {
                for (n, (c, f)) in counts.iter().zip(&formula).enumerate() {
                    let mark = if c == f { "ok" } else { "MISMATCH" };
                    println!("a_{prime}^{n}: counted {c}, formula {f} [{mark}]");
                }
            }
            anyhow::ensure!(matches, "direct ideal count disagrees with the zeta series");
        }
        OracleOp::Weights {
            case,
            prime,
            r,
            json,
        } => {
            let case = WeightCase::parse(&case)?;
            let r: Vec<u32> = r
                .split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("bad multiplicity vector: {e}"))?;
            let start = std::time::Instant::now();
            let report = oracle::verify_weight_lemma(case, prime, &r, &cfg)?;
            let runtime_ms = start.elapsed().as_millis() as u64;
            if json {
                let doc = json!({
                    "inputs": {"case": report.case, "prime": prime, "r": report.r},
                    "flags_checked": report.flags_checked,
                    "tuples_checked": report.tuples_checked,
                    "match": report.passed(),
                    "mismatches": report.mismatches,
                    "runtime_ms": runtime_ms,
                });
                println!("{doc}");
            } else {
                println!(
                    "case {} at q={prime}, r={:?}: {} flags, {} lift tuples, {}",
                    report.case,
                    report.r,
                    report.flags_checked,
                    report.tuples_checked,
                    if report.passed() {
                        "zero mismatches".to_string()
                    } else {
                        format!("{} mismatches", report.mismatch_count)
                    }
                );
                for m in &report.mismatches {
                    println!("  {m}");
                }
            }
        }
        OracleOp::Multiplicity { prime, bound, json } => {
            let start = std::time::Instant::now();
            let report = oracle::verify_multiplicity(prime, bound, &cfg)?;
            let runtime_ms = start.elapsed().as_millis() as u64;
            if json {
                let buckets: Vec<serde_json::Value> = report
                    .buckets
                    .iter()
                    .map(|((k, ty, scalar), (count, formula))| {
                        json!({
                            "index_exp": k,
                            "type": ty.to_string(),
                            "scalar": scalar,
                            "count": count,
                            "formula": formula.to_string(),
                        })
                    })
                    .collect();
                let doc = json!({
                    "inputs": {"prime": prime, "bound": bound},
                    "buckets": buckets,
                    "match": report.passed(),
                    "runtime_ms": runtime_ms,
                });
                println!("{doc}");
            } else {
                for ((k, ty, scalar), (count, formula)) in &report.buckets {
                    println!(
                        "index {prime}^{k} type {ty} scalar {scalar}: {count} vs {formula}"
                    );
                }
                println!(
                    "{}",
                    if report.passed() {
                        "all buckets match"
                    } else {
                        "MISMATCHES FOUND"
                    }
                );
            }
            anyhow::ensure!(report.passed(), "multiplicity histogram mismatch");
        }
    }
    Ok(())
}

fn geometry_cmd(args: GeometryArgs) -> anyhow::Result<()> {
    let q = args.prime;
    if let Some(kind) = args.count {
        let (counts, formula): (Vec<u64>, u64) = match kind.as_str() {
            "points" => (
                vec![geometry::enumerate_quadric(q, 0)?.len() as u64],
                geometry::quadric_count_formula(q, 0),
            ),
            "lines" => (
                vec![geometry::enumerate_quadric(q, 1)?.len() as u64],
                geometry::quadric_count_formula(q, 1),
            ),
            "planes" => (
                vec![geometry::enumerate_quadric(q, 2)?.len() as u64],
                geometry::quadric_count_formula(q, 2),
            ),
            "rulings" => {
                let planes = geometry::enumerate_quadric(q, 2)?;
                let (a, b) = geometry::classify_rulings(&planes)?;
                let n3 = fano_count(3).eval_p_scalar(&BigInt::from(q));
                (
                    vec![a.len() as u64, b.len() as u64],
                    u64::try_from(&n3).unwrap(),
                )
            }
            other => anyhow::bail!("unknown count kind '{other}'"),
        };
        if args.json {
            let doc = if counts.len() == 1 {
                json!({"prime": q, "kind": kind, "count": counts[0], "formula": formula})
            } else {
                json!({"prime": q, "kind": kind, "counts": counts, "formula": formula})
            };
            println!("{doc}");
        } else if counts.len() == 1 {
            println!("{kind} on the quadric over F_{q}: {} (formula {formula})", counts[0]);
        } else {
            println!(
                "rulings over F_{q}: {} and {} planes (formula {formula} each)",
                counts[0], counts[1]
            );
        }
        return Ok(());
    }
    if let Some(ft) = args.flags {
        let indices: Vec<u32> = if ft.trim().is_empty() {
            Vec::new()
        } else {
            ft.split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("bad flag type: {e}"))?
        };
        let flag_type = combinat::FlagType::new(args.ambient, indices);
        let brute = geometry::count_flags_brute(q, &flag_type)?;
        let formula = combinat::flag_count(&flag_type).eval_p_scalar(&BigInt::from(q));
        if args.json {
            println!(
                "{}",
                json!({"prime": q, "kind": "flags", "ambient": args.ambient,
                       "count": brute, "formula": formula.to_string()})
            );
        } else {
            println!("flags in P^{}: {brute} (formula {formula})", args.ambient);
        }
        return Ok(());
    }
    anyhow::bail!("geometry needs --count KIND or --flags TYPE");
}

fn combinat_cmd(args: CombinatArgs) -> anyhow::Result<()> {
    let doc = match args.op {
        CombinatOp::GaussBinom { n, k } => {
            let b = combinat::gauss_binom(n, k);
            json!({"operation": "gauss-binom", "inputs": {"n": n, "k": k}, "result": b.to_string()})
        }
        CombinatOp::FlagCount { ambient, r#type } => {
            let indices: Vec<u32> = if r#type.trim().is_empty() {
                Vec::new()
            } else {
                r#type
                    .split(',')
                    .map(|p| p.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| anyhow!("bad flag type: {e}"))?
            };
            let ft = combinat::FlagType::new(ambient, indices.clone());
            json!({
                "operation": "flag-count",
                "inputs": {"ambient": ambient, "type": indices},
                "result": combinat::flag_count(&ft).to_string(),
                "dimension": combinat::flag_dim(&ft),
            })
        }
        CombinatOp::Mu { a, b } => {
            json!({"operation": "mu", "inputs": {"a": a, "b": b},
                   "result": combinat::mu(a, b).to_string()})
        }
        CombinatOp::SublatticeCount { d, k } => {
            json!({"operation": "sublattice-count", "inputs": {"d": d, "k": k},
                   "result": combinat::sublattice_count(d, k).to_string()})
        }
        CombinatOp::LatticeTypeCount { r#type } => {
            let pairs: Vec<(u32, u32)> = r#type
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let mut it = p.trim().split(':');
                    let i = it.next().unwrap_or("").parse::<u32>();
                    let r = it.next().unwrap_or("").parse::<u32>();
                    match (i, r) {
                        (Ok(i), Ok(r)) => Ok((i, r)),
                        _ => Err(anyhow!("bad type entry '{p}' (expected i:r)")),
                    }
                })
                .collect::<Result<_, _>>()?;
            json!({"operation": "lattice-type-count", "inputs": {"type": r#type},
                   "result": combinat::lattice_type_count(&pairs).to_string()})
        }
    };
    println!("{doc}");
    Ok(())
}
