//! Independent brute-force verification: normal-subgroup (ideal) counting
//! through the central-lattice reduction, direct full-rank ideal counting
//! at tiny scale, weight-function verification, and multiplicity checks.
//!
//! Nothing here reuses the closed-form factors: counting goes through
//! canonical HNF enumeration and exact congruence-kernel indices only.

mod cache;
mod weights;

pub use cache::OracleConfig;
pub use weights::{verify_weight_lemma, WeightCase, WeightReport};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::combinat::{lattice_type_count, sublattice_count};
use crate::intlinalg::{
    self, divisor_type, dual_rows, enumerate_sublattices, par_fold_sublattices, LatticeType,
    SmallHnf, SublatticeHnf,
};
use crate::zetacore::Group;
use crate::{Error, Result};

/// The Lie ring of a free class-two group: `d` abelianisation generators,
/// `d'` central generators, and the bracket table `[x_i, x_j]` in central
/// coordinates.
#[derive(Clone, Debug)]
pub struct LieRingSpec {
    pub group: Group,
    pub d: usize,
    pub d_prime: usize,
    /// `brackets[i][j]` = coordinates of `[x_{i+1}, x_{j+1}]`.
    brackets: Vec<Vec<Vec<i64>>>,
}

impl LieRingSpec {
    pub fn bracket(&self, i: usize, j: usize) -> &[i64] {
        &self.brackets[i][j]
    }

    /// The stacked congruence matrix: one `d'`-row block per generator
    /// `x_j`, whose column `k` holds the coordinates of `[x_k, x_j]`.
    /// `x_index` measures the image of this map modulo a central lattice.
    pub fn stacked_bracket_matrix(&self) -> Vec<i64> {
        let (d, dp) = (self.d, self.d_prime);
        let mut a = vec![0i64; d * dp * d];
        for j in 0..d {
            for k in 0..d {
                for (i, &coord) in self.brackets[k][j].iter().enumerate() {
                    a[(j * dp + i) * d + k] = coord;
                }
            }
        }
        a
    }
}

/// Builds the Lie ring of the group, with the standard ordering of the
/// central coordinates: `[x_1,x_2], [x_1,x_3], .., [x_{d-1},x_d]`.
pub fn lie_ring(group: Group) -> LieRingSpec {
    let d = group.d() as usize;
    let dp = group.d_prime() as usize;
    let mut brackets = vec![vec![vec![0i64; dp]; d]; d];
    let mut idx = 0;
    for i in 0..d {
        for j in i + 1..d {
            brackets[i][j][idx] = 1;
            brackets[j][i][idx] = -1;
            idx += 1;
        }
    }
    assert_eq!(idx, dp);
    LieRingSpec {
        group,
        d,
        d_prime: dp,
        brackets,
    }
}

/// A central lattice with its two weights: `w = log_q` of the index, and
/// `w' = w + log_q |Z^d : X|` for the congruence kernel `X`.
#[derive(Clone, Debug)]
pub struct CenterLattice {
    pub lattice: SublatticeHnf,
    pub w: u32,
    pub w_prime: u32,
}

/// `log_q |Z^d : X|` where `X = { g : [g, x_j] in L for all j }`.
pub fn x_index(spec: &LieRingSpec, l: &SublatticeHnf, q: u64) -> u32 {
    let small = l
        .to_small()
        .expect("central lattices in scope fit machine integers");
    x_index_small(spec, &small, q)
}

pub(crate) fn x_index_small(spec: &LieRingSpec, l: &SmallHnf, q: u64) -> u32 {
    let a = spec.stacked_bracket_matrix();
    let dual = dual_rows(l, q);
    intlinalg::kernel_index_from_parts(&a, spec.d * spec.d_prime, spec.d, &dual, q)
}

/// Histogram of `w'` over the central lattices of index `q^m`, the one
/// expensive enumeration; cached on disk keyed by (group, q, m, revision).
pub fn weight_histogram(
    spec: &LieRingSpec,
    q: u64,
    m: u32,
    cfg: &OracleConfig,
) -> Result<BTreeMap<u32, u64>> {
    if let Some(hist) = cache::load_histogram(cfg, spec.group, q, m) {
        return Ok(hist);
    }
    let a = spec.stacked_bracket_matrix();
    let (d, dp) = (spec.d, spec.d_prime);
    let hist = par_fold_sublattices(
        dp as u32,
        q,
        m,
        cfg.budget,
        BTreeMap::<u32, u64>::new,
        |acc, l| {
            let dual = dual_rows(l, q);
            let w_prime = m + intlinalg::kernel_index_from_parts(&a, d * dp, d, &dual, q);
            *acc.entry(w_prime).or_insert(0) += 1;
        },
        |acc, other| {
            for (k, v) in other {
                *acc.entry(k).or_insert(0) += v;
            }
        },
    )?;
    cache::store_histogram(cfg, spec.group, q, m, &hist);
    Ok(hist)
}

/// `a_{q^n}`: the number of ideals of index `q^n`, through the central
/// reduction: `sum over central lattices L with w'(L) <= n of
/// q^{d w(L)} * sublattice_count(d, n - w'(L))(q)`.
pub fn count_normal_sublattices(
    spec: &LieRingSpec,
    q: u64,
    n: u32,
    cfg: &OracleConfig,
) -> Result<BigInt> {
    let qb = BigInt::from(q);
    let mut total = BigInt::zero();
    for m in 0..=n {
        let hist = weight_histogram(spec, q, m, cfg)?;
        for (&w_prime, &count) in &hist {
            if w_prime > n {
                continue;
            }
            let tail = sublattice_count(spec.d as u32, n - w_prime).eval_p_scalar(&qb);
            total += qb.pow(spec.d as u32 * m) * count * tail;
        }
    }
    Ok(total)
}

/// Direct count of ideals of index `q^n` in the full rank-`(d+d')` lattice,
/// by exhaustive HNF enumeration with a bracket-closure check.
///
/// Coordinates are ordered centre-first, so an HNF basis splits into a
/// central block `L`, the abelianisation block, and free central fills of
/// the abelianisation columns. The closure predicate depends only on the
/// two blocks ([x, m] kills central coordinates), so each passing prefix
/// accounts for exactly `index(L)^d` ideals.
pub fn direct_ideal_count(
    spec: &LieRingSpec,
    q: u64,
    n: u32,
    cfg: &OracleConfig,
) -> Result<BigInt> {
    assert!(n <= 2, "direct rank-{} enumeration is limited to n <= 2", spec.d + spec.d_prime);
    let (d, dp) = (spec.d as u32, spec.d_prime as u32);
    // budget the (centre block, abelianisation block) prefixes actually
    // visited; the central fills are fibre-counted in closed form
    let total: u128 = (0..=n)
        .map(|a| {
            intlinalg::predicted_lattice_count(dp, q, a)
                * intlinalg::predicted_lattice_count(d, q, n - a)
        })
        .sum();
    if total > cfg.budget as u128 {
        return Err(Error::BudgetExceeded {
            lattices: total,
            budget: cfg.budget,
        });
    }
    let mut total_count = BigInt::zero();
    for a in 0..=n {
        let b = n - a;
        let fills = BigInt::from(q).pow(a * d);
        let sub = par_fold_sublattices(
            dp,
            q,
            a,
            cfg.budget,
            BigInt::zero,
            |acc, center| {
                let dual = dual_rows(center, q);
                let mut passing = 0u64;
                intlinalg::for_each_sublattice_small(d, q, b, |xblock| {
                    if closure_holds(spec, q, &dual, xblock) {
                        passing += 1;
                    }
                });
                *acc += passing;
            },
            |acc, other| *acc += other,
        )?;
        total_count += sub * &fills;
    }
    Ok(total_count)
}

/// `[x_t, g] in L` for every column `g` of the abelianisation block and
/// every generator `x_t`.
fn closure_holds(
    spec: &LieRingSpec,
    q: u64,
    center_dual: &intlinalg::DualRows,
    xblock: &SmallHnf,
) -> bool {
    let d = spec.d;
    let dp = spec.d_prime;
    for col in 0..d {
        for t in 0..d {
            // v = sum_k g_k [x_k, x_t]
            for i in 0..center_dual.dim {
                let me = center_dual.mod_exp[i];
                if me == 0 {
                    continue;
                }
                let modulus = (q as i64).pow(me);
                let mut s: i128 = 0;
                for k in 0..d {
                    let g_k = if k <= col { xblock.a[k][col] } else { 0 };
                    if g_k == 0 {
                        continue;
                    }
                    let coords = spec.bracket(k, t);
                    for r in 0..dp {
                        if coords[r] != 0 {
                            s += g_k as i128 * coords[r] as i128 * center_dual.rows[i][r] as i128;
                        }
                    }
                }
                if s.rem_euclid(modulus as i128) != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Reference implementation of the direct count without the fill-count
/// shortcut: enumerate every rank-`(d+d')` HNF and test closure. Used to
/// validate `direct_ideal_count` at small sizes.
pub fn direct_ideal_count_naive(spec: &LieRingSpec, q: u64, n: u32, budget: u64) -> Result<BigInt> {
    let full = (spec.d + spec.d_prime) as u32;
    let mut count = BigInt::zero();
    for l in enumerate_sublattices(full, q, n, budget)? {
        if ideal_check_full(spec, q, &l) {
            count += 1;
        }
    }
    Ok(count)
}

fn ideal_check_full(spec: &LieRingSpec, q: u64, l: &SublatticeHnf) -> bool {
    let (d, dp) = (spec.d, spec.d_prime);
    let small = l.to_small().expect("small lattice");
    // central block = first d' columns (pure centre by upper triangularity)
    let mut center = SmallHnf::standard(dp);
    for i in 0..dp {
        for j in i..dp {
            center.a[i][j] = small.a[i][j];
        }
    }
    let dual = dual_rows(&center, q);
    for col in dp..dp + d {
        for t in 0..d {
            for i in 0..dp {
                let me = dual.mod_exp[i];
                if me == 0 {
                    continue;
                }
                let modulus = (q as i64).pow(me);
                let mut s: i128 = 0;
                for k in 0..d {
                    let g_k = small.a[dp + k][col];
                    if g_k == 0 {
                        continue;
                    }
                    let coords = spec.bracket(k, t);
                    for r in 0..dp {
                        s += g_k as i128 * coords[r] as i128 * dual.rows[i][r] as i128;
                    }
                }
                if s.rem_euclid(modulus as i128) != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Comparison of the divisor-type histogram of the index-`q^k` sublattices
/// of `Z^6` (for `k <= bound`) against the closed-form type counts.
#[derive(Clone, Debug)]
pub struct MultiplicityReport {
    pub q: u64,
    pub bound: u32,
    /// `(k, type, scalar) -> (enumerated, formula)`
    pub buckets: BTreeMap<(u32, LatticeType, u32), (u64, BigInt)>,
    pub mismatches: Vec<String>,
}

impl MultiplicityReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Enumerates sublattices of `Z^6` up to index exponent `bound`, takes the
/// elementary-divisor type of each, and compares every bucket against
/// `lattice_type_count` (scaled maximal parts share the formula).
pub fn verify_multiplicity(q: u64, bound: u32, cfg: &OracleConfig) -> Result<MultiplicityReport> {
    let qb = BigInt::from(q);
    let mut buckets = BTreeMap::new();
    for k in 0..=bound {
        let mut hist: BTreeMap<(LatticeType, u32), u64> = BTreeMap::new();
        for l in enumerate_sublattices(6, q, k, cfg.budget)? {
            let (ty, scalar) = divisor_type(&l, q)?;
            *hist.entry((ty, scalar)).or_insert(0) += 1;
        }
        for ((ty, scalar), count) in hist {
            let formula = lattice_type_count(ty.pairs()).eval_p_scalar(&qb);
            buckets.insert((k, ty, scalar), (count, formula));
        }
    }
    let mut mismatches = Vec::new();
    for ((k, ty, scalar), (count, formula)) in &buckets {
        if &BigInt::from(*count) != formula {
            mismatches.push(format!(
                "index 2^{k}: type {ty} scalar {scalar}: enumerated {count}, formula {formula}"
            ));
        }
    }
    Ok(MultiplicityReport {
        q,
        bound,
        buckets,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn cfg() -> OracleConfig {
        OracleConfig::without_cache()
    }

    #[test]
    fn x_index_trivial_and_scaled() {
        let spec = lie_ring(Group::F24);
        assert_eq!(x_index(&spec, &SublatticeHnf::standard(6), 2), 0);
        assert_eq!(x_index(&spec, &SublatticeHnf::scaled(6, 2), 2), 4);
    }

    #[test]
    fn x_index_quadric_point_lattice() {
        // Lattice of type r_1 = 1 cut out by the quadric point (1,0,..,0):
        // {x : x_1 even}; the kernel loses exponent 2, so w' = 3.
        let spec = lie_ring(Group::F24);
        let mut basis = vec![vec![0i64; 6]; 6];
        for (i, row) in basis.iter_mut().enumerate() {
            row[i] = if i == 0 { 2 } else { 1 };
        }
        let l = crate::intlinalg::hnf(&crate::intlinalg::IntMatrix::from_rows(basis)).unwrap();
        assert_eq!(x_index(&spec, &l, 2), 2);
    }

    #[test]
    fn count_normal_trivial() {
        for g in [Group::F22, Group::F23, Group::F24] {
            let spec = lie_ring(g);
            assert_eq!(
                count_normal_sublattices(&spec, 2, 0, &cfg()).unwrap(),
                BigInt::one()
            );
        }
    }

    #[test]
    fn f22_counts() {
        let spec = lie_ring(Group::F22);
        let counts: Vec<BigInt> = (0..=3)
            .map(|n| count_normal_sublattices(&spec, 2, n, &cfg()).unwrap())
            .collect();
        assert_eq!(counts, vec![1.into(), 3.into(), 7.into(), 19.into()]);
    }

    #[test]
    fn f24_index_two() {
        let spec = lie_ring(Group::F24);
        assert_eq!(
            count_normal_sublattices(&spec, 2, 1, &cfg()).unwrap(),
            BigInt::from(15)
        );
        assert_eq!(direct_ideal_count(&spec, 2, 1, &cfg()).unwrap(), BigInt::from(15));
    }

    #[test]
    fn direct_matches_naive() {
        for (g, q, n) in [
            (Group::F22, 2u64, 2u32),
            (Group::F22, 3, 2),
            (Group::F23, 2, 2),
            (Group::F23, 3, 1),
            (Group::F24, 2, 1),
        ] {
            let spec = lie_ring(g);
            let fast = direct_ideal_count(&spec, q, n, &cfg()).unwrap();
            let naive = direct_ideal_count_naive(&spec, q, n, 1 << 24).unwrap();
            assert_eq!(fast, naive, "{g:?} q={q} n={n}");
        }
    }

    #[test]
    fn weight_bound_holds() {
        // w <= w' <= (1 + d) w for every enumerated central lattice.
        let spec = lie_ring(Group::F24);
        for m in 0..=2u32 {
            let hist = weight_histogram(&spec, 2, m, &cfg()).unwrap();
            for &w_prime in hist.keys() {
                assert!(w_prime >= m && w_prime <= 5 * m.max(0) || m == 0 && w_prime == 0);
            }
        }
    }

    #[test]
    fn multiplicity_small() {
        let report = verify_multiplicity(2, 2, &cfg()).unwrap();
        assert!(report.passed(), "{:?}", report.mismatches);
        // k=1: 63 lattices all of type {1}, r_1 = 1
        let key = (
            1u32,
            LatticeType {
                pairs: vec![(1, 1)],
            },
            0u32,
        );
        assert_eq!(report.buckets[&key].0, 63);
    }
}
