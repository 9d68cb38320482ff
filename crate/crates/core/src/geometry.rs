//! The Pfaffian quadric fourfold `y1 y6 - y2 y5 + y3 y4 = 0` in `P^5` over
//! small finite fields: point/line/plane enumeration, the two rulings of
//! planes, congruence-rank computation, and brute-force flag counting.

use crate::combinat::FlagType;
use crate::{Error, Result};

/// Primes with tabulated field arithmetic.
pub const SUPPORTED_PRIMES: [u64; 3] = [2, 3, 5];

/// The antisymmetric matrix of relations `M(y)` evaluated at an integer
/// vector: `M[i][j]` holds the coefficient of `[x_{i+1}, x_{j+1}]`.
pub fn relation_matrix(y: &[i64; 6]) -> [[i64; 4]; 4] {
    [
        [0, y[0], y[1], y[2]],
        [-y[0], 0, y[3], y[4]],
        [-y[1], -y[3], 0, y[5]],
        [-y[2], -y[4], -y[5], 0],
    ]
}

/// `pf M(y) = y1 y6 - y2 y5 + y3 y4`.
pub fn pfaffian(y: &[i64; 6]) -> i64 {
    y[0] * y[5] - y[1] * y[4] + y[2] * y[3]
}

/// The polarised bilinear form `B(u, v) = pf(u+v) - pf(u) - pf(v)`.
pub fn pfaffian_polar(u: &[i64; 6], v: &[i64; 6]) -> i64 {
    u[0] * v[5] + u[5] * v[0] - (u[1] * v[4] + u[4] * v[1]) + u[2] * v[3] + u[3] * v[2]
}

/// A projective subspace of `P^5(F_q)` given by a canonical
/// reduced-row-echelon basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct ProjSubspace {
    pub q: u64,
    /// Projective dimension (0 = point, 1 = line, 2 = plane).
    pub dim: usize,
    /// RREF basis rows over `F_q`.
    pub basis: Vec<[u8; 6]>,
}

impl ProjSubspace {
    /// All `(q^{dim+1} - 1)/(q - 1)` projective points of the subspace, as
    /// normalised coordinate vectors.
    pub fn points(&self) -> Vec<[u8; 6]> {
        let q = self.q;
        let k = self.basis.len();
        let mut out = Vec::new();
        let mut coeffs = vec![0u64; k];
        loop {
            // advance odometer
            let mut pos = 0;
            while pos < k {
                coeffs[pos] += 1;
                if coeffs[pos] < q {
                    break;
                }
                coeffs[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
            let mut v = [0u64; 6];
            for (c, b) in coeffs.iter().zip(&self.basis) {
                for (vi, &bi) in v.iter_mut().zip(b.iter()) {
                    *vi = (*vi + c * bi as u64) % q;
                }
            }
            let mut vv = [0u8; 6];
            for (o, &x) in vv.iter_mut().zip(v.iter()) {
                *o = x as u8;
            }
            if let Some(nv) = normalize_point(q, &vv) {
                out.push(nv);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True iff every point satisfies the Pfaffian equation.
    pub fn on_quadric(&self) -> bool {
        self.points().iter().all(|pt| {
            let y: [i64; 6] = std::array::from_fn(|i| pt[i] as i64);
            pfaffian(&y).rem_euclid(self.q as i64) == 0
        })
    }
}

/// All normalised points of `P^5(F_q)`.
pub fn all_points(q: u64) -> Vec<[u8; 6]> {
    rref_bases(q, 6, 1).into_iter().map(|b| b[0]).collect()
}

/// Row rank over `F_q` of a mutable row set (destroys the rows).
pub(crate) fn fq_rank_rows(q: u64, rows: &mut [[u8; 6]]) -> usize {
    fq_rank(q, rows)
}

/// Scales so the first nonzero coordinate is 1; `None` for the zero vector.
fn normalize_point(q: u64, v: &[u8; 6]) -> Option<[u8; 6]> {
    let first = v.iter().position(|&x| x != 0)?;
    let inv = mod_inv(v[first] as u64, q);
    let mut out = [0u8; 6];
    for (o, &x) in out.iter_mut().zip(v.iter()) {
        *o = ((x as u64 * inv) % q) as u8;
    }
    Some(out)
}

fn mod_inv(a: u64, q: u64) -> u64 {
    // q <= 5: tiny Fermat power
    let mut acc = 1u64;
    for _ in 0..q - 2 {
        acc = acc * a % q;
    }
    acc
}

/// Enumerates all `dim`-dimensional projective subspaces of `P^5(F_q)`
/// contained in the Pfaffian quadric, in canonical order.
///
/// Containment is decided by checking every point of the candidate
/// subspace, so no characteristic assumptions enter.
pub fn enumerate_quadric(q: u64, dim: usize) -> Result<Vec<ProjSubspace>> {
    if !SUPPORTED_PRIMES.contains(&q) {
        return Err(Error::UnknownCase(format!("unsupported prime {q}")));
    }
    assert!(dim <= 2, "the quadric contains no subspaces of dimension > 2");
    let mut out = Vec::new();
    for basis in rref_bases(q, 6, dim + 1) {
        let sub = ProjSubspace { q, dim, basis };
        if sub.on_quadric() {
            out.push(sub);
        }
    }
    Ok(out)
}

/// All RREF bases of `k`-dimensional subspaces of `F_q^n`.
fn rref_bases(q: u64, n: usize, k: usize) -> Vec<Vec<[u8; 6]>> {
    assert!(n <= 6);
    let mut out = Vec::new();
    let mut pivots = (0..k).collect::<Vec<usize>>();
    loop {
        // free positions: row i has entries in columns > pivots[i] that are
        // not pivot columns themselves
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &pi) in pivots.iter().enumerate() {
            for c in pi + 1..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut vals = vec![0u64; free.len()];
        loop {
            let mut basis = vec![[0u8; 6]; k];
            for (i, &pi) in pivots.iter().enumerate() {
                basis[i][pi] = 1;
            }
            for (&(r, c), &v) in free.iter().zip(&vals) {
                basis[r][c] = v as u8;
            }
            out.push(basis);
            // advance odometer
            let mut pos = 0;
            while pos < vals.len() {
                vals[pos] += 1;
                if vals[pos] < q {
                    break;
                }
                vals[pos] = 0;
                pos += 1;
            }
            if pos == vals.len() {
                break;
            }
        }
        // next pivot combination (lexicographic)
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] + 1 <= n - (k - i) {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Dimension of the intersection of two subspaces (projective; -1 when
/// the intersection is zero), via the rank of the stacked bases.
fn intersection_proj_dim(a: &ProjSubspace, b: &ProjSubspace) -> i64 {
    let mut rows: Vec<[u8; 6]> = a.basis.clone();
    rows.extend_from_slice(&b.basis);
    let rank = fq_rank(a.q, &mut rows);
    (a.basis.len() + b.basis.len()) as i64 - rank as i64 - 1
}

/// Row rank over `F_q`, destroying `rows`.
fn fq_rank(q: u64, rows: &mut [[u8; 6]]) -> usize {
    let mut rank = 0;
    for col in 0..6 {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = mod_inv(rows[rank][col] as u64, q);
        for c in 0..6 {
            rows[rank][c] = ((rows[rank][c] as u64 * inv) % q) as u8;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col] as u64;
                for c in 0..6 {
                    let sub = (f * rows[rank][c] as u64) % q;
                    rows[r][c] = ((rows[r][c] as u64 + q - sub) % q) as u8;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Splits the full plane set into the two rulings.
///
/// Two planes lie in the same ruling iff their intersection has even
/// projective dimension (a point, or equality). Ruling A is the class of
/// the coordinate plane `<e1, e2, e3>` (the one whose congruence system has
/// rank 4); ruling B is the weight-dropping class containing `<e4, e5, e6>`.
pub fn classify_rulings(planes: &[ProjSubspace]) -> Result<(Vec<ProjSubspace>, Vec<ProjSubspace>)> {
    if planes.is_empty() {
        return Err(Error::RulingPartition("empty plane set".into()));
    }
    let q = planes[0].q;
    let anchor_a = ProjSubspace {
        q,
        dim: 2,
        basis: vec![
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0],
        ],
    };
    if !planes.contains(&anchor_a) {
        return Err(Error::RulingPartition(
            "anchor plane <e1,e2,e3> missing from input".into(),
        ));
    }
    let mut ruling_a = Vec::new();
    let mut ruling_b = Vec::new();
    for pl in planes {
        if intersection_proj_dim(pl, &anchor_a) % 2 == 0 {
            ruling_a.push(pl.clone());
        } else {
            ruling_b.push(pl.clone());
        }
    }
    // The same-ruling relation must be an equivalence: verify the parity of
    // every pair is constant within classes and odd across them.
    for (label, class) in [("A", &ruling_a), ("B", &ruling_b)] {
        for (i, x) in class.iter().enumerate() {
            for y in class.iter().skip(i + 1) {
                if intersection_proj_dim(x, y) % 2 != 0 {
                    return Err(Error::RulingPartition(format!(
                        "planes within ruling {label} meet in odd dimension"
                    )));
                }
            }
        }
    }
    for x in &ruling_a {
        for y in &ruling_b {
            if intersection_proj_dim(x, y) % 2 == 0 {
                return Err(Error::RulingPartition(
                    "planes across rulings meet in even dimension".into(),
                ));
            }
        }
    }
    Ok((ruling_a, ruling_b))
}

/// Rank over `F_q` of the stacked system `g M(v_1), g M(v_2), ..` acting on
/// row vectors `g in F_q^4`.
pub fn stacked_rank(q: u64, vectors: &[[u8; 6]]) -> usize {
    // columns of the combined system indexed by (vector, column of M)
    let mut rows: Vec<Vec<u64>> = vec![vec![0; 4 * vectors.len()]; 4];
    for (vi, v) in vectors.iter().enumerate() {
        let y: [i64; 6] = std::array::from_fn(|i| v[i] as i64);
        let m = relation_matrix(&y);
        for g in 0..4 {
            for c in 0..4 {
                rows[g][4 * vi + c] = m[g][c].rem_euclid(q as i64) as u64;
            }
        }
    }
    // Gaussian elimination on the 4 x 4k matrix.
    let mut rank = 0;
    let width = 4 * vectors.len();
    for col in 0..width {
        let Some(pr) = (rank..4).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = mod_inv(rows[rank][col], q);
        for c in 0..width {
            rows[rank][c] = rows[rank][c] * inv % q;
        }
        for r in 0..4 {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..width {
                    let sub = f * rows[rank][c] % q;
                    rows[r][c] = (rows[r][c] + q - sub) % q;
                }
            }
        }
        rank += 1;
        if rank == 4 {
            break;
        }
    }
    rank
}

/// Number of flags of type `ft` in `F_q^{m+1}` by exhaustive enumeration of
/// subspace chains (`m <= 3`, `q in {2, 3}`).
pub fn count_flags_brute(q: u64, ft: &FlagType) -> Result<u64> {
    let m = ft.ambient();
    assert!(m <= 3, "brute-force flag counting is limited to m <= 3");
    if !(2..=3).contains(&q) {
        return Err(Error::UnknownCase(format!(
            "brute-force flag counting supports q in {{2, 3}}, got {q}"
        )));
    }
    let n = (m + 1) as usize;
    // Subspaces of each dimension as sorted point sets (projective).
    let dims: Vec<usize> = ft.indices().iter().map(|&i| n - i as usize).collect();
    if dims.is_empty() {
        return Ok(1);
    }
    count_chains(q, n, &dims, None)
}

/// Counts chains `V_1 > V_2 > ..` of the prescribed vector-space dimensions,
/// each contained in the previous (`outer = None` means the ambient space).
fn count_chains(q: u64, n: usize, dims: &[usize], outer: Option<&Vec<[u8; 6]>>) -> Result<u64> {
    let (first, rest) = dims.split_first().expect("nonempty dims");
    let mut total = 0u64;
    for basis in rref_bases(q, n, *first) {
        if let Some(out_basis) = outer {
            if !contained_in(q, &basis, out_basis) {
                continue;
            }
        }
        if rest.is_empty() {
            total += 1;
        } else {
            total += count_chains(q, n, rest, Some(&basis))?;
        }
    }
    Ok(total)
}

fn contained_in(q: u64, inner: &[[u8; 6]], outer: &[[u8; 6]]) -> bool {
    // every inner row must lie in the span of the outer rows
    let outer_rank = {
        let mut rows = outer.to_vec();
        fq_rank(q, &mut rows)
    };
    let mut rows = outer.to_vec();
    rows.extend_from_slice(inner);
    fq_rank(q, &mut rows) == outer_rank
}

/// Point, line and plane counts on the quadric as polynomials in `p`,
/// evaluated at `q`: `(p^2+1)(p^2+p+1)`, `(p+1)(p^2+1)(p^2+p+1)`,
/// `2(p^2+1)(p+1)`.
pub fn quadric_count_formula(q: u64, dim: usize) -> u64 {
    let p = q;
    match dim {
        0 => (p * p + 1) * (p * p + p + 1),
        1 => (p + 1) * (p * p + 1) * (p * p + p + 1),
        2 => 2 * (p * p + 1) * (p + 1),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det4(m: &[[i64; 4]; 4]) -> i64 {
        let mut det = 0i64;
        for c in 0..4 {
            let mut minor = [[0i64; 3]; 3];
            for (ri, row) in m.iter().enumerate().skip(1) {
                let mut cj = 0;
                for (ci, &v) in row.iter().enumerate() {
                    if ci == c {
                        continue;
                    }
                    minor[ri - 1][cj] = v;
                    cj += 1;
                }
            }
            let d3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1])
                - minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0])
                + minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
            let sign = if c % 2 == 0 { 1 } else { -1 };
            det += sign * m[0][c] * d3;
        }
        det
    }

    #[test]
    fn pfaffian_examples() {
        assert_eq!(pfaffian(&[0; 6]), 0);
        assert_eq!(pfaffian(&[1, 0, 0, 0, 0, 0]), 0);
        assert_eq!(pfaffian(&[1, 0, 0, 0, 0, 1]), 1);
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        // Degree-4 identity in 6 variables: checking on the grid {0..4}^6
        // (5 > 4 points per variable) proves it as a polynomial identity.
        let mut y = [0i64; 6];
        loop {
            let m = relation_matrix(&y);
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert_eq!(v, -m[j][i], "antisymmetry");
                }
            }
            let p = pfaffian(&y);
            assert_eq!(p * p, det4(&m), "pf^2 != det at {y:?}");
            let mut pos = 0;
            while pos < 6 {
                y[pos] += 1;
                if y[pos] < 5 {
                    break;
                }
                y[pos] = 0;
                pos += 1;
            }
            if pos == 6 {
                break;
            }
        }
    }

    #[test]
    fn quadric_counts_q2() {
        assert_eq!(enumerate_quadric(2, 0).unwrap().len(), 35);
        assert_eq!(enumerate_quadric(2, 1).unwrap().len(), 105);
        assert_eq!(enumerate_quadric(2, 2).unwrap().len(), 30);
    }

    #[test]
    fn quadric_counts_q3() {
        assert_eq!(enumerate_quadric(3, 0).unwrap().len(), 130);
        assert_eq!(enumerate_quadric(3, 1).unwrap().len(), 520);
        assert_eq!(enumerate_quadric(3, 2).unwrap().len(), 80);
    }

    #[test]
    fn lines_lie_on_quadric() {
        for line in enumerate_quadric(2, 1).unwrap() {
            assert!(line.on_quadric());
            assert_eq!(line.points().len(), 3);
        }
    }

    #[test]
    fn rulings_q2() {
        let planes = enumerate_quadric(2, 2).unwrap();
        let (a, b) = classify_rulings(&planes).unwrap();
        assert_eq!(a.len(), 15);
        assert_eq!(b.len(), 15);
        for pl in &a {
            let basis: Vec<[u8; 6]> = pl.basis.clone();
            assert_eq!(stacked_rank(2, &basis), 4, "ruling A plane of rank != 4");
        }
        for pl in &b {
            let basis: Vec<[u8; 6]> = pl.basis.clone();
            assert_eq!(stacked_rank(2, &basis), 3, "ruling B plane of rank != 3");
        }
    }

    #[test]
    fn rulings_q3() {
        let planes = enumerate_quadric(3, 2).unwrap();
        let (a, b) = classify_rulings(&planes).unwrap();
        assert_eq!(a.len(), 40);
        assert_eq!(b.len(), 40);
        for pl in a.iter().chain(&b) {
            let expect = if a.contains(pl) { 4 } else { 3 };
            assert_eq!(stacked_rank(3, &pl.basis), expect);
        }
    }

    #[test]
    fn point_ranks() {
        for pt in enumerate_quadric(2, 0).unwrap() {
            assert_eq!(stacked_rank(2, &pt.basis), 2);
        }
        // points off the quadric have nonsingular relation matrix
        for basis in rref_bases(2, 6, 1) {
            let y: [i64; 6] = std::array::from_fn(|i| basis[0][i] as i64);
            if pfaffian(&y).rem_euclid(2) != 0 {
                assert_eq!(stacked_rank(2, &basis), 4);
            }
        }
    }

    #[test]
    fn flag_counts_brute_examples() {
        assert_eq!(count_flags_brute(2, &FlagType::new(1, vec![1])).unwrap(), 3);
        assert_eq!(count_flags_brute(2, &FlagType::new(2, vec![1, 2])).unwrap(), 21);
        assert_eq!(count_flags_brute(2, &FlagType::new(2, vec![2])).unwrap(), 7);
    }

    #[test]
    fn flag_counts_match_formula() {
        use crate::combinat::flag_count;
        use num_bigint::BigInt;
        for q in [2u64, 3] {
            for m in 1..=3u32 {
                for mask in 0u32..(1 << m) {
                    let indices: Vec<u32> =
                        (1..=m).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                    let ft = FlagType::new(m, indices);
                    let brute = count_flags_brute(q, &ft).unwrap();
                    let formula = flag_count(&ft).eval_p_scalar(&BigInt::from(q));
                    assert_eq!(BigInt::from(brute), formula, "q={q} m={m} mask={mask:b}");
                }
            }
        }
    }
}
