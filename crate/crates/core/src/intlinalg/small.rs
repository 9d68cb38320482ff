//! Machine-integer engine behind the hot enumeration paths. Everything here
//! assumes `q`-power indices small enough that all intermediates fit in
//! `i64` (indices up to a few thousand; overflow checks stay on in dev
//! builds).

/// Maximum ambient dimension supported by the fixed-size representation
/// (rank 10 covers the Hirsch length of the largest group in scope).
pub const MAX_DIM: usize = 10;

/// Upper-triangular column-HNF basis with `i64` entries.
///
/// `a[i][j]` for `i <= j` is the entry in row `i` of basis column `j`;
/// entries below the diagonal are zero, diagonals positive, off-diagonals
/// reduced modulo the diagonal entry of their row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallHnf {
    pub dim: usize,
    pub a: [[i64; MAX_DIM]; MAX_DIM],
}

impl SmallHnf {
    pub fn standard(dim: usize) -> Self {
        let mut a = [[0i64; MAX_DIM]; MAX_DIM];
        for (i, row) in a.iter_mut().enumerate().take(dim) {
            row[i] = 1;
        }
        SmallHnf { dim, a }
    }

    pub fn index(&self) -> i64 {
        (0..self.dim).map(|i| self.a[i][i]).product()
    }

    /// `log_q` of the index; the index must be a `q`-power.
    pub fn index_exp(&self, q: i64) -> u32 {
        let mut v = self.index();
        let mut e = 0;
        while v > 1 {
            debug_assert_eq!(v % q, 0);
            v /= q;
            e += 1;
        }
        e
    }
}

/// The dual description of a lattice: integer rows `w_i` and `q`-power
/// moduli `d_i` with `v in L  iff  w_i . v == 0 (mod d_i)` for all `i`.
#[derive(Clone, Debug)]
pub struct DualRows {
    pub dim: usize,
    /// `rows[i]` scaled so that `rows[i] = d_i * (H^{-1})_i` with gcd 1..
    pub rows: [[i64; MAX_DIM]; MAX_DIM],
    /// exponent of `q` in `d_i`
    pub mod_exp: [u32; MAX_DIM],
}

/// Computes the dual rows of an upper-triangular basis whose diagonal
/// entries are powers of `q`.
pub fn dual_rows(h: &SmallHnf, q: u64) -> DualRows {
    let d = h.dim;
    let q = q as i128;
    let mut rows = [[0i64; MAX_DIM]; MAX_DIM];
    let mut mod_exp = [0u32; MAX_DIM];
    for i in 0..d {
        // Solve r^T H = d_i e_i^T over the rationals with common denominator
        // den = prod_{k=i..d-1} h_k, tracked as exact i128 numerators.
        let mut den: i128 = 1;
        for k in i..d {
            den *= h.a[k][k] as i128;
        }
        let mut num = [0i128; MAX_DIM];
        // Back-substitution left to right: entry j (j >= i) satisfies
        // sum_{k<=j} r_k H[k][j] = den * [j == i].
        for j in i..d {
            let mut s: i128 = if j == i { den } else { 0 };
            for (k, &nk) in num.iter().enumerate().take(j).skip(i) {
                s -= nk * h.a[k][j] as i128;
            }
            debug_assert_eq!(s % h.a[j][j] as i128, 0);
            num[j] = s / h.a[j][j] as i128;
        }
        // Reduce by the q-content: all entries and den are q-power multiples.
        let mut g = den;
        for &nk in num.iter().take(d).skip(i) {
            g = gcd_i128(g, nk);
            if g == 1 {
                break;
            }
        }
        let den = den / g;
        let mut e = 0u32;
        let mut v = den;
        while v > 1 {
            debug_assert_eq!(v % q, 0, "diagonal not a q-power");
            v /= q;
            e += 1;
        }
        mod_exp[i] = e;
        let d_i = den;
        for k in i..d {
            let reduced = (num[k] / g).rem_euclid(d_i.max(1));
            rows[i][k] = reduced as i64;
        }
    }
    DualRows {
        dim: d,
        rows,
        mod_exp,
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Order exponent of the subgroup of `(Z/q^E)^rows` generated by the
/// columns of `mat` (rows-major, entries already reduced mod `q^E`):
/// returns `log_q |image|`.
///
/// Gaussian elimination over the local ring: the pivot is always an entry
/// of minimal `q`-valuation, scaled by a unit inverse.
pub fn image_index_exponent(
    mat: &mut [i64],
    rows: usize,
    cols: usize,
    q: i64,
    e: u32,
) -> u32 {
    if e == 0 {
        return 0;
    }
    let qe: i64 = q.pow(e);
    let val = |x: i64| -> u32 {
        if x == 0 {
            return e;
        }
        let mut v = 0;
        let mut x = x;
        while x % q == 0 {
            x /= q;
            v += 1;
        }
        v
    };
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; cols];
    let mut total = 0u32;
    loop {
        let mut best: Option<(usize, usize, u32)> = None;
        for r in 0..rows {
            if used_rows[r] {
                continue;
            }
            for c in 0..cols {
                if used_cols[c] {
                    continue;
                }
                let x = mat[r * cols + c] % qe;
                if x == 0 {
                    continue;
                }
                let v = val(x);
                if best.map(|(_, _, bv)| v < bv).unwrap_or(true) {
                    best = Some((r, c, v));
                    if v == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((pr, pc, pv)) = best else {
            break;
        };
        total += e - pv;
        // Clear the pivot column in the other rows (row ops are unimodular
        // coordinate changes of (Z/q^E)^rows) and then the pivot row in the
        // other columns (column ops change the generating set). The pivot
        // itself is marked used only afterwards so both passes see it.
        let pivot = mat[pr * cols + pc].rem_euclid(qe);
        let unit = pivot / q.pow(pv);
        let unit_inv = mod_inverse(unit.rem_euclid(qe), qe, q);
        for r in 0..rows {
            if r == pr || used_rows[r] {
                continue;
            }
            let x = mat[r * cols + pc].rem_euclid(qe);
            if x == 0 {
                continue;
            }
            debug_assert!(val(x) >= pv);
            let t = ((x / q.pow(pv)) as i128 * unit_inv as i128).rem_euclid(qe as i128) as i64;
            for c in 0..cols {
                if used_cols[c] {
                    continue;
                }
                let sub = (t as i128 * mat[pr * cols + c] as i128).rem_euclid(qe as i128) as i64;
                mat[r * cols + c] = (mat[r * cols + c] - sub).rem_euclid(qe);
            }
        }
        for c in 0..cols {
            if c == pc || used_cols[c] {
                continue;
            }
            let x = mat[pr * cols + c].rem_euclid(qe);
            if x == 0 {
                continue;
            }
            debug_assert!(val(x) >= pv);
            let t = ((x / q.pow(pv)) as i128 * unit_inv as i128).rem_euclid(qe as i128) as i64;
            for r in 0..rows {
                if used_rows[r] {
                    continue;
                }
                let sub = (t as i128 * mat[r * cols + pc] as i128).rem_euclid(qe as i128) as i64;
                mat[r * cols + c] = (mat[r * cols + c] - sub).rem_euclid(qe);
            }
        }
        used_rows[pr] = true;
        used_cols[pc] = true;
        if used_cols.iter().all(|&u| u) || used_rows.iter().all(|&u| u) {
            break;
        }
    }
    total
}

/// Column HNF of an integer square matrix whose columns span a finite-index
/// sublattice; machine-integer mirror of `intlinalg::hnf`.
pub fn small_col_hnf(dim: usize, cols: &[[i64; MAX_DIM]; MAX_DIM]) -> SmallHnf {
    let mut w = *cols;
    for i in (0..dim).rev() {
        loop {
            let mut best: Option<(usize, i64)> = None;
            for (j, col) in w.iter().enumerate().take(i + 1) {
                let v = col[i];
                if v == 0 {
                    continue;
                }
                if best.map(|(_, b)| v.abs() < b.abs()).unwrap_or(true) {
                    best = Some((j, v));
                }
            }
            let (jp, pivot) = best.expect("rank-deficient column set");
            let mut done = true;
            for j in 0..=i {
                if j == jp || w[j][i] == 0 {
                    continue;
                }
                let t = w[j][i] / pivot;
                for r in 0..dim {
                    w[j][r] -= t * w[jp][r];
                }
                if w[j][i] != 0 {
                    done = false;
                }
            }
            if done {
                w.swap(jp, i);
                break;
            }
        }
        if w[i][i] < 0 {
            for r in 0..dim {
                w[i][r] = -w[i][r];
            }
        }
    }
    // reduce off-diagonals
    for j in 0..dim {
        for i in (0..j).rev() {
            let d = w[i][i];
            let t = w[j][i].div_euclid(d);
            if t != 0 {
                for r in 0..dim {
                    w[j][r] -= t * w[i][r];
                }
            }
        }
    }
    let mut out = SmallHnf::standard(dim);
    for i in 0..dim {
        for j in 0..dim {
            // columns of `w` are stored row-major per column: w[j] is col j
            out.a[i][j] = w[j][i];
        }
    }
    debug_assert!((0..dim).all(|i| out.a[i][i] > 0));
    out
}

/// The lattice `{ x in Z^dim : w . x == 0 (mod q^me) for every row }`,
/// intersected one congruence at a time.
pub fn covector_kernel(dim: usize, rows: &[(Vec<i64>, u32)], q: u64) -> SmallHnf {
    let qi = q as i64;
    let mut basis = SmallHnf::standard(dim); // columns span the lattice
    // keep the basis as columns in a [col][row] layout for the product
    let mut cols = [[0i64; MAX_DIM]; MAX_DIM];
    for (j, col) in cols.iter_mut().enumerate().take(dim) {
        for (i, v) in col.iter_mut().enumerate().take(dim) {
            *v = basis.a[i][j];
        }
    }
    for (w, me) in rows {
        if *me == 0 {
            continue;
        }
        let m = qi.pow(*me);
        // condition on x = B z: (w B) z == 0 (mod q^me)
        let mut wb = [0i64; MAX_DIM];
        for (j, col) in cols.iter().enumerate().take(dim) {
            let mut s: i128 = 0;
            for (i, &wi) in w.iter().enumerate().take(dim) {
                s += wi as i128 * col[i] as i128;
            }
            wb[j] = s.rem_euclid(m as i128) as i64;
        }
        // valuation of the least-divisible entry
        let val = |x: i64| -> u32 {
            if x == 0 {
                return *me;
            }
            let mut v = 0;
            let mut x = x;
            while x % qi == 0 {
                x /= qi;
                v += 1;
            }
            v
        };
        let Some((j0, a)) = (0..dim).map(|j| (j, val(wb[j]))).min_by_key(|&(_, v)| v) else {
            continue;
        };
        if a >= *me {
            continue; // condition already satisfied on the whole lattice
        }
        let unit = wb[j0] / qi.pow(a);
        let shrink = qi.pow(me - a);
        let unit_inv = mod_inverse(unit.rem_euclid(shrink), shrink, qi);
        // kernel in z-space: e_j - t_j e_{j0} for j != j0, and q^{me-a} e_{j0}
        let mut new_cols = [[0i64; MAX_DIM]; MAX_DIM];
        for j in 0..dim {
            if j == j0 {
                for r in 0..dim {
                    new_cols[j][r] = cols[j0][r] * shrink;
                }
            } else {
                let t = ((wb[j] / qi.pow(a)) as i128 * unit_inv as i128)
                    .rem_euclid(shrink as i128) as i64;
                for r in 0..dim {
                    new_cols[j][r] = cols[j][r] - t * cols[j0][r];
                }
            }
        }
        basis = small_col_hnf(dim, &new_cols);
        for (j, col) in cols.iter_mut().enumerate().take(dim) {
            for (i, v) in col.iter_mut().enumerate().take(dim) {
                *v = basis.a[i][j];
            }
        }
    }
    basis
}

/// Exponents of the elementary divisors (ascending) of a `q`-power-index
/// lattice, from an i64 Smith normal form.
pub fn small_divisor_exponents(h: &SmallHnf, q: u64) -> Vec<u32> {
    let d = h.dim;
    let mut w = [[0i128; MAX_DIM]; MAX_DIM];
    for i in 0..d {
        for j in 0..d {
            w[i][j] = h.a[i][j] as i128;
        }
    }
    let mut exps = Vec::with_capacity(d);
    for t in 0..d {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..d {
                for j in t..d {
                    if w[i][j] == 0 {
                        continue;
                    }
                    if best
                        .map(|(bi, bj)| w[i][j].abs() < w[bi][bj].abs())
                        .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = best.expect("full-rank lattice");
            if bi != t {
                w.swap(bi, t);
            }
            if bj != t {
                for row in w.iter_mut().take(d) {
                    row.swap(bj, t);
                }
            }
            let pivot = w[t][t];
            let mut clean = true;
            for i in t + 1..d {
                if w[i][t] != 0 {
                    let f = w[i][t] / pivot;
                    for j in t..d {
                        w[i][j] -= f * w[t][j];
                    }
                    if w[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..d {
                if w[t][j] != 0 {
                    let f = w[t][j] / pivot;
                    for i in t..d {
                        w[i][j] -= f * w[i][t];
                    }
                    if w[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
    }
    for t in 0..d {
        let mut v = w[t][t].unsigned_abs();
        let mut e = 0u32;
        while v > 1 {
            debug_assert_eq!(v % q as u128, 0, "index not a q-power");
            v /= q as u128;
            e += 1;
        }
        exps.push(e);
    }
    exps.sort_unstable();
    exps
}

/// Inverse of a unit modulo `q^E` (`q` prime), via Euclid.
fn mod_inverse(a: i64, qe: i64, _q: i64) -> i64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (qe, a.rem_euclid(qe));
    while new_r != 0 {
        let quotient = r / new_r;
        (t, new_t) = (new_t, t - quotient * new_t);
        (r, new_r) = (new_r, r - quotient * new_r);
    }
    debug_assert_eq!(r, 1, "not a unit");
    t.rem_euclid(qe)
}

/// `log_q` of the index of `{ g in Z^cols : (A g)_block in L for each block }`
/// where `a` stacks `rows / L.dim` blocks of `L.dim` rows.
pub fn kernel_index_small(
    a: &[i64],
    rows: usize,
    cols: usize,
    dual: &DualRows,
    q: u64,
) -> u32 {
    let d = dual.dim;
    debug_assert_eq!(rows % d, 0);
    let blocks = rows / d;
    let e = (0..d).map(|i| dual.mod_exp[i]).max().unwrap_or(0);
    if e == 0 {
        return 0;
    }
    let q = q as i64;
    let qe = q.pow(e);
    // Condition rows: for block b and dual row i,
    //   sum_k g_k * (w_i . A_block_col_k) == 0  (mod q^{mod_exp[i]}),
    // lifted to modulus q^E by scaling with q^{E - mod_exp[i]}.
    let mut mat = vec![0i64; blocks * d * cols];
    let mut out_row = 0;
    for b in 0..blocks {
        for i in 0..d {
            if dual.mod_exp[i] == 0 {
                out_row += 1;
                continue;
            }
            let lift = q.pow(e - dual.mod_exp[i]);
            for k in 0..cols {
                let mut s: i128 = 0;
                for r in i..d {
                    s += dual.rows[i][r] as i128 * a[(b * d + r) * cols + k] as i128;
                }
                let reduced = (s.rem_euclid(q.pow(dual.mod_exp[i]) as i128)) as i64;
                mat[out_row * cols + k] = (reduced as i128 * lift as i128).rem_euclid(qe as i128) as i64;
            }
            out_row += 1;
        }
    }
    image_index_exponent(&mut mat, blocks * d, cols, q, e)
}
