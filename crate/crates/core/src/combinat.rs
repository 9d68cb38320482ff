//! q-combinatorics: Gaussian binomials, flag-variety point counts and
//! dimensions, the multiplicity function `mu`, and sublattice counts.

use num_bigint::BigInt;
use num_traits::One;

use crate::exactalg::{Exp, LaurentPoly};

/// A flag type: ambient projective space `P^m` (vector-space dimension
/// `m + 1`) together with a strictly increasing subset `I` of `{1, .., m}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlagType {
    ambient: u32,
    indices: Vec<u32>,
}

impl FlagType {
    /// Panics unless `indices` is strictly increasing inside `{1, .., m}`.
    pub fn new(ambient: u32, indices: impl Into<Vec<u32>>) -> Self {
        let indices = indices.into();
        assert!(
            indices.windows(2).all(|w| w[0] < w[1]),
            "flag indices must be strictly increasing"
        );
        if let (Some(&first), Some(&last)) = (indices.first(), indices.last()) {
            assert!(first >= 1 && last <= ambient, "flag indices outside 1..=m");
        }
        FlagType { ambient, indices }
    }

    pub fn ambient(&self) -> u32 {
        self.ambient
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }
}

/// The Gaussian binomial coefficient `binom(n, k)_p`; zero when `k < 0` or
/// `k > n`. Computed by the q-Pascal recurrence
/// `binom(n, k) = binom(n-1, k-1) + p^k binom(n-1, k)`.
pub fn gauss_binom(n: u32, k: i64) -> LaurentPoly {
    if k < 0 || k > n as i64 {
        return LaurentPoly::zero();
    }
    let k = k as u32;
    let k = k.min(n - k); // binom(n,k) = binom(n,n-k); keep k small
    let mut row = vec![LaurentPoly::one()];
    for m in 1..=n {
        let width = k.min(m) as usize;
        let mut next = Vec::with_capacity(width + 1);
        next.push(LaurentPoly::one());
        for j in 1..=width {
            let from_smaller = row.get(j - 1).cloned().unwrap_or_else(LaurentPoly::zero);
            let from_same = row
                .get(j)
                .map(|b| b.mul_monomial(&BigInt::one(), j as Exp, 0))
                .unwrap_or_else(LaurentPoly::zero);
            next.push(&from_smaller + &from_same);
        }
        row = next;
    }
    row.into_iter().nth(k as usize).unwrap_or_else(LaurentPoly::zero)
}

/// `b_I(p)`: the number of F_p-points of the flag variety of type `I` in
/// `P^m`, as the Gaussian-binomial product
/// `binom(m+1, i_l) binom(i_l, i_{l-1}) ... binom(i_2, i_1)`.
pub fn flag_count(ft: &FlagType) -> LaurentPoly {
    let mut out = LaurentPoly::one();
    let mut upper = ft.ambient + 1;
    for &i in ft.indices.iter().rev() {
        out = &out * &gauss_binom(upper, i as i64);
        upper = i;
    }
    out
}

/// `dim F_I`: the `p`-degree of `b_I(p)`.
pub fn flag_dim(ft: &FlagType) -> u32 {
    flag_count(ft).p_degree().unwrap_or(0) as u32
}

/// `mu(a, b) = |{x in pZ_p/(p^a) : v_p(x) = b}|` for `a, b >= 1`:
/// `1` if `a = b`, `p^{a-b}(1 - p^{-1})` if `a > b`, else `0`.
pub fn mu(a: u32, b: u32) -> LaurentPoly {
    assert!(a >= 1 && b >= 1, "mu needs positive arguments");
    if a == b {
        LaurentPoly::one()
    } else if a > b {
        let e = (a - b) as Exp;
        LaurentPoly::from_terms([(e, 0, 1), (e - 1, 0, -1)])
    } else {
        LaurentPoly::zero()
    }
}

/// The number of sublattices of `Z^d` of index `p^k`, as a polynomial in
/// `p`: the coefficient of `T^k` in `prod_{j=0}^{d-1} 1/(1 - p^j T)`.
pub fn sublattice_count(d: u32, k: u32) -> LaurentPoly {
    // coeffs[j] = coefficient of T^j so far
    let mut coeffs = vec![LaurentPoly::zero(); k as usize + 1];
    coeffs[0] = LaurentPoly::one();
    for j in 0..d {
        // multiply by 1/(1 - p^j T): prefix recurrence c[i] += p^j c[i-1]
        for i in 1..=k as usize {
            let add = coeffs[i - 1].mul_monomial(&BigInt::one(), j as Exp, 0);
            coeffs[i] = &coeffs[i] + &add;
        }
    }
    coeffs.pop().unwrap()
}

/// The number of maximal lattices in `Z^6` of elementary-divisor type
/// `(I, r_I)`: `b_I(p) p^{-dim F_I} p^{sum (6-i) i r_i}` with ambient `P^5`.
///
/// `pairs` lists `(i, r_i)` with `i in 1..=5`, `r_i >= 1`, strictly
/// increasing in `i`. The empty list gives `1` (only `Z^6` itself).
pub fn lattice_type_count(pairs: &[(u32, u32)]) -> LaurentPoly {
    assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(pairs.iter().all(|&(i, r)| (1..=5).contains(&i) && r >= 1));
    let indices: Vec<u32> = pairs.iter().map(|&(i, _)| i).collect();
    let ft = FlagType::new(5, indices);
    let dim = flag_dim(&ft) as Exp;
    let weight: Exp = pairs
        .iter()
        .map(|&(i, r)| ((6 - i) * i * r) as Exp)
        .sum();
    flag_count(&ft).mul_monomial(&BigInt::one(), weight - dim, 0)
}
