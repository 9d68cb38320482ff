//! Enumeration of the finite-index sublattices of `Z^d` in canonical
//! column-HNF order, with a deterministic parallel fold for the oracle.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::small::{SmallHnf, MAX_DIM};
use super::SublatticeHnf;
use crate::{combinat, Error, Result};

/// Exact number of sublattices of `Z^d` of index `q^k` (the enumeration
/// visit count), used for budget checks before any work starts.
pub fn predicted_lattice_count(d: u32, q: u64, k: u32) -> u128 {
    combinat::sublattice_count(d, k)
        .eval_p_scalar(&BigInt::from(q))
        .to_u128()
        .expect("lattice count exceeds u128")
}

/// All compositions of `k` into `d` nonnegative parts, lexicographically.
fn compositions(d: u32, k: u32) -> Vec<Vec<u32>> {
    fn rec(d: u32, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if d == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(d - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, k, &mut Vec::new(), &mut out);
    out
}

/// Off-diagonal positions `(row, col)` in odometer order (last moves
/// fastest) together with their radices for a given diagonal.
struct Odometer {
    positions: Vec<(usize, usize, i64)>, // (row, col, radix = h_row)
    state: Vec<i64>,
}

impl Odometer {
    fn new(dim: usize, diag: &[i64]) -> Self {
        let mut positions = Vec::new();
        for col in 1..dim {
            for row in 0..col {
                if diag[row] > 1 {
                    positions.push((row, col, diag[row]));
                }
            }
        }
        let state = vec![0i64; positions.len()];
        Odometer { positions, state }
    }

    fn space_size(&self) -> u128 {
        self.positions.iter().map(|&(_, _, r)| r as u128).product()
    }

    /// Positions the odometer at mixed-radix index `idx` and writes the
    /// entries into `h`.
    fn seek(&mut self, mut idx: u128, h: &mut SmallHnf) {
        for p in (0..self.positions.len()).rev() {
            let (row, col, radix) = self.positions[p];
            let digit = (idx % radix as u128) as i64;
            idx /= radix as u128;
            self.state[p] = digit;
            h.a[row][col] = digit;
        }
        debug_assert_eq!(idx, 0);
    }

    /// Advances to the next configuration; returns false when exhausted.
    fn step(&mut self, h: &mut SmallHnf) -> bool {
        for p in (0..self.positions.len()).rev() {
            let (row, col, radix) = self.positions[p];
            if self.state[p] + 1 < radix {
                self.state[p] += 1;
                h.a[row][col] = self.state[p];
                return true;
            }
            self.state[p] = 0;
            h.a[row][col] = 0;
        }
        false
    }
}

fn diag_hnf(dim: usize, q: u64, exps: &[u32]) -> SmallHnf {
    let mut h = SmallHnf::standard(dim);
    for i in 0..dim {
        h.a[i][i] = (q as i64).pow(exps[i]);
    }
    h
}

/// Sequentially visits every sublattice of `Z^d` of index `q^k` exactly once
/// in canonical order.
pub(crate) fn for_each_sublattice<F: FnMut(&SmallHnf)>(d: u32, q: u64, k: u32, mut f: F) {
    assert!(d as usize <= MAX_DIM);
    for exps in compositions(d, k) {
        let diag: Vec<i64> = exps.iter().map(|&e| (q as i64).pow(e)).collect();
        let mut h = diag_hnf(d as usize, q, &exps);
        let mut odo = Odometer::new(d as usize, &diag);
        loop {
            f(&h);
            if !odo.step(&mut h) {
                break;
            }
        }
    }
}

/// Deterministic parallel fold over the sublattices of index `q^k`.
///
/// The enumeration space is split into chunks processed in parallel; the
/// per-chunk results are merged in enumeration order, so the outcome does
/// not depend on scheduling.
pub fn par_fold_sublattices<T, I, S, M>(
    d: u32,
    q: u64,
    k: u32,
    budget: u64,
    init: I,
    step: S,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    S: Fn(&mut T, &SmallHnf) + Sync,
    M: Fn(&mut T, T),
{
    assert!(d as usize <= MAX_DIM);
    let total = predicted_lattice_count(d, q, k);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            lattices: total,
            budget,
        });
    }
    const CHUNK: u128 = 1 << 15;
    let mut tasks: Vec<(Vec<u32>, u128, u128)> = Vec::new();
    for exps in compositions(d, k) {
        let diag: Vec<i64> = exps.iter().map(|&e| (q as i64).pow(e)).collect();
        let size = Odometer::new(d as usize, &diag).space_size();
        let mut start = 0u128;
        while start < size {
            let len = CHUNK.min(size - start);
            tasks.push((exps.clone(), start, len));
            start += len;
        }
    }
    let results: Vec<T> = tasks
        .par_iter()
        .map(|(exps, start, len)| {
            let diag: Vec<i64> = exps.iter().map(|&e| (q as i64).pow(e)).collect();
            let mut h = diag_hnf(d as usize, q, exps);
            let mut odo = Odometer::new(d as usize, &diag);
            odo.seek(*start, &mut h);
            let mut acc = init();
            for i in 0..*len {
                step(&mut acc, &h);
                if i + 1 < *len && !odo.step(&mut h) {
                    unreachable!("odometer exhausted before chunk end");
                }
            }
            acc
        })
        .collect();
    let mut acc = init();
    for r in results {
        merge(&mut acc, r);
    }
    Ok(acc)
}

/// Streaming iterator over the sublattices of `Z^d` of index `q^k`, in
/// canonical HNF order. The count equals `sublattice_count(d, k)` at `p = q`.
pub fn enumerate_sublattices(
    d: u32,
    q: u64,
    k: u32,
    budget: u64,
) -> Result<impl Iterator<Item = SublatticeHnf>> {
    assert!(d as usize <= MAX_DIM);
    let total = predicted_lattice_count(d, q, k);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            lattices: total,
            budget,
        });
    }
    Ok(SublatticeIter {
        d: d as usize,
        q,
        comps: compositions(d, k),
        comp_idx: 0,
        current: None,
    })
}

struct SublatticeIter {
    d: usize,
    q: u64,
    comps: Vec<Vec<u32>>,
    comp_idx: usize,
    current: Option<(SmallHnf, Odometer, bool)>, // (state, odometer, fresh)
}

impl Iterator for SublatticeIter {
    type Item = SublatticeHnf;

    fn next(&mut self) -> Option<SublatticeHnf> {
        loop {
            let advanced = match self.current.as_mut() {
                Some((h, odo, fresh)) => {
                    if *fresh {
                        *fresh = false;
                        return Some(SublatticeHnf::from_small(h));
                    }
                    odo.step(h)
                }
                None => false,
            };
            if advanced {
                let (h, _, _) = self.current.as_ref().unwrap();
                return Some(SublatticeHnf::from_small(h));
            }
            if self.current.is_some() {
                self.current = None;
                self.comp_idx += 1;
            }
            let exps = self.comps.get(self.comp_idx)?.clone();
            let diag: Vec<i64> = exps.iter().map(|&e| (self.q as i64).pow(e)).collect();
            let h = diag_hnf(self.d, self.q, &exps);
            let odo = Odometer::new(self.d, &diag);
            self.current = Some((h, odo, true));
        }
    }
}
