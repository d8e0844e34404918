//! Median splitting: from disjoint sets `A_1, ..., A_k` of integers, extract
//! subsets `S_i` of `A_i` that are totally ordered as blocks, losing at most a
//! factor `2^(2^(k-2))` in each set.
//!
//! For two sets, the one with the larger median keeps its elements `>=` its
//! median and the other keeps its elements `<=` its median. For `k` sets, crop
//! the first `k - 1`, then split the topmost of them against `A_k`. If the
//! topmost block stays below, done; otherwise it is now above everything else
//! and the remaining `k - 1` sets are cropped again.
//!
//! Medians of even-size sets are the lower median. Pairs that are already
//! block-ordered are kept whole.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CropError {
    #[error("no sets given")]
    NoSets,
    #[error("set {0} is empty")]
    EmptySet(usize),
    #[error("sets {0} and {1} share element {2}")]
    Overlap(usize, usize, usize),
    #[error("set {0} contains 0; elements are labels in [n]")]
    ZeroElement(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CropResult {
    /// `subsets[i]` is `S_{i+1}`, sorted ascending.
    pub subsets: Vec<Vec<usize>>,
    /// `perm[i]` is `sigma(i + 1)`, the 1-based block position of `S_{i+1}`.
    pub perm: Vec<usize>,
}

impl CropResult {
    /// Set indices (1-based) from the lowest block to the highest.
    pub fn block_order(&self) -> Vec<usize> {
        let mut order = vec![0; self.perm.len()];
        for (i, &pos) in self.perm.iter().enumerate() {
            order[pos - 1] = i + 1;
        }
        order
    }
}

/// Base-2 logarithm of the size divisor `2^(2^(k-2))`, saturating; `k >= 2`.
pub fn loss_exponent(k: usize) -> u32 {
    assert!(k >= 2);
    if k - 2 >= 31 {
        u32::MAX
    } else {
        1u32 << (k - 2)
    }
}

/// Checks `|S_i| * 2^(2^(k-2)) >= |A_i|` (or `S_i = A_i` when `k = 1`).
pub fn satisfies_size_bound(sets: &[Vec<usize>], result: &CropResult) -> bool {
    let k = sets.len();
    if k == 1 {
        let mut a = sets[0].clone();
        a.sort_unstable();
        a.dedup();
        return result.subsets[0] == a;
    }
    let exp = loss_exponent(k);
    sets.iter().zip(&result.subsets).all(|(a, s)| {
        let distinct = a.iter().collect::<BTreeSet<_>>().len() as u128;
        // Exponents beyond 127 make the bound trivial for any non-empty S_i.
        if exp >= 127 {
            !s.is_empty()
        } else {
            (s.len() as u128) << exp >= distinct
        }
    })
}

/// Checks `S_i < S_j` whenever `sigma(i) < sigma(j)`, and that each `S_i` is a
/// subset of `A_i`.
pub fn satisfies_block_order(sets: &[Vec<usize>], result: &CropResult) -> bool {
    let k = sets.len();
    let mut perm = result.perm.clone();
    perm.sort_unstable();
    if perm != (1..=k).collect::<Vec<_>>() {
        return false;
    }
    let subset_ok = sets
        .iter()
        .zip(&result.subsets)
        .all(|(a, s)| s.iter().all(|x| a.contains(x)));
    let order_ok = (0..k).all(|i| {
        (0..k).all(|j| {
            result.perm[i] >= result.perm[j]
                || match (result.subsets[i].iter().max(), result.subsets[j].iter().min()) {
                    (Some(hi), Some(lo)) => hi < lo,
                    _ => true,
                }
        })
    });
    subset_ok && order_ok
}

pub fn crop(sets: &[Vec<usize>]) -> Result<CropResult, CropError> {
    if sets.is_empty() {
        return Err(CropError::NoSets);
    }
    let mut owner = std::collections::HashMap::new();
    let mut normalized = Vec::with_capacity(sets.len());
    for (i, set) in sets.iter().enumerate() {
        if set.is_empty() {
            return Err(CropError::EmptySet(i + 1));
        }
        let mut s = set.clone();
        s.sort_unstable();
        s.dedup();
        for &x in &s {
            if x == 0 {
                return Err(CropError::ZeroElement(i + 1));
            }
            if let Some(prev) = owner.insert(x, i + 1) {
                return Err(CropError::Overlap(prev, i + 1, x));
            }
        }
        normalized.push(s);
    }
    let (subsets, perm) = crop_sorted(normalized);
    Ok(CropResult { subsets, perm })
}

fn lower_median(sorted: &[usize]) -> usize {
    sorted[(sorted.len() - 1) / 2]
}

/// Splits two disjoint sorted sets so that one lies entirely below the other.
/// Returns the new sets and whether the first ended up above the second.
fn split_pair(x: &[usize], y: &[usize]) -> (Vec<usize>, Vec<usize>, bool) {
    let (x_lo, x_hi) = (x[0], x[x.len() - 1]);
    let (y_lo, y_hi) = (y[0], y[y.len() - 1]);
    if x_hi < y_lo {
        return (x.to_vec(), y.to_vec(), false);
    }
    if y_hi < x_lo {
        return (x.to_vec(), y.to_vec(), true);
    }
    let (mx, my) = (lower_median(x), lower_median(y));
    // Ties cannot occur for disjoint sets; treat x as the higher one if they did.
    if mx >= my {
        let upper = x.iter().copied().filter(|&v| v >= mx).collect();
        let lower = y.iter().copied().filter(|&v| v <= my).collect();
        (upper, lower, true)
    } else {
        let lower = x.iter().copied().filter(|&v| v <= mx).collect();
        let upper = y.iter().copied().filter(|&v| v >= my).collect();
        (lower, upper, false)
    }
}

/// Core recursion on sorted, disjoint, non-empty sets. Returns the subsets and
/// the 1-based block positions.
fn crop_sorted(mut sets: Vec<Vec<usize>>) -> (Vec<Vec<usize>>, Vec<usize>) {
    let k = sets.len();
    match k {
        1 => return (sets, vec![1]),
        2 => {
            let (s1, s2, first_above) = split_pair(&sets[0], &sets[1]);
            let perm = if first_above { vec![2, 1] } else { vec![1, 2] };
            return (vec![s1, s2], perm);
        }
        _ => {}
    }

    let last = sets.pop().expect("k >= 3");
    let (mut prefix, prefix_perm) = crop_sorted(sets);
    // The topmost block among the first k - 1.
    let top = prefix_perm
        .iter()
        .position(|&p| p == k - 1)
        .expect("perm is a permutation");
    let (top_set, last_set, top_above) = split_pair(&prefix[top], &last);
    prefix[top] = top_set;

    if !top_above {
        let mut perm = prefix_perm;
        perm.push(k);
        prefix.push(last_set);
        return (prefix, perm);
    }

    // The top block now lies above every other set; crop the rest again.
    let top_set = std::mem::take(&mut prefix[top]);
    let mut rest: Vec<Vec<usize>> = prefix
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != top)
        .map(|(_, s)| s)
        .collect();
    rest.push(last_set);
    let (rest_sets, rest_perm) = crop_sorted(rest);

    let mut subsets = Vec::with_capacity(k);
    let mut perm = Vec::with_capacity(k);
    let mut it = rest_sets.into_iter().zip(rest_perm);
    for i in 0..k {
        if i == top {
            subsets.push(top_set.clone());
            perm.push(k);
        } else {
            let (s, p) = it.next().expect("k - 1 cropped sets");
            subsets.push(s);
            perm.push(p);
        }
    }
    (subsets, perm)
}
