//! Bottlegraphs for patterns with interval chromatic number 2.
//!
//! A bottlegraph `B` of `H` is a complete multipartite graph such that every
//! ordered blow-up `(B(t), phi)` (parts placed as consecutive intervals in
//! the order given by `phi`) has a perfect `H`-tiling for a suitable `t`.
//! With `p = alpha*(H) * h`:
//!
//! * without Property A, write `h = a p + r` with `a >= 2`, `0 <= r < p`, and
//!   take parts `U_0, U_1, ..., U_a` of sizes `r, p, ..., p`;
//! * with Property A, take `K_{h-p, p}`.
//!
//! In both cases `chi_cr(B) = h / p = 1 / alpha*(H)`. The only labelings that
//! need `t > 1` are the ones placing `U_0` first; there `V(B(t))` splits into
//! sets of two types, each spanning a copy of `H`.

use itertools::Itertools;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{find_embedding, Embedding, Tiling};
use crate::graph::OrderedGraph;
use crate::profile::compute_profile;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BottleError {
    #[error("bottlegraphs are only constructed for chi_<(H) = 2 (got {0})")]
    ChiLtNotTwo(usize),
    #[error("chi_cr needs at least two non-empty parts")]
    TooFewParts,
    #[error("labeling {0:?} is not a permutation of the parts")]
    InvalidLabeling(Vec<usize>),
    #[error("template does not match the bottlegraph of the pattern")]
    TemplateMismatch,
    #[error("no copy of the pattern in the blow-up (t = {t})")]
    NoCopy { t: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Parts `U_0` (size `r`, omitted when `r = 0`) and `a` parts of size `p`.
    NoPropA { p: usize, r: usize, a: usize },
    /// `K_{r, p}` with `r = h - p <= p`.
    PropA { p: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bottlegraph {
    /// Part sizes; index 0 is `U_0` whenever the `NoPropA` branch has `r > 0`.
    pub part_sizes: Vec<usize>,
    pub branch: Branch,
    /// Whether the construction was carried out on the mirror of the pattern.
    pub mirrored: bool,
}

impl Bottlegraph {
    pub fn order(&self) -> usize {
        self.part_sizes.iter().sum()
    }

    pub fn chi_cr(&self) -> Rational {
        chi_cr(&self.part_sizes).expect("bottlegraphs have at least two parts")
    }

    /// Index of the `U_0` part, when it exists.
    pub fn u0(&self) -> Option<usize> {
        match self.branch {
            Branch::NoPropA { r, .. } if r > 0 => Some(0),
            _ => None,
        }
    }
}

/// Left-to-right placement of the parts: `order[k]` is the part in position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalLabeling {
    pub order: Vec<usize>,
}

impl IntervalLabeling {
    pub fn new(order: Vec<usize>) -> Result<Self, BottleError> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || seen[i] {
                return Err(BottleError::InvalidLabeling(order));
            }
            seen[i] = true;
        }
        Ok(Self { order })
    }

    pub fn identity(parts: usize) -> Self {
        Self {
            order: (0..parts).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            order: self.order.iter().rev().copied().collect(),
        }
    }
}

/// `(chi - 1) |F| / (|F| - sigma)` for a complete multipartite `F`, with `chi`
/// the number of parts and `sigma` the smallest part.
pub fn chi_cr(part_sizes: &[usize]) -> Result<Rational, BottleError> {
    if part_sizes.len() < 2 || part_sizes.contains(&0) {
        return Err(BottleError::TooFewParts);
    }
    let total: usize = part_sizes.iter().sum();
    let sigma = *part_sizes.iter().min().expect("non-empty");
    Ok(Rational::new(
        ((part_sizes.len() - 1) * total) as i64,
        (total - sigma) as i64,
    ))
}

pub fn bottlegraph(pattern: &OrderedGraph) -> Result<Bottlegraph, BottleError> {
    let profile = compute_profile(pattern);
    if profile.chi_lt != 2 {
        return Err(BottleError::ChiLtNotTwo(profile.chi_lt));
    }
    let h = profile.h;
    let left = profile.alpha_plus[0];
    let right = h + 1 - profile.alpha_minus[0];
    let p = left.min(right);

    if profile.prop_a {
        let r = h - p;
        return Ok(Bottlegraph {
            part_sizes: vec![r, p],
            branch: Branch::PropA { p, r },
            mirrored: false,
        });
    }
    // The construction wants p = alpha+_1; when only the right end attains the
    // minimum, build for the mirror image.
    let mirrored = right < left;
    let (a, r) = h.div_rem(&p);
    debug_assert!(a >= 2);
    let mut part_sizes = Vec::with_capacity(a + 1);
    if r > 0 {
        part_sizes.push(r);
    }
    part_sizes.extend(std::iter::repeat_n(p, a));
    Ok(Bottlegraph {
        part_sizes,
        branch: Branch::NoPropA { p, r, a },
        mirrored,
    })
}

/// All placements of the parts, in lexicographic order. With `dedup`, only the
/// first placement of each left-to-right sequence of part sizes is kept.
pub fn interval_labelings(b: &Bottlegraph, dedup: bool) -> Vec<IntervalLabeling> {
    let k = b.part_sizes.len();
    let all = (0..k).permutations(k).map(|order| IntervalLabeling { order });
    if dedup {
        all.unique_by(|l| l.order.iter().map(|&i| b.part_sizes[i]).collect::<Vec<_>>())
            .collect()
    } else {
        all.collect()
    }
}

/// The ordered blow-up `(B(t), phi)`: part `phi.order[k]` occupies the `k`-th
/// interval, of length `t` times its size.
///
/// # Panics
/// If the labeling does not match the number of parts.
pub fn blowup(b: &Bottlegraph, labeling: &IntervalLabeling, t: usize) -> OrderedGraph {
    assert_eq!(labeling.order.len(), b.part_sizes.len(), "labeling/part count mismatch");
    assert!(t >= 1);
    let sizes: Vec<usize> = labeling.order.iter().map(|&i| t * b.part_sizes[i]).collect();
    OrderedGraph::complete_multipartite(&sizes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Construction {
    /// `|B| = h` and the blow-up with `t = 1` is itself a copy of `H`.
    Direct,
    /// `U_0` leftmost: `type_one` sets use `p` vertices of each of the first
    /// `a` parts and `r` of the last; `type_two` sets skip `U_0`, use `p` of
    /// each middle part and `p + r` of the last.
    TypeSets { c: usize, type_one: usize, type_two: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlowupTiling {
    pub t: usize,
    pub host: OrderedGraph,
    pub tiling: Tiling,
    pub construction: Construction,
}

/// Builds `(B(t), phi)` and an explicit perfect `H`-tiling of it.
pub fn constructive_blowup_tiling(
    pattern: &OrderedGraph,
    b: &Bottlegraph,
    labeling: &IntervalLabeling,
) -> Result<BlowupTiling, BottleError> {
    if bottlegraph(pattern)? != *b {
        return Err(BottleError::TemplateMismatch);
    }
    let labeling = IntervalLabeling::new(labeling.order.clone())?;
    if labeling.order.len() != b.part_sizes.len() {
        return Err(BottleError::InvalidLabeling(labeling.order));
    }
    if !b.mirrored {
        return construct(pattern, b, &labeling);
    }
    // Tile the mirror image with the mirror pattern, then reflect back.
    let working = construct(&pattern.mirror(), b, &labeling.reversed())?;
    let n = working.host.n();
    let mut blocks: Vec<Embedding> = working
        .tiling
        .blocks
        .iter()
        .map(|blk| Embedding::new(blk.image.iter().rev().map(|&v| n + 1 - v).collect()))
        .collect();
    blocks.sort_by_key(|blk| blk.image[0]);
    Ok(BlowupTiling {
        t: working.t,
        host: working.host.mirror(),
        tiling: Tiling { blocks },
        construction: working.construction,
    })
}

fn construct(
    pattern: &OrderedGraph,
    b: &Bottlegraph,
    labeling: &IntervalLabeling,
) -> Result<BlowupTiling, BottleError> {
    match (b.branch, b.u0()) {
        (Branch::NoPropA { p, r, a }, Some(u0)) if labeling.order[0] == u0 => {
            let c = p.lcm(&r);
            let t = c / r;
            let host = blowup(b, labeling, t);
            let type_one = c / p;
            let type_two = c / r - c / p;

            // Consecutive intervals: U'_0 first, then U'_1..U'_a in labeling order.
            let mut next_free = Vec::with_capacity(a + 1);
            let mut start = 1;
            for &part in &labeling.order {
                next_free.push(start);
                start += t * b.part_sizes[part];
            }
            let mut take = |pos: usize, count: usize, block: &mut Vec<usize>| {
                block.extend(next_free[pos]..next_free[pos] + count);
                next_free[pos] += count;
            };

            let mut blocks = Vec::with_capacity(t);
            for _ in 0..type_one {
                let mut block = Vec::with_capacity(p * a + r);
                for pos in 0..a {
                    take(pos, p, &mut block);
                }
                take(a, r, &mut block);
                blocks.push(Embedding::new(block));
            }
            for _ in 0..type_two {
                let mut block = Vec::with_capacity(p * a + r);
                for pos in 1..a {
                    take(pos, p, &mut block);
                }
                take(a, p + r, &mut block);
                blocks.push(Embedding::new(block));
            }
            Ok(BlowupTiling {
                t,
                host,
                tiling: Tiling { blocks },
                construction: Construction::TypeSets { c, type_one, type_two },
            })
        }
        _ => {
            let host = blowup(b, labeling, 1);
            let copy = find_embedding(&host, pattern).ok_or(BottleError::NoCopy { t: 1 })?;
            Ok(BlowupTiling {
                t: 1,
                host,
                tiling: Tiling { blocks: vec![copy] },
                construction: Construction::Direct,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::embed::{perfect_tiling, verify_tiling};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn bottlegraph_examples() {
        let b = bottlegraph(&catalog::p213()).unwrap();
        assert_eq!(b.branch, Branch::NoPropA { p: 1, r: 0, a: 3 });
        assert_eq!(b.part_sizes, vec![1, 1, 1]);
        assert_eq!(b.chi_cr(), r(3, 1));
        assert!(!b.mirrored);

        let b = bottlegraph(&catalog::p_b23()).unwrap();
        assert_eq!(b.branch, Branch::NoPropA { p: 2, r: 1, a: 2 });
        assert_eq!(b.part_sizes, vec![1, 2, 2]);
        assert_eq!(b.chi_cr(), r(5, 2));

        let b = bottlegraph(&catalog::p_a14()).unwrap();
        assert_eq!(b.branch, Branch::PropA { p: 3, r: 1 });
        assert_eq!(b.part_sizes, vec![1, 3]);
        assert_eq!(b.chi_cr(), r(4, 3));
    }

    #[test]
    fn bottlegraph_mirrors_when_right_end_is_smaller() {
        // 1 2 3 4 5 with edge 34: alpha+_1 = 3, h - alpha-_1 + 1 = 2.
        let pattern = OrderedGraph::from_edges(5, [(3, 4)]).unwrap();
        let b = bottlegraph(&pattern).unwrap();
        assert!(b.mirrored);
        assert_eq!(b.branch, Branch::NoPropA { p: 2, r: 1, a: 2 });
        for labeling in interval_labelings(&b, false) {
            let out = constructive_blowup_tiling(&pattern, &b, &labeling).unwrap();
            assert_eq!(out.host, blowup(&b, &labeling, out.t));
            assert!(verify_tiling(&out.host, &pattern, &out.tiling), "{labeling:?}");
        }
    }

    #[test]
    fn bottlegraph_rejects_other_chi() {
        assert_eq!(bottlegraph(&OrderedGraph::empty(3)), Err(BottleError::ChiLtNotTwo(1)));
        assert_eq!(
            bottlegraph(&OrderedGraph::complete(3)),
            Err(BottleError::ChiLtNotTwo(3))
        );
    }

    #[test]
    fn chi_cr_examples() {
        assert_eq!(chi_cr(&[1, 1, 1]), Ok(r(3, 1)));
        assert_eq!(chi_cr(&[1, 3]), Ok(r(4, 3)));
        for t in 1..6 {
            assert_eq!(chi_cr(&[t, t]), Ok(r(2, 1)));
        }
        assert_eq!(chi_cr(&[4]), Err(BottleError::TooFewParts));
    }

    #[test]
    fn labeling_counts() {
        let b13 = bottlegraph(&catalog::p_a14()).unwrap();
        assert_eq!(interval_labelings(&b13, false).len(), 2);
        let b122 = bottlegraph(&catalog::p_b23()).unwrap();
        assert_eq!(interval_labelings(&b122, false).len(), 6);
        assert_eq!(interval_labelings(&b122, true).len(), 3);
        let b111 = bottlegraph(&catalog::p213()).unwrap();
        assert_eq!(interval_labelings(&b111, false).len(), 6);
        assert_eq!(interval_labelings(&b111, true).len(), 1);
    }

    #[test]
    fn blowup_layouts() {
        let b111 = bottlegraph(&catalog::p213()).unwrap();
        assert_eq!(
            blowup(&b111, &IntervalLabeling::new(vec![2, 0, 1]).unwrap(), 1),
            OrderedGraph::complete(3)
        );

        let b122 = bottlegraph(&catalog::p_b23()).unwrap();
        let g = blowup(&b122, &IntervalLabeling::identity(3), 2);
        assert_eq!(g, OrderedGraph::complete_multipartite(&[2, 4, 4]));
        assert!(g.is_independent(1, 2) && g.is_independent(3, 6) && g.is_independent(7, 10));

        let b13 = bottlegraph(&catalog::p_a14()).unwrap();
        let g = blowup(&b13, &IntervalLabeling::new(vec![1, 0]).unwrap(), 1);
        assert_eq!(g, OrderedGraph::complete_multipartite(&[3, 1]));
    }

    #[test]
    fn labeling_validation() {
        assert!(IntervalLabeling::new(vec![0, 0]).is_err());
        assert!(IntervalLabeling::new(vec![0, 2]).is_err());
        let b = bottlegraph(&catalog::p_a14()).unwrap();
        let bad = IntervalLabeling { order: vec![0, 1, 2] };
        assert!(constructive_blowup_tiling(&catalog::p_a14(), &b, &bad).is_err());
        let other = bottlegraph(&catalog::p213()).unwrap();
        assert_eq!(
            constructive_blowup_tiling(&catalog::p_a14(), &other, &IntervalLabeling::identity(3)),
            Err(BottleError::TemplateMismatch)
        );
    }

    #[test]
    fn k3_template_direct() {
        let pattern = catalog::p213();
        let b = bottlegraph(&pattern).unwrap();
        for labeling in interval_labelings(&b, false) {
            let out = constructive_blowup_tiling(&pattern, &b, &labeling).unwrap();
            assert_eq!(out.t, 1);
            assert_eq!(out.tiling.blocks.len(), 1);
            assert_eq!(out.construction, Construction::Direct);
        }
    }

    #[test]
    fn b23_type_sets() {
        let pattern = catalog::p_b23();
        let b = bottlegraph(&pattern).unwrap();
        let out = constructive_blowup_tiling(&pattern, &b, &IntervalLabeling::identity(3)).unwrap();
        assert_eq!(out.t, 2);
        assert_eq!(
            out.construction,
            Construction::TypeSets {
                c: 2,
                type_one: 1,
                type_two: 1
            }
        );
        // U'_0 = [1,2], U'_1 = [3,6], U'_2 = [7,10]
        assert_eq!(out.tiling.blocks[0].image, vec![1, 2, 3, 4, 7]);
        assert_eq!(out.tiling.blocks[1].image, vec![5, 6, 8, 9, 10]);
        assert!(verify_tiling(&out.host, &pattern, &out.tiling));
    }

    #[test]
    fn a14_both_labelings_direct() {
        let pattern = catalog::p_a14();
        let b = bottlegraph(&pattern).unwrap();
        for labeling in interval_labelings(&b, false) {
            let out = constructive_blowup_tiling(&pattern, &b, &labeling).unwrap();
            assert_eq!(out.t, 1);
            assert_eq!(out.tiling.blocks.len(), 1);
            assert!(verify_tiling(&out.host, &pattern, &out.tiling));
        }
    }

    #[test]
    fn type_set_accounting_closed_form() {
        for p in 2..8usize {
            for rr in 1..p {
                let c = p.lcm(&rr);
                let t = c / rr;
                let (one, two) = (c / p, c / rr - c / p);
                assert_eq!(one * p, t * rr, "U'_0");
                assert_eq!(one * p + two * p, t * p, "middle parts");
                assert_eq!(one * rr + two * (p + rr), c * p / rr, "U'_a");
                assert_eq!(one + two, t);
            }
        }
    }

    #[test]
    fn catalog_blowups_tile_for_every_labeling() {
        for (name, pattern) in catalog::default_catalog() {
            let b = bottlegraph(&pattern).unwrap();
            let a = compute_profile(&pattern).alpha_star().unwrap();
            assert_eq!(b.chi_cr(), a.recip(), "{name}");
            for labeling in interval_labelings(&b, false) {
                let out = constructive_blowup_tiling(&pattern, &b, &labeling).unwrap();
                assert!(verify_tiling(&out.host, &pattern, &out.tiling), "{name} {labeling:?}");
                if out.host.n() <= 18 {
                    assert!(perfect_tiling(&out.host, &pattern).is_tiling(), "{name} {labeling:?}");
                }
            }
        }
    }
}
