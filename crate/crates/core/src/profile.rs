//! Pattern parameters: interval chromatic number, the greedy interval
//! sequences from both ends, `alpha*`, Properties A/B/C and the threshold case
//! for patterns with interval chromatic number 2.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::OrderedGraph;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("alpha* is undefined for patterns with interval chromatic number 1")]
    AlphaStarUndefined,
}

/// The four cases of the threshold classification for `chi_<(H) = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    /// No Property A; threshold `1 - alpha*`.
    I,
    /// Properties A and B; threshold `1/2`.
    II,
    /// Property A, not B, an endpoint with Property C; threshold `1/2`.
    III,
    /// Property A, not B, no endpoint with Property C; threshold `1 - alpha*`.
    IV,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternProfile {
    pub h: usize,
    pub chi_lt: usize,
    /// `alpha_plus[i - 1]` is the `i`-th right end of the left-to-right sweep.
    pub alpha_plus: Vec<usize>,
    /// `alpha_minus[i - 1]` is the `i`-th left end of the right-to-left sweep.
    pub alpha_minus: Vec<usize>,
    /// `None` when `chi_lt == 1`; see [`PatternProfile::alpha_star`].
    #[serde(serialize_with = "crate::ratio_serde::opt")]
    alpha_star: Option<Rational>,
    /// Smallest neighbour of `h`, or 0 when `h` is isolated.
    pub s: usize,
    /// Largest neighbour of `1`, or `h + 1` when `1` is isolated.
    pub l: usize,
    pub prop_a: bool,
    pub prop_b: bool,
    pub prop_c_first: bool,
    pub prop_c_last: bool,
    /// Set exactly when `chi_lt == 2`.
    pub case: Option<Case>,
    /// Coefficient `c` in `delta_<(H, n) = (c + o(1)) n`; set exactly when `chi_lt == 2`.
    #[serde(serialize_with = "crate::ratio_serde::opt")]
    pub threshold_coeff: Option<Rational>,
    /// `1 - alpha*`, the space-barrier lower bound, whenever `alpha*` exists.
    #[serde(serialize_with = "crate::ratio_serde::opt")]
    pub lower_bound_coeff: Option<Rational>,
}

impl PatternProfile {
    pub fn alpha_star(&self) -> Result<Rational, ProfileError> {
        self.alpha_star.ok_or(ProfileError::AlphaStarUndefined)
    }

    pub fn is_classified(&self) -> bool {
        self.case.is_some()
    }
}

/// Left-to-right sweep of maximal independent intervals. The last entry is
/// always `h` and the length is `chi_<(H)`.
pub fn alpha_plus_seq(pattern: &OrderedGraph) -> Vec<usize> {
    let h = pattern.n();
    let mut seq = Vec::new();
    let mut prev = 0;
    while prev < h {
        let start = prev + 1;
        let mut end = start;
        // [start, end + 1] stays independent iff end + 1 has no neighbour in [start, end].
        while end < h && pattern.neighbors(end + 1).ones().all(|u| u < start || u > end) {
            end += 1;
        }
        seq.push(end);
        prev = end;
    }
    seq
}

/// Right-to-left sweep; the last entry is always `1`.
pub fn alpha_minus_seq(pattern: &OrderedGraph) -> Vec<usize> {
    let h = pattern.n();
    let mut seq = Vec::new();
    let mut prev = h + 1;
    while prev > 1 {
        let end = prev - 1;
        let mut start = end;
        while start > 1 && pattern.neighbors(start - 1).ones().all(|u| u < start || u > end) {
            start -= 1;
        }
        seq.push(start);
        prev = start;
    }
    seq
}

pub fn interval_chromatic_number(pattern: &OrderedGraph) -> usize {
    alpha_plus_seq(pattern).len()
}

/// Minimum number of independent intervals by trying all `2^(h-1)`
/// compositions of `[h]`. Exponential; meant as a cross-check for small `h`.
pub fn interval_chromatic_number_exhaustive(pattern: &OrderedGraph) -> usize {
    let h = pattern.n();
    (0u64..1 << (h - 1))
        .filter_map(|mask| {
            // bit i set: cut between i + 1 and i + 2
            let mut start = 1;
            let mut parts = 0;
            for i in 1..=h {
                if i == h || mask & (1 << (i - 1)) != 0 {
                    if !pattern.is_independent(start, i) {
                        return None;
                    }
                    parts += 1;
                    start = i + 1;
                }
            }
            Some(parts)
        })
        .min()
        .expect("singleton intervals are always independent")
}

fn alpha_star_from(h: usize, plus: &[usize], minus: &[usize]) -> Option<Rational> {
    let chi = plus.len();
    (1..chi)
        .flat_map(|ell| {
            let denom = (ell * h) as i64;
            [
                Rational::new(plus[ell - 1] as i64, denom),
                Rational::new((h + 1 - minus[ell - 1]) as i64, denom),
            ]
        })
        .min()
}

pub fn alpha_star(pattern: &OrderedGraph) -> Result<Rational, ProfileError> {
    let plus = alpha_plus_seq(pattern);
    let minus = alpha_minus_seq(pattern);
    alpha_star_from(pattern.n(), &plus, &minus).ok_or(ProfileError::AlphaStarUndefined)
}

/// No edges inside `[1, floor(h/2) + 1]` nor inside `[ceil(h/2), h]`.
pub fn has_property_a(pattern: &OrderedGraph) -> bool {
    let h = pattern.n();
    pattern.is_independent(1, (h / 2 + 1).min(h)) && pattern.is_independent(h.div_ceil(2), h)
}

/// Every split `[1, i] | [i + 1, h]` is crossed by an edge.
pub fn has_property_b(pattern: &OrderedGraph) -> bool {
    (1..pattern.n()).all(|i| pattern.crosses_cut(i))
}

pub fn compute_profile(pattern: &OrderedGraph) -> PatternProfile {
    let h = pattern.n();
    let alpha_plus = alpha_plus_seq(pattern);
    let alpha_minus = alpha_minus_seq(pattern);
    let chi_lt = alpha_plus.len();
    debug_assert_eq!(alpha_minus.len(), chi_lt);
    let alpha_star = alpha_star_from(h, &alpha_plus, &alpha_minus);

    let s = pattern.neighbors(h).ones().next().unwrap_or(0);
    let l = pattern.neighbors(1).ones().next_back().unwrap_or(h + 1);
    let prop_a = has_property_a(pattern);
    let prop_b = has_property_b(pattern);
    // An edge inside [s, h-1], resp. [2, l]; an interval has an edge iff it is not independent.
    let prop_c_last = s >= 1 && !pattern.is_independent(s, h - 1);
    let prop_c_first = l <= h && !pattern.is_independent(2, l);

    let one = Rational::from_integer(1);
    let half = Rational::new(1, 2);
    let (case, threshold_coeff) = match (chi_lt, alpha_star) {
        (2, Some(a)) => {
            let case = if !prop_a {
                Case::I
            } else if prop_b {
                Case::II
            } else if prop_c_first || prop_c_last {
                Case::III
            } else {
                Case::IV
            };
            let coeff = match case {
                Case::I | Case::IV => one - a,
                Case::II | Case::III => half,
            };
            (Some(case), Some(coeff))
        }
        _ => (None, None),
    };

    PatternProfile {
        h,
        chi_lt,
        alpha_plus,
        alpha_minus,
        alpha_star,
        s,
        l,
        prop_a,
        prop_b,
        prop_c_first,
        prop_c_last,
        case,
        threshold_coeff,
        lower_bound_coeff: alpha_star.map(|a| one - a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn g(n: usize, edges: &[(usize, usize)]) -> OrderedGraph {
        OrderedGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn alpha_sequences() {
        assert_eq!(alpha_plus_seq(&catalog::p213()), vec![1, 3]);
        assert_eq!(alpha_minus_seq(&catalog::p213()), vec![2, 1]);
        assert_eq!(alpha_plus_seq(&OrderedGraph::empty(5)), vec![5]);
        assert_eq!(alpha_minus_seq(&OrderedGraph::empty(5)), vec![1]);
        assert_eq!(alpha_plus_seq(&catalog::p_c6()), vec![4, 6]);
        assert_eq!(alpha_minus_seq(&catalog::p_c6()), vec![3, 1]);
        assert_eq!(alpha_plus_seq(&OrderedGraph::complete(4)), vec![1, 2, 3, 4]);
    }

    #[test]
    fn profile_213() {
        let p = compute_profile(&catalog::p213());
        assert_eq!(p.chi_lt, 2);
        assert_eq!(p.alpha_star(), Ok(r(1, 3)));
        assert!(!p.prop_a);
        assert_eq!(p.case, Some(Case::I));
        assert_eq!(p.threshold_coeff, Some(r(2, 3)));
    }

    #[test]
    fn profile_a14() {
        let p = compute_profile(&catalog::p_a14());
        assert_eq!(p.alpha_star(), Ok(r(3, 4)));
        assert!(p.prop_a && p.prop_b);
        assert_eq!(p.case, Some(Case::II));
        assert_eq!(p.threshold_coeff, Some(r(1, 2)));
        assert!(!p.prop_c_first && !p.prop_c_last);
    }

    #[test]
    fn profile_c6() {
        let p = compute_profile(&catalog::p_c6());
        assert_eq!(p.alpha_star(), Ok(r(2, 3)));
        assert!(p.prop_a && !p.prop_b);
        assert_eq!((p.s, p.l), (0, 5));
        assert!(p.prop_c_first);
        assert!(!p.prop_c_last);
        assert_eq!(p.case, Some(Case::III));
        assert_eq!(p.threshold_coeff, Some(r(1, 2)));
    }

    #[test]
    fn profile_d6() {
        let p = compute_profile(&catalog::p_d6());
        assert_eq!(p.alpha_star(), Ok(r(2, 3)));
        assert!(p.prop_a && !p.prop_b);
        assert_eq!((p.s, p.l), (0, 7));
        assert!(!p.prop_c_first && !p.prop_c_last);
        assert_eq!(p.case, Some(Case::IV));
        assert_eq!(p.threshold_coeff, Some(r(1, 3)));
    }

    #[test]
    fn profile_k2_and_b23() {
        let k2 = compute_profile(&catalog::k2());
        assert_eq!(k2.alpha_star(), Ok(r(1, 2)));
        assert_eq!(k2.case, Some(Case::I));
        assert_eq!(k2.threshold_coeff, Some(r(1, 2)));
        let b23 = compute_profile(&catalog::p_b23());
        assert_eq!(b23.alpha_star(), Ok(r(2, 5)));
        assert_eq!(b23.case, Some(Case::I));
        assert_eq!(b23.threshold_coeff, Some(r(3, 5)));
    }

    #[test]
    fn edgeless_pattern_is_unclassified() {
        let p = compute_profile(&OrderedGraph::empty(4));
        assert_eq!(p.chi_lt, 1);
        assert_eq!(p.alpha_star(), Err(ProfileError::AlphaStarUndefined));
        assert_eq!(
            alpha_star(&OrderedGraph::empty(4)),
            Err(ProfileError::AlphaStarUndefined)
        );
        assert_eq!(p.case, None);
        assert_eq!(p.threshold_coeff, None);
        assert_eq!(p.lower_bound_coeff, None);
    }

    #[test]
    fn chi_three_reports_lower_bound_only() {
        // path 1-2-3: chi_< = 3
        let p = compute_profile(&g(3, &[(1, 2), (2, 3)]));
        assert_eq!(p.chi_lt, 3);
        assert_eq!(p.case, None);
        assert_eq!(p.alpha_star(), Ok(r(1, 3)));
        assert_eq!(p.lower_bound_coeff, Some(r(2, 3)));
    }

    #[test]
    fn isolated_endpoint_conventions() {
        // 1 isolated, h adjacent to 2
        let p = compute_profile(&g(4, &[(2, 4)]));
        assert_eq!((p.s, p.l), (2, 5));
        assert!(!p.prop_c_first);
        // [2, 3] has no edge
        assert!(!p.prop_c_last);
        let q = compute_profile(&g(4, &[(2, 4), (2, 3)]));
        assert!(q.prop_c_last);
    }

    fn arb_pattern(max_h: usize) -> impl Strategy<Value = OrderedGraph> {
        (1..=max_h).prop_flat_map(|h| {
            proptest::collection::vec(any::<bool>(), h * (h - 1) / 2).prop_map(move |bits| {
                let mut g = OrderedGraph::empty(h);
                let mut k = 0;
                for i in 1..=h {
                    for j in i + 1..=h {
                        if bits[k] {
                            g.insert_edge(i, j);
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn mirror_duality(pattern in arb_pattern(10)) {
            let h = pattern.n();
            let m = pattern.mirror();
            let plus_m = alpha_plus_seq(&m);
            let minus = alpha_minus_seq(&pattern);
            prop_assert_eq!(plus_m.len(), minus.len());
            for (a, b) in plus_m.iter().zip(&minus) {
                prop_assert_eq!(*a, h + 1 - *b);
            }
            let p = compute_profile(&pattern);
            let q = compute_profile(&m);
            prop_assert_eq!(p.alpha_star(), q.alpha_star());
            prop_assert_eq!(p.case, q.case);
        }

        #[test]
        fn greedy_chi_matches_brute_force(pattern in arb_pattern(7)) {
            prop_assert_eq!(interval_chromatic_number(&pattern), interval_chromatic_number_exhaustive(&pattern));
        }

        #[test]
        fn sequences_are_monotone(pattern in arb_pattern(10)) {
            let h = pattern.n();
            let plus = alpha_plus_seq(&pattern);
            let minus = alpha_minus_seq(&pattern);
            prop_assert!(plus.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(plus[0] > 0);
            prop_assert_eq!(*plus.last().unwrap(), h);
            prop_assert!(minus.windows(2).all(|w| w[0] > w[1]));
            prop_assert!(minus[0] < h + 1);
            prop_assert_eq!(*minus.last().unwrap(), 1);
        }

        #[test]
        fn property_a_iff_alpha_star_above_half(pattern in arb_pattern(10)) {
            let p = compute_profile(&pattern);
            if p.chi_lt == 2 {
                let a = p.alpha_star().unwrap();
                prop_assert_eq!(p.prop_a, a > Rational::new(1, 2));
                let coeff = p.threshold_coeff.unwrap();
                prop_assert!(coeff == Rational::new(1, 2) || coeff == Rational::from_integer(1) - a);
                if coeff == Rational::new(1, 2) {
                    prop_assert!(p.prop_a || a == Rational::new(1, 2));
                }
            } else {
                prop_assert!(p.case.is_none());
            }
        }

        #[test]
        fn adjacent_endpoint_edge_forces_alpha_star_one_over_h(pattern in arb_pattern(10)) {
            let h = pattern.n();
            if h >= 2 && (pattern.has_edge(1, 2) || pattern.has_edge(h - 1, h)) {
                prop_assert_eq!(alpha_star(&pattern), Ok(Rational::new(1, h as i64)));
            }
        }
    }
}
