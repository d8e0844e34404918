//! Extremal host graphs without a perfect `H`-tiling: space, divisibility and
//! local barriers.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::OrderedGraph;
use crate::profile::{alpha_plus_seq, compute_profile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarrierError {
    #[error("ell = {ell} must satisfy 1 <= ell < chi_<(H) = {chi_lt}")]
    EllOutOfRange { ell: usize, chi_lt: usize },
    #[error("pattern order h = {h} does not divide n = {n}")]
    NotDivisible { h: usize, n: usize },
    #[error("n = {n} is below the minimum {min} for this construction")]
    NTooSmall { n: usize, min: usize },
    #[error("the divisibility barrier needs a pattern with Property B")]
    PropertyBRequired,
    #[error("the local barrier needs vertex 1 or vertex h of the pattern to have Property C")]
    PropertyCRequired,
    #[error("the divisibility barrier needs a pattern on at least 2 vertices")]
    PatternTooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    First,
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BarrierKind {
    Space { ell: usize },
    Divisibility { k: usize },
    Local { endpoint: Endpoint },
}

impl fmt::Display for BarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BarrierKind::Space { ell } => write!(f, "space(ell={ell})"),
            BarrierKind::Divisibility { k } => write!(f, "divisibility(k={k})"),
            BarrierKind::Local { endpoint } => write!(f, "local(endpoint={endpoint:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarrierCertificate {
    pub kind: BarrierKind,
    pub graph: OrderedGraph,
    /// Minimum degree of `graph`, computed from the construction.
    pub claimed_min_degree: usize,
    /// The lower bound the construction is stated to meet.
    pub formula_value: i64,
    /// Built as `mirror(construction(mirror(H)))`.
    pub mirrored: bool,
}

impl BarrierCertificate {
    fn new(kind: BarrierKind, graph: OrderedGraph, formula_value: i64) -> Self {
        Self {
            kind,
            claimed_min_degree: graph.min_degree(),
            graph,
            formula_value,
            mirrored: false,
        }
    }

    fn mirror(self) -> Self {
        Self {
            graph: self.graph.mirror(),
            mirrored: !self.mirrored,
            ..self
        }
    }

    /// Comment lines for the text exchange format.
    pub fn header(&self) -> String {
        format!(
            "# barrier: {}\n# mirrored: {}\n# claimed_min_degree: {}\n# formula_value: {}\n",
            self.kind, self.mirrored, self.claimed_min_degree, self.formula_value
        )
    }
}

fn check_divides(h: usize, n: usize) -> Result<(), BarrierError> {
    if n == 0 || !n.is_multiple_of(h) {
        Err(BarrierError::NotDivisible { h, n })
    } else {
        Ok(())
    }
}

/// The space barrier for `alpha+_ell`: `[s + 1]` (with `s = alpha+_ell * n / h`)
/// split into `ell` edgeless intervals, the rest a clique, all parts joined.
pub fn space_barrier(pattern: &OrderedGraph, ell: usize, n: usize) -> Result<BarrierCertificate, BarrierError> {
    let h = pattern.n();
    let plus = alpha_plus_seq(pattern);
    let chi_lt = plus.len();
    if ell == 0 || ell >= chi_lt {
        return Err(BarrierError::EllOutOfRange { ell, chi_lt });
    }
    check_divides(h, n)?;
    let alpha = plus[ell - 1];
    let s = alpha * n / h;

    // Parts A_1 < ... < A_ell of [s + 1], larger parts first; then the clique.
    let (q, rem) = ((s + 1) / ell, (s + 1) % ell);
    let mut part_of = vec![usize::MAX; n + 1];
    let mut v = 1;
    for part in 0..ell {
        let size = q + usize::from(part < rem);
        for _ in 0..size {
            part_of[v] = part;
            v += 1;
        }
    }
    let mut g = OrderedGraph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            // Same A-part: no edge. Clique vertices carry usize::MAX and are all adjacent.
            if part_of[i] != part_of[j] || part_of[i] == usize::MAX {
                g.insert_edge(i, j);
            }
        }
    }
    // floor((1 - alpha/(ell h)) n) - 1 = n - ceil(alpha n / (ell h)) - 1
    let formula = n as i64 - (alpha * n).div_ceil(ell * h) as i64 - 1;
    Ok(BarrierCertificate::new(BarrierKind::Space { ell }, g, formula))
}

/// The space barrier for the reversed sequence `alpha-_ell`.
pub fn space_barrier_mirrored(
    pattern: &OrderedGraph,
    ell: usize,
    n: usize,
) -> Result<BarrierCertificate, BarrierError> {
    space_barrier(&pattern.mirror(), ell, n).map(BarrierCertificate::mirror)
}

/// Two disjoint cliques on `[k]` and `[k + 1, n]`, where `k` is the largest
/// integer `<= ceil(n/2)` not divisible by `h`.
pub fn divisibility_barrier(pattern: &OrderedGraph, n: usize) -> Result<BarrierCertificate, BarrierError> {
    let h = pattern.n();
    if h < 2 {
        return Err(BarrierError::PatternTooSmall);
    }
    if !compute_profile(pattern).prop_b {
        return Err(BarrierError::PropertyBRequired);
    }
    check_divides(h, n)?;
    if n < 2 * h {
        return Err(BarrierError::NTooSmall { n, min: 2 * h });
    }
    let half = n.div_ceil(2);
    let k = (1..=half)
        .rev()
        .find(|k| k % h != 0)
        .expect("h >= 2 leaves a non-multiple");
    let mut g = OrderedGraph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            if (j <= k) == (i <= k) {
                g.insert_edge(i, j);
            }
        }
    }
    let formula = (n / 2) as i64 - 2;
    Ok(BarrierCertificate::new(BarrierKind::Divisibility { k }, g, formula))
}

/// Edgeless `[1, ceil(n/2) - 1]` joined to edgeless `[ceil(n/2), n - 1]`, plus
/// vertex `n` adjacent to exactly the second interval. Built directly when
/// vertex `h` has Property C, otherwise as the mirror image.
pub fn local_barrier(pattern: &OrderedGraph, n: usize) -> Result<BarrierCertificate, BarrierError> {
    let h = pattern.n();
    let profile = compute_profile(pattern);
    let endpoint = if profile.prop_c_last {
        Endpoint::Last
    } else if profile.prop_c_first {
        Endpoint::First
    } else {
        return Err(BarrierError::PropertyCRequired);
    };
    check_divides(h, n)?;
    if n < 2 * h {
        return Err(BarrierError::NTooSmall { n, min: 2 * h });
    }
    let mid = n.div_ceil(2);
    let mut g = OrderedGraph::empty(n);
    for i in 1..mid {
        for j in mid..n {
            g.insert_edge(i, j);
        }
    }
    for j in mid..n {
        g.insert_edge(j, n);
    }
    let cert = BarrierCertificate::new(BarrierKind::Local { endpoint }, g, (n / 2) as i64);
    Ok(match endpoint {
        Endpoint::Last => cert,
        Endpoint::First => cert.mirror(),
    })
}
