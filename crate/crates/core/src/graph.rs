//! Vertex-ordered graphs on `[n] = {1, ..., n}`.
//!
//! Labels are 1-based everywhere in the public API. Adjacency is kept as one
//! bit set per vertex (bit `0` is never set), so neighbourhood intersections in
//! the embedding engine are word-level operations.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: endpoint {vertex} out of range 1..={n}")]
    OutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: edge {i} {j} must satisfy i < j")]
    NotIncreasing { line: usize, i: usize, j: usize },
    #[error("line {line}: duplicate edge {i} {j}")]
    DuplicateEdge { line: usize, i: usize, j: usize },
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("invalid JSON graph: {0}")]
    Json(String),
}

/// An ordered graph on `[n]`; the vertex order is the order of the labels.
#[derive(Clone, PartialEq, Eq)]
pub struct OrderedGraph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl OrderedGraph {
    /// The edgeless graph on `[n]`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "ordered graphs have at least one vertex");
        Self {
            n,
            adj: vec![FixedBitSet::with_capacity(n + 1); n + 1],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..=n {
            for j in i + 1..=n {
                g.insert_edge(i, j);
            }
        }
        g
    }

    /// Builds a graph from 1-based edge pairs. Pairs may be given in either
    /// orientation; loops, out-of-range endpoints and repeats are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut g = Self::empty(n);
        for (k, (a, b)) in edges.into_iter().enumerate() {
            let (i, j) = (a.min(b), a.max(b));
            let line = k + 1;
            if i == 0 || j > n {
                let vertex = if i == 0 { i } else { j };
                return Err(GraphError::OutOfRange { line, vertex, n });
            }
            if i == j {
                return Err(GraphError::NotIncreasing { line, i: a, j: b });
            }
            if g.has_edge(i, j) {
                return Err(GraphError::DuplicateEdge { line, i, j });
            }
            g.insert_edge(i, j);
        }
        Ok(g)
    }

    /// Complete multipartite ordered graph whose parts are consecutive
    /// intervals of the given sizes, left to right. Zero sizes are skipped.
    pub fn complete_multipartite(part_sizes: &[usize]) -> Self {
        let n: usize = part_sizes.iter().sum();
        let mut g = Self::empty(n);
        let mut part_of = Vec::with_capacity(n + 1);
        part_of.push(usize::MAX);
        for (idx, &size) in part_sizes.iter().enumerate() {
            part_of.extend(std::iter::repeat_n(idx, size));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                if part_of[i] != part_of[j] {
                    g.insert_edge(i, j);
                }
            }
        }
        g
    }

    pub(crate) fn insert_edge(&mut self, i: usize, j: usize) {
        debug_assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    /// Copy of this graph with the edge `{i, j}` added.
    pub fn with_edge(&self, i: usize, j: usize) -> Self {
        assert!(i != j && (1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        let mut g = self.clone();
        g.insert_edge(i, j);
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i <= self.n && j <= self.n && self.adj[i].contains(j)
    }

    /// Neighbourhood of `v` as a bit set indexed by label (capacity `n + 1`).
    #[inline]
    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n).flat_map(move |i| self.adj[i].ones().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn min_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (1..=self.n).map(|v| self.degree(v)).collect()
    }

    /// Relabels `i` as `n + 1 - i`.
    pub fn mirror(&self) -> Self {
        let n = self.n;
        let mut g = Self::empty(n);
        for (i, j) in self.edges() {
            g.insert_edge(n + 1 - j, n + 1 - i);
        }
        g
    }

    /// Whether the interval `[a, b]` spans no edge. Empty intervals (`a > b`)
    /// are independent.
    pub fn is_independent(&self, a: usize, b: usize) -> bool {
        if a > b {
            return true;
        }
        debug_assert!(a >= 1 && b <= self.n);
        (a..=b).all(|v| self.adj[v].ones().all(|u| u < a || u > b))
    }

    /// Whether some edge has one endpoint in `[1, i]` and the other in `[i+1, n]`.
    pub fn crosses_cut(&self, i: usize) -> bool {
        (1..=i).any(|v| self.adj[v].ones().any(|u| u > i))
    }

    /// The subgraph induced by `vertices`, relabelled `1..=k` in increasing
    /// order of the original labels.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut g = Self::empty(sorted.len());
        for (a, &u) in sorted.iter().enumerate() {
            for (b, &v) in sorted.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.insert_edge(a + 1, b + 1);
                }
            }
        }
        g
    }

    /// Canonical exchange text: `"n m"` then one `"i j"` line per edge, sorted.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count());
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// Parses the exchange text format. Blank lines and lines starting with
    /// `#` are ignored; line numbers in errors refer to the raw input.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header \"n m\"".into(),
        })?;
        let (n, m) = parse_pair(hline, header, "header")?;
        if n == 0 {
            return Err(GraphError::NoVertices);
        }

        let mut g = Self::empty(n);
        let mut seen = 0usize;
        for (line, body) in lines {
            let (i, j) = parse_pair(line, body, "edge")?;
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(GraphError::OutOfRange { line, vertex: v, n });
                }
            }
            if i >= j {
                return Err(GraphError::NotIncreasing { line, i, j });
            }
            if g.has_edge(i, j) {
                return Err(GraphError::DuplicateEdge { line, i, j });
            }
            g.insert_edge(i, j);
            seen += 1;
        }
        if seen != m {
            return Err(GraphError::Parse {
                line: hline,
                message: format!("header declares {m} edges but {seen} were given"),
            });
        }
        Ok(g)
    }

    /// `{"n": .., "edges": [[i, j], ..]}` with edges in canonical order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&JsonGraph::from(self)).expect("graph serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(JsonGraph::from(self)).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: JsonGraph = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        raw.try_into()
    }

    /// Accepts either the text format or the JSON form, decided by the first
    /// non-blank character.
    pub fn parse_any(text: &str) -> Result<Self, GraphError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse(text)
        }
    }
}

fn parse_pair(line: usize, body: &str, what: &str) -> Result<(usize, usize), GraphError> {
    let mut it = body.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| GraphError::Parse {
            line,
            message: format!("{what} needs two integers"),
        })?;
        tok.parse().map_err(|_| GraphError::Parse {
            line,
            message: format!("{what}: '{tok}' is not a non-negative integer"),
        })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(GraphError::Parse {
            line,
            message: format!("{what} has trailing tokens"),
        });
    }
    Ok((a, b))
}

impl FromStr for OrderedGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(i, j)| format!("{i}{j}")).collect();
        write!(f, "OrderedGraph(n={}, edges={{{}}})", self.n, edges.join(","))
    }
}

/// JSON mirror of the text format: `{"n": .., "edges": [[i, j], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonGraph {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Serialize for OrderedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        JsonGraph::from(self).serialize(s)
    }
}

impl From<&OrderedGraph> for JsonGraph {
    fn from(g: &OrderedGraph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl TryFrom<JsonGraph> for OrderedGraph {
    type Error = GraphError;

    fn try_from(raw: JsonGraph) -> Result<Self, Self::Error> {
        if raw.n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut g = OrderedGraph::empty(raw.n);
        for (k, [i, j]) in raw.edges.into_iter().enumerate() {
            // JSON edges are numbered from 1 in error messages.
            let line = k + 1;
            for v in [i, j] {
                if v == 0 || v > raw.n {
                    return Err(GraphError::OutOfRange {
                        line,
                        vertex: v,
                        n: raw.n,
                    });
                }
            }
            if i >= j {
                return Err(GraphError::NotIncreasing { line, i, j });
            }
            if g.has_edge(i, j) {
                return Err(GraphError::DuplicateEdge { line, i, j });
            }
            g.insert_edge(i, j);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> OrderedGraph {
        OrderedGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn parses_small_graphs() {
        let p = OrderedGraph::parse("3 2\n1 2\n1 3").unwrap();
        assert_eq!(p, g(3, &[(1, 2), (1, 3)]));
        let e = OrderedGraph::parse("2 0").unwrap();
        assert_eq!(e.n(), 2);
        assert_eq!(e.edge_count(), 0);
    }

    #[test]
    fn edge_order_in_input_is_irrelevant() {
        let a = OrderedGraph::parse("4 3\n2 4\n1 3\n1 2\n").unwrap();
        let b = OrderedGraph::parse("4 3\n1 2\n1 3\n2 4\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), "4 3\n1 2\n1 3\n2 4\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            OrderedGraph::parse("4 1\n4 1"),
            Err(GraphError::NotIncreasing { line: 2, i: 4, j: 1 })
        );
        assert_eq!(
            OrderedGraph::parse("3 1\n1 4"),
            Err(GraphError::OutOfRange {
                line: 2,
                vertex: 4,
                n: 3
            })
        );
        assert_eq!(
            OrderedGraph::parse("3 2\n1 2\n1 2"),
            Err(GraphError::DuplicateEdge { line: 3, i: 1, j: 2 })
        );
        assert!(matches!(
            OrderedGraph::parse("x 1"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            OrderedGraph::parse("3 2\n1 2"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            OrderedGraph::parse("3 1\n1 2 3"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert_eq!(OrderedGraph::parse("0 0"), Err(GraphError::NoVertices));
        assert!(matches!(OrderedGraph::parse(""), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn comments_are_skipped() {
        let text = "# kind: space\n3 1\n# note\n1 3\n";
        assert_eq!(OrderedGraph::parse(text).unwrap(), g(3, &[(1, 3)]));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = g(6, &[(1, 5), (2, 5)]);
        let text = p.to_json();
        assert_eq!(text, r#"{"n":6,"edges":[[1,5],[2,5]]}"#);
        assert_eq!(OrderedGraph::parse_any(&text).unwrap(), p);
        assert!(OrderedGraph::from_json(r#"{"n":3,"edges":[[3,1]]}"#).is_err());
        assert!(OrderedGraph::from_json(r#"{"n":3,"edges":[[1,2],[1,2]]}"#).is_err());
    }

    #[test]
    fn mirror_relabels() {
        assert_eq!(g(6, &[(1, 5), (2, 5)]).mirror(), g(6, &[(2, 6), (2, 5)]));
        let k2 = g(2, &[(1, 2)]);
        assert_eq!(k2.mirror(), k2);
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(OrderedGraph::complete(4).min_degree(), 3);
        assert_eq!(OrderedGraph::empty(5).min_degree(), 0);
    }

    #[test]
    fn complete_multipartite_layout() {
        let g = OrderedGraph::complete_multipartite(&[1, 2, 2]);
        assert_eq!(g.n(), 5);
        assert!(!g.has_edge(2, 3));
        assert!(g.has_edge(1, 2));
        assert!(g.has_edge(3, 4));
        assert!(!g.has_edge(4, 5));
        assert_eq!(g.edge_count(), 2 + 2 + 4);
    }

    #[test]
    fn induced_relabels_in_order() {
        let host = g(5, &[(1, 4), (2, 5), (4, 5)]);
        assert_eq!(host.induced(&[5, 2, 4]), g(3, &[(1, 3), (2, 3)]));
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = OrderedGraph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
                let mut g = OrderedGraph::empty(n);
                let mut k = 0;
                for i in 1..=n {
                    for j in i + 1..=n {
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
        fn text_and_json_round_trip(g in arb_graph(12)) {
            let text = g.to_text();
            let back = OrderedGraph::parse(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_text(), text);
            let json = g.to_json();
            prop_assert_eq!(OrderedGraph::from_json(&json).unwrap(), g);
        }

        #[test]
        fn mirror_is_an_involution_preserving_degrees(g in arb_graph(12)) {
            let m = g.mirror();
            prop_assert_eq!(&m.mirror(), &g);
            let mut a = g.degree_sequence();
            let mut b = m.degree_sequence();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            prop_assert_eq!(m.min_degree(), g.min_degree());
        }

        #[test]
        fn independence_matches_pair_scan(g in arb_graph(8)) {
            let n = g.n();
            for a in 1..=n {
                for b in a..=n {
                    let brute = (a..=b).all(|i| (i + 1..=b).all(|j| !g.has_edge(i, j)));
                    prop_assert_eq!(g.is_independent(a, b), brute);
                }
            }
        }
    }
}
