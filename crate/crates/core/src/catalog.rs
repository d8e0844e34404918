//! The shipped pattern catalog: one pattern per classification case, plus
//! `K_2` and a pattern whose bottlegraph has a non-empty `U_0` part.

use crate::graph::OrderedGraph;

pub const K2: &str = include_str!("../catalog/k2.txt");
pub const P213: &str = include_str!("../catalog/p213.txt");
pub const P_A14: &str = include_str!("../catalog/p_a14.txt");
pub const P_B23: &str = include_str!("../catalog/p_b23.txt");
pub const P_C6: &str = include_str!("../catalog/p_c6.txt");
pub const P_D6: &str = include_str!("../catalog/p_d6.txt");

fn load(text: &str) -> OrderedGraph {
    OrderedGraph::parse(text).expect("catalog fixture parses")
}

pub fn k2() -> OrderedGraph {
    load(K2)
}

/// The ordered path 2-1-3.
pub fn p213() -> OrderedGraph {
    load(P213)
}

pub fn p_a14() -> OrderedGraph {
    load(P_A14)
}

pub fn p_b23() -> OrderedGraph {
    load(P_B23)
}

pub fn p_c6() -> OrderedGraph {
    load(P_C6)
}

/// Mirror of [`p_c6`]; here the last vertex carries Property C.
pub fn p_c6m() -> OrderedGraph {
    p_c6().mirror()
}

pub fn p_d6() -> OrderedGraph {
    load(P_D6)
}

/// `(name, pattern)` pairs in a fixed order.
pub fn default_catalog() -> Vec<(String, OrderedGraph)> {
    [
        ("K2", K2),
        ("213", P213),
        ("P_A14", P_A14),
        ("P_B23", P_B23),
        ("P_C6", P_C6),
        ("P_D6", P_D6),
    ]
    .into_iter()
    .map(|(name, text)| (name.to_string(), load(text)))
    .collect()
}
