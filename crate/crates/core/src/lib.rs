//! Perfect tilings of vertex-ordered graphs.
//!
//! The crate computes the parameters that govern minimum-degree thresholds for
//! perfect `H`-tilings of ordered graphs (interval chromatic number, the
//! `alpha` sequences, `alpha*`, Properties A/B/C), builds the extremal
//! constructions that block perfect tilings, builds bottlegraphs and their
//! ordered blow-ups together with explicit tilings, and decides perfect
//! tileability exactly with a backtracking oracle.

pub mod barriers;
pub mod bottle;
pub mod catalog;
pub mod crop;
pub mod embed;
pub mod graph;
pub mod probe;
pub mod profile;
pub mod suite;

/// Exact rational used for `alpha*`, threshold coefficients and `chi_cr`.
pub type Rational = num_rational::Ratio<i64>;

pub use graph::{GraphError, OrderedGraph};
pub use profile::{compute_profile, Case, PatternProfile};

pub(crate) mod ratio_serde {
    use serde::Serializer;

    use crate::{format_ratio, Rational};

    pub fn one<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(r))
    }

    pub fn opt<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => one(r, s),
            None => s.serialize_none(),
        }
    }
}

/// Formats a rational as `"p/q"`, including when `q == 1`.
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
