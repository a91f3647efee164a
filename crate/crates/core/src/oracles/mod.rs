//! Brute-force optima for small instances. These share nothing with the
//! engines and approximate solvers except the graph representation.

pub mod apsp;
pub mod facility;
pub mod matching_frontier;
pub mod steiner_forest;
pub mod steiner_tree;

pub use facility::{exact_capacitated_fl, exact_facility_location, CapacitatedSolution, FacilitySolution};
pub use matching_frontier::exact_matching_frontier;
pub use steiner_forest::{exact_steiner_forest, exact_steiner_forest_by_partition};
pub use steiner_tree::{exact_steiner_tree, DreyfusWagner};

use crate::graph::EdgeId;

/// Input size limits; oracles refuse anything larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_terminals: usize,
    pub max_edges: usize,
    pub max_facilities: usize,
}

impl OracleBudget {
    pub const DEFAULT: OracleBudget = OracleBudget { max_terminals: 12, max_edges: 16, max_facilities: 15 };
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeSolution<T> {
    pub cost: T,
    /// Ascending edge ids.
    pub edges: Vec<EdgeId>,
}
