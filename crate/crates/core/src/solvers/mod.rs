//! Polynomial-time backends: 2-SAT, unique games over two labels, forced
//! spanning trees, graph reconstruction and matching-based solvers for
//! repetition-free instances.

mod graphs;
mod matching;
mod twosat;

pub use graphs::{
    forced_and_forbidden, solve_hidden_graph_property_v, spanning_tree_finder, spanning_tree_with_forest,
    EqSpanningTreeBackend,
};
pub use matching::{
    solve_kweight_rf, solve_union_1sat_rf, unary_literal_sets, BipartiteGraph, MatchingBackend,
};
pub use twosat::{binary_csp_to_2sat, solve_2sat, solve_ug2, Cnf, Lit, TwoSatBackend};

use crate::error::Result;
use crate::oracle::Oracle;
use crate::transfer::{solve_hidden_v, EngineReport};

/// Hidden binary boolean CSP under a variable-revealing oracle, solved
/// through 2-SAT on the synthesized union instances.
pub fn solve_union_binary_hidden(oracle: &mut dyn Oracle) -> Result<EngineReport> {
    solve_hidden_v(oracle, &TwoSatBackend)
}
