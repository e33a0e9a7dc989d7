//! Hidden constraint satisfaction problems under trial and error.
//!
//! An algorithm proposes assignments to a revealing oracle for an unknown
//! instance; on a violation the oracle names the violated constraint and,
//! depending on its reveal level, the relation and/or the variables.
//!
//! * [`csp`]: parameters, relations, admissible sets, instances, brute force.
//! * [`closures`]: union closure, arity extensions and the `dim` measure.
//! * [`oracle`]: fixed and lazy revealing oracles with transcripts.
//! * [`transfer`]: engines solving hidden instances through ordinary solvers,
//!   and the reverse simulations.
//! * [`solvers`]: 2-SAT, unique games over two labels, spanning trees and
//!   matching-based solvers for repetition-free instances.
//! * [`reductions`]: gadget constructions with forward and backward witness maps.
//! * [`format`]: JSON instance format, graph edge lists and DIMACS.

pub mod bench;
pub mod closures;
pub mod csp;
pub mod error;
pub mod format;
pub mod graph;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod solvers;
pub mod transfer;

pub use csp::{
    brute_force_solve, project_admissible, AdmissibleSet, Assignment, Constraint, Instance,
    Outcome, Params, Promise, Relation, RelationBody, TupleSet, DEFAULT_BUDGET,
};
pub use error::{CspError, Result};
