//! Engines that solve hidden instances by repeatedly calling an ordinary
//! solver on a synthesized instance, and the reverse simulations that
//! solve enriched instances with a hidden-instance algorithm.
//!
//! Each engine keeps, per constraint, the trial data blamed on it so far
//! and hands the backend the weakest instance consistent with everything
//! learned. The backend's answer is submitted to the oracle; a NO from the
//! backend is final.

mod engines;
mod reverse;

pub use engines::{
    solve_hidden_empty, solve_hidden_r, solve_hidden_rv, solve_hidden_v, solve_hidden_v_promise,
    includes_satisfiable_rf, EngineOptions,
};
pub use reverse::{
    reverse_extension_via_hidden, reverse_union_via_hidden, reverse_unionx_via_hidden,
};

use crate::closures::DimEstimate;
use crate::csp::{brute_force_solve, Instance, Outcome, DEFAULT_BUDGET};
use crate::error::Result;

/// An ordinary solver the engines call on synthesized instances.
///
/// It must be sound and complete on what it is handed: a returned
/// assignment must satisfy the instance, and `No` must mean unsatisfiable.
/// `Exception` is only meaningful for the promise engine.
pub trait SolverBackend {
    fn name(&self) -> &str;
    fn solve(&self, inst: &Instance) -> Result<Outcome>;
}

/// Exhaustive search over `W`; the reference backend.
#[derive(Clone, Copy, Debug)]
pub struct BruteForceBackend {
    pub budget: u64,
}

impl Default for BruteForceBackend {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SolverBackend for BruteForceBackend {
    fn name(&self) -> &str {
        "brute"
    }

    fn solve(&self, inst: &Instance) -> Result<Outcome> {
        brute_force_solve(inst, self.budget)
    }
}

/// Wraps a closure as a backend.
pub struct FnBackend<F> {
    name: String,
    f: F,
}

impl<F: Fn(&Instance) -> Result<Outcome>> FnBackend<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F: Fn(&Instance) -> Result<Outcome>> SolverBackend for FnBackend<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn solve(&self, inst: &Instance) -> Result<Outcome> {
        (self.f)(inst)
    }
}

/// Result of one engine run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineReport {
    /// `Solution` or `No`.
    pub answer: Outcome,
    pub trials: usize,
    /// Proven upper bound on `trials` for this run.
    pub bound: u64,
    /// The `dim` quantity entering the bound, when the bound has one.
    pub dim: Option<DimEstimate>,
    /// `dim(X(R))` for the lifted engines, when `W` could be enumerated.
    pub dim_family: Option<usize>,
    pub backend_calls: usize,
}
