//! Gadget constructions. Each returns the target instance, a checkable
//! description of the source problem and the two witness maps.
//!
//! Source witnesses are words too: edge words over an [`EdgeSpace`] for
//! graph problems, 0/1 vectors for formulas, colour vectors for colourings.
//!
//! [`EdgeSpace`]: crate::graph::EdgeSpace

mod formulas;
mod graphs;
mod monsat;
mod promise;

pub use formulas::{coloring_to_hyperplane_noncover, threecol_to_union_ug, threesat_to_union_delta};
pub use graphs::{eq_class_hardness, graph_property_gadget, EqClass, GraphLayout, GraphProperty};
pub use monsat::{lineq_type, monsat_encode, monsat_structure, MonsatStructure};
pub use promise::{
    hamdigraph_to_groupeq, rf_2sat_clause_relations, select_rf_subsystem, threesat_to_rf_union_2sat,
    union_2col_rf_transform,
};

use crate::csp::{brute_force_all, brute_force_solve, AdmissibleSet, Assignment, Instance, Outcome, Params};
use crate::error::{input_err, Result};

type WordMap = Box<dyn Fn(&[u32]) -> Result<Assignment> + Send + Sync>;
type Candidates = Box<dyn Fn(u64) -> Result<Vec<Assignment>> + Send + Sync>;
type Check = Box<dyn Fn(&[u32]) -> bool + Send + Sync>;

/// The source side of a reduction: a witness predicate and a finite
/// candidate set that contains every witness.
pub struct Source {
    description: String,
    candidates: Candidates,
    check: Check,
}

impl Source {
    pub fn new(
        description: impl Into<String>,
        candidates: impl Fn(u64) -> Result<Vec<Assignment>> + Send + Sync + 'static,
        check: impl Fn(&[u32]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            description: description.into(),
            candidates: Box::new(candidates),
            check: Box::new(check),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_witness(&self, w: &[u32]) -> bool {
        (self.check)(w)
    }

    /// Every witness, by exhaustive search over the candidates.
    pub fn witnesses(&self, budget: u64) -> Result<Vec<Assignment>> {
        Ok((self.candidates)(budget)?
            .into_iter()
            .filter(|w| self.is_witness(w))
            .collect())
    }

    pub fn solve(&self, budget: u64) -> Result<Option<Assignment>> {
        Ok((self.candidates)(budget)?.into_iter().find(|w| self.is_witness(w)))
    }
}

pub struct ReductionOutput {
    pub name: &'static str,
    /// The external hardness result the gadget leans on.
    pub provenance: &'static str,
    pub target: Instance,
    pub source: Source,
    forward: WordMap,
    backward: WordMap,
}

impl ReductionOutput {
    pub(crate) fn new(
        name: &'static str,
        provenance: &'static str,
        target: Instance,
        source: Source,
        forward: impl Fn(&[u32]) -> Result<Assignment> + Send + Sync + 'static,
        backward: impl Fn(&[u32]) -> Result<Assignment> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name,
            provenance,
            target,
            source,
            forward: Box::new(forward),
            backward: Box::new(backward),
        }
    }

    /// Source witness to target assignment.
    pub fn witness_forward(&self, w: &[u32]) -> Result<Assignment> {
        (self.forward)(w)
    }

    /// Target assignment to source witness.
    pub fn witness_backward(&self, a: &[u32]) -> Result<Assignment> {
        (self.backward)(a)
    }
}

impl std::fmt::Debug for ReductionOutput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReductionOutput")
            .field("name", &self.name)
            .field("source", &self.source.description)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

/// What [`check_reduction`] found. The map fields are `None` when there
/// was nothing to map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCheck {
    pub source_sat: bool,
    pub target_sat: bool,
    pub forward_ok: Option<bool>,
    pub backward_ok: Option<bool>,
}

impl ReductionCheck {
    pub fn holds(&self) -> bool {
        self.source_sat == self.target_sat && self.forward_ok != Some(false) && self.backward_ok != Some(false)
    }
}

/// Brute-force check of a reduction: both sides agree on satisfiability and
/// the witness maps send witnesses to witnesses. With `exhaustive`, every
/// source witness and every target solution is mapped, not only the first.
pub fn check_reduction(out: &ReductionOutput, budget: u64, exhaustive: bool) -> Result<ReductionCheck> {
    let (sources, targets) = if exhaustive {
        (out.source.witnesses(budget)?, brute_force_all(&out.target, budget)?)
    } else {
        let s = out.source.solve(budget)?.into_iter().collect();
        let t = match brute_force_solve(&out.target, budget)? {
            Outcome::Solution(a) => vec![a],
            _ => Vec::new(),
        };
        (s, t)
    };
    let maps_ok = |ws: &[Assignment], ok: &dyn Fn(&[u32]) -> bool| (!ws.is_empty()).then(|| ws.iter().all(|w| ok(w)));
    let forward_ok = maps_ok(&sources, &|w| {
        out.witness_forward(w).is_ok_and(|a| out.target.satisfies(&a))
    });
    let backward_ok = maps_ok(&targets, &|a| {
        out.witness_backward(a).is_ok_and(|w| out.source.is_witness(&w))
    });
    Ok(ReductionCheck {
        source_sat: !sources.is_empty(),
        target_sat: !targets.is_empty(),
        forward_ok,
        backward_ok,
    })
}

/// All words of `[w]^len` in lexicographic order.
pub(crate) fn all_words(w: u32, len: usize, budget: u64) -> Result<Vec<Assignment>> {
    if len == 0 {
        return Ok(vec![Vec::new()]);
    }
    AdmissibleSet::All.enumerate(&Params::new(w, len, 1)?, budget)
}

pub(crate) fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub(crate) fn check_len(w: &[u32], len: usize, alphabet: u32) -> bool {
    w.len() == len && w.iter().all(|&x| x < alphabet)
}

pub(crate) fn prefix(a: &[u32], n: usize) -> Result<Assignment> {
    if a.len() < n {
        return Err(input_err!("assignment of length {} is shorter than {n}", a.len()));
    }
    Ok(a[..n].to_vec())
}
