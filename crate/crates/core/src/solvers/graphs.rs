//! Graph-property solvers for variable-revealing oracles.

use std::collections::BTreeSet;

use crate::csp::family::Family;
use crate::csp::{AdmissibleSet, Assignment, Instance, Outcome, RelationBody};
use crate::error::{input_err, CspError, Result};
use crate::graph::{EdgeSpace, UnionFind};
use crate::oracle::{Oracle, Response};
use crate::transfer::{EngineReport, SolverBackend};

fn normalize(e: (usize, usize)) -> (usize, usize) {
    (e.0.min(e.1), e.0.max(e.1))
}

/// A spanning tree `T` of `([n], e2)` with `e1 ⊆ T`, or `None` when `e2`
/// is disconnected. `e1` must be a forest inside `e2`. Edges of `e2` are
/// tried in lexicographic order; the result is sorted.
pub fn spanning_tree_with_forest(
    n: usize,
    e1: &[(usize, usize)],
    e2: &[(usize, usize)],
) -> Result<Option<Vec<(usize, usize)>>> {
    let mut e2: Vec<(usize, usize)> = e2.iter().map(|&e| normalize(e)).collect();
    e2.sort_unstable();
    e2.dedup();
    for &(u, v) in &e2 {
        if u == 0 || v > n || u == v {
            return Err(input_err!("edge ({u},{v}) is not an edge on [{n}]"));
        }
    }
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::new();
    for &e in e1 {
        let e = normalize(e);
        if e2.binary_search(&e).is_err() {
            return Err(input_err!("forest edge {e:?} is not in the graph"));
        }
        if !uf.union(e.0, e.1) {
            return Err(input_err!("forced edges contain a cycle through {e:?}"));
        }
        tree.push(e);
    }
    for &(u, v) in &e2 {
        if uf.union(u, v) {
            tree.push((u, v));
        }
    }
    if n > 0 && uf.components() != 1 {
        return Ok(None);
    }
    tree.sort_unstable();
    tree.dedup();
    Ok(Some(tree))
}

/// Finder for spanning trees of `K_n` avoiding forbidden edge coordinates.
pub fn spanning_tree_finder(n: usize) -> impl FnMut(&BTreeSet<usize>) -> Result<Option<Assignment>> {
    let space = EdgeSpace::Undirected(n);
    move |forbidden| {
        let allowed: Vec<(usize, usize)> = space
            .edges()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !forbidden.contains(&(i + 1)))
            .map(|(_, e)| e)
            .collect();
        match spanning_tree_with_forest(n, &[], &allowed)? {
            Some(t) => Ok(Some(space.word(&t)?)),
            None => Ok(None),
        }
    }
}

/// Hidden monotone graph property under a variable-revealing oracle. The
/// hidden constraints say "edge `e` is absent"; each violation names one
/// such edge. `finder` returns a member of `W` avoiding the given edge
/// coordinates, or `None`. At most `ell + 1` trials.
pub fn solve_hidden_graph_property_v(
    oracle: &mut dyn Oracle,
    finder: &mut dyn FnMut(&BTreeSet<usize>) -> Result<Option<Assignment>>,
) -> Result<EngineReport> {
    let info = oracle.info().clone();
    if !info.level.reveals_vars() {
        return Err(input_err!("graph reconstruction needs a variable-revealing oracle"));
    }
    let ell = info.params.ell;
    let bound = ell as u64 + 1;
    let mut forbidden = BTreeSet::new();
    let mut trials = 0usize;
    let mut calls = 0usize;
    loop {
        calls += 1;
        let Some(a) = finder(&forbidden)? else {
            return Ok(EngineReport {
                answer: Outcome::No,
                trials,
                bound,
                dim: None,
                dim_family: None,
                backend_calls: calls,
            });
        };
        if !info.admissible.contains(&info.params, &a) || forbidden.iter().any(|&e| a[e - 1] == 1) {
            return Err(CspError::Contract(format!("finder returned {a:?}, which is not an allowed witness")));
        }
        if trials as u64 >= bound {
            return Err(CspError::Protocol(format!("trial bound {bound} reached")));
        }
        trials += 1;
        match oracle.submit(&a)? {
            Response::Yes => {
                return Ok(EngineReport {
                    answer: Outcome::Solution(a),
                    trials,
                    bound,
                    dim: None,
                    dim_family: None,
                    backend_calls: calls,
                })
            }
            Response::Violation { vars, .. } => {
                let e = match vars.as_deref() {
                    Some(&[e]) if (1..=ell).contains(&e) && a[e - 1] == 1 => e,
                    _ => return Err(CspError::Protocol(format!("unexpected violation data {vars:?}"))),
                };
                forbidden.insert(e);
            }
        }
    }
}

/// Forced and forbidden coordinates of a `w = 2`, unary-constraint
/// instance; `None` if some constraint is the empty relation or a
/// coordinate is both forced and forbidden.
pub fn forced_and_forbidden(inst: &Instance) -> Result<Option<(BTreeSet<usize>, BTreeSet<usize>)>> {
    let mut forced = BTreeSet::new();
    let mut forbidden = BTreeSet::new();
    for (j, c) in inst.constraints.iter().enumerate() {
        let set = match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(t) => t,
            RelationBody::Union(u) => u.set(),
            RelationBody::Extended(_) => return Err(input_err!("constraint {} is an arity extension", j + 1)),
        };
        if set.arity() != 1 || set.alphabet() != 2 {
            return Err(input_err!("constraint {} is not a unary boolean constraint", j + 1));
        }
        match (set.contains(&[0]), set.contains(&[1])) {
            (false, false) => return Ok(None),
            (false, true) => {
                forced.insert(c.vars[0]);
            }
            (true, false) => {
                forbidden.insert(c.vars[0]);
            }
            (true, true) => {}
        }
    }
    if forced.intersection(&forbidden).next().is_some() {
        return Ok(None);
    }
    Ok(Some((forced, forbidden)))
}

/// Backend for unions of "equal to a spanning tree" instances: find a
/// spanning tree between the forced edges and the non-forbidden edges.
#[derive(Clone, Copy, Debug, Default)]
pub struct EqSpanningTreeBackend;

impl SolverBackend for EqSpanningTreeBackend {
    fn name(&self) -> &str {
        "eq-st"
    }

    fn solve(&self, inst: &Instance) -> Result<Outcome> {
        let AdmissibleSet::Family(Family::SpanningTrees { n }) = inst.admissible else {
            return Err(input_err!("spanning-tree backend needs W = spanning trees"));
        };
        let space = EdgeSpace::Undirected(n);
        let Some((forced, forbidden)) = forced_and_forbidden(inst)? else {
            return Ok(Outcome::No);
        };
        let e1: Vec<(usize, usize)> = forced.iter().map(|&i| space.edge(i)).collect();
        let mut uf = UnionFind::new(n);
        if !e1.iter().all(|&(u, v)| uf.union(u, v)) {
            return Ok(Outcome::No);
        }
        let e2: Vec<(usize, usize)> = (1..=space.len())
            .filter(|i| !forbidden.contains(i))
            .map(|i| space.edge(i))
            .collect();
        Ok(match spanning_tree_with_forest(n, &e1, &e2)? {
            Some(t) => Outcome::Solution(space.word(&t)?),
            None => Outcome::No,
        })
    }
}
