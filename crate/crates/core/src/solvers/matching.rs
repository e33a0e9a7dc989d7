//! Maximum bipartite matching and the repetition-free solvers built on it.

use std::collections::VecDeque;

use super::twosat::Lit;
use crate::csp::{AdmissibleSet, Instance, Outcome, RelationBody, TupleSet};
use crate::error::{input_err, Result};
use crate::transfer::SolverBackend;

/// Bipartite graph with left nodes `0..left` and right nodes `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            adj: vec![Vec::new(); left],
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.left && v < self.right, "edge ({u}, {v}) out of range");
        if !self.adj[u].contains(&v) {
            self.adj[u].push(v);
        }
    }

    /// Hopcroft-Karp. Entry `u` is the right partner of left node `u`.
    pub fn maximum_matching(&self) -> Vec<Option<usize>> {
        const INF: usize = usize::MAX;
        let mut mate_l: Vec<Option<usize>> = vec![None; self.left];
        let mut mate_r: Vec<Option<usize>> = vec![None; self.right];
        let mut dist = vec![INF; self.left];
        loop {
            // layered BFS from free left nodes
            let mut queue = VecDeque::new();
            for u in 0..self.left {
                if mate_l[u].is_none() {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = INF;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    match mate_r[v] {
                        None => found = true,
                        Some(w) if dist[w] == INF => {
                            dist[w] = dist[u] + 1;
                            queue.push_back(w);
                        }
                        _ => {}
                    }
                }
            }
            if !found {
                break;
            }
            for u in 0..self.left {
                if mate_l[u].is_none() {
                    self.augment(u, &mut mate_l, &mut mate_r, &mut dist);
                }
            }
        }
        mate_l
    }

    fn augment(
        &self,
        u: usize,
        mate_l: &mut [Option<usize>],
        mate_r: &mut [Option<usize>],
        dist: &mut [usize],
    ) -> bool {
        for &v in &self.adj[u] {
            let ok = match mate_r[v] {
                None => true,
                Some(w) => dist[w] == dist[u] + 1 && self.augment(w, mate_l, mate_r, dist),
            };
            if ok {
                mate_l[u] = Some(v);
                mate_r[v] = Some(u);
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }
}

/// Unions of 1-SAT literals under the repetition-free promise. Finds
/// pairwise distinct variables, one per clause, each with a literal in its
/// clause; returns the assignment making those literals true (other
/// variables 0), or `Exception` when no such system exists.
pub fn solve_union_1sat_rf(ell: usize, clauses: &[Vec<Lit>]) -> Result<Outcome> {
    let mut g = BipartiteGraph::new(clauses.len(), ell);
    for (j, c) in clauses.iter().enumerate() {
        for l in c {
            if l.var == 0 || l.var > ell {
                return Err(input_err!("literal on variable {} outside [1, {ell}]", l.var));
            }
            g.add_edge(j, l.var - 1);
        }
    }
    let mate = g.maximum_matching();
    let mut a = vec![0u32; ell];
    for (j, m) in mate.iter().enumerate() {
        let Some(v) = m else { return Ok(Outcome::Exception) };
        let lit = clauses[j].iter().find(|l| l.var == v + 1).unwrap();
        a[*v] = u32::from(lit.pos);
    }
    Ok(Outcome::Solution(a))
}

/// k-WEIGHT under the repetition-free promise: constraint `j` asks for a
/// zero somewhere in `sets[j]` (1-based positions), and admissible words
/// have at least `k` ones.
pub fn solve_kweight_rf(ell: usize, k: usize, sets: &[Vec<usize>]) -> Result<Outcome> {
    if k > ell {
        return Err(input_err!("weight {k} exceeds length {ell}"));
    }
    if sets.len() > ell - k {
        return Ok(Outcome::Exception);
    }
    let mut g = BipartiteGraph::new(sets.len(), ell);
    for (j, s) in sets.iter().enumerate() {
        for &i in s {
            if i == 0 || i > ell {
                return Err(input_err!("position {i} outside [1, {ell}]"));
            }
            g.add_edge(j, i - 1);
        }
    }
    let mut a = vec![1u32; ell];
    for m in g.maximum_matching() {
        let Some(i) = m else { return Ok(Outcome::Exception) };
        a[i] = 0;
    }
    Ok(Outcome::Solution(a))
}

/// Reads each constraint of a `w = 2` instance as a set of unary literals:
/// explicit or union relations at one variable, or extensions of unary
/// relations. `{1}` gives `x`, `{0}` gives `¬x`, `{0, 1}` gives both.
pub fn unary_literal_sets(inst: &Instance) -> Result<Vec<Vec<Lit>>> {
    if inst.params.w != 2 {
        return Err(input_err!("literal reading needs w = 2"));
    }
    let lits_of = |set: &TupleSet, v: usize| -> Result<Vec<Lit>> {
        if set.arity() != 1 {
            return Err(input_err!("relation of arity {} is not a literal", set.arity()));
        }
        Ok(set
            .tuples()
            .into_iter()
            .map(|t| Lit { var: v, pos: t[0] == 1 })
            .collect())
    };
    let mut out = Vec::with_capacity(inst.m());
    for c in &inst.constraints {
        let mut lits = match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(t) => lits_of(t, c.vars[0])?,
            RelationBody::Union(u) => lits_of(u.set(), c.vars[0])?,
            RelationBody::Extended(e) => {
                let mut acc = Vec::new();
                for term in e.terms() {
                    let t = inst.tuple_set(term.rel).unwrap();
                    acc.extend(lits_of(t, term.vars[0])?);
                }
                acc
            }
        };
        lits.sort();
        lits.dedup();
        out.push(lits);
    }
    Ok(out)
}

/// Solution-under-promise backend for repetition-free 1-SAT (`W` = all
/// words) and k-WEIGHT (`W` = words of weight at least `k`).
#[derive(Clone, Copy, Debug, Default)]
pub struct MatchingBackend;

impl SolverBackend for MatchingBackend {
    fn name(&self) -> &str {
        "matching"
    }

    fn solve(&self, inst: &Instance) -> Result<Outcome> {
        let clauses = unary_literal_sets(inst)?;
        let ell = inst.params.ell;
        match inst.admissible {
            AdmissibleSet::All => solve_union_1sat_rf(ell, &clauses),
            AdmissibleSet::MinWeight(k) => {
                let mut sets = Vec::with_capacity(clauses.len());
                for c in &clauses {
                    if c.iter().any(|l| l.pos) {
                        return Err(input_err!("k-WEIGHT constraints may only force zeros"));
                    }
                    sets.push(c.iter().map(|l| l.var).collect());
                }
                solve_kweight_rf(ell, k, &sets)
            }
            _ => Err(input_err!("matching backend needs W = all words or a weight bound")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_on_small_graphs() {
        let mut g = BipartiteGraph::new(3, 3);
        for (u, v) in [(0, 0), (0, 1), (1, 0), (2, 1), (2, 2)] {
            g.add_edge(u, v);
        }
        let m = g.maximum_matching();
        assert!(m.iter().all(Option::is_some));
        let mut rights: Vec<usize> = m.iter().flatten().copied().collect();
        rights.sort();
        rights.dedup();
        assert_eq!(rights.len(), 3);

        let mut h = BipartiteGraph::new(2, 2);
        h.add_edge(0, 0);
        h.add_edge(1, 0);
        assert_eq!(h.maximum_matching().iter().flatten().count(), 1);
    }

    #[test]
    fn one_sat_rf_examples() {
        let c = vec![vec![Lit::pos(1), Lit::pos(2)], vec![Lit::pos(1)]];
        assert_eq!(solve_union_1sat_rf(2, &c).unwrap(), Outcome::Solution(vec![1, 1]));
        let c = vec![vec![Lit::pos(1)], vec![Lit::neg(1)]];
        assert_eq!(solve_union_1sat_rf(1, &c).unwrap(), Outcome::Exception);
        assert_eq!(solve_union_1sat_rf(3, &[]).unwrap(), Outcome::Solution(vec![0, 0, 0]));
    }

    #[test]
    fn kweight_examples() {
        assert_eq!(
            solve_kweight_rf(4, 2, &[vec![1, 2], vec![2]]).unwrap(),
            Outcome::Solution(vec![0, 0, 1, 1])
        );
        assert_eq!(
            solve_kweight_rf(4, 2, &[vec![1], vec![2], vec![3]]).unwrap(),
            Outcome::Exception
        );
        assert_eq!(solve_kweight_rf(3, 1, &[]).unwrap(), Outcome::Solution(vec![1, 1, 1]));
    }
}
