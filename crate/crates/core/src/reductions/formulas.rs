//! Formula and colouring gadgets with identity witness maps.

use super::{all_words, check_len, is_prime, ReductionOutput, Source};
use crate::closures::UnionRelation;
use crate::csp::{AdmissibleSet, Assignment, Constraint, Instance, Params, Relation, TupleSet};
use crate::error::{input_err, Result};
use crate::graph::Graph;
use crate::solvers::Cnf;

fn identity(len: usize, w: u32) -> impl Fn(&[u32]) -> Result<Assignment> + Send + Sync + Clone {
    move |a: &[u32]| {
        if check_len(a, len, w) {
            Ok(a.to_vec())
        } else {
            Err(input_err!("expected a word of length {len} over {w} letters"))
        }
    }
}

/// 3-SAT as a union of the eight singleton relations `R_abc`: clause `j`
/// becomes the union of the seven rows that satisfy it.
pub fn threesat_to_union_delta(f: &Cnf) -> Result<ReductionOutput> {
    if f.vars < 3 {
        return Err(input_err!("need at least 3 variables, got {}", f.vars));
    }
    let mut relations = Vec::with_capacity(8 + f.clauses.len());
    for code in 0..8u32 {
        let row = [code >> 2 & 1, code >> 1 & 1, code & 1];
        relations.push(Relation::explicit(format!("R{}{}{}", row[0], row[1], row[2]), 2, 3, [row])?);
    }
    let mut constraints = Vec::with_capacity(f.clauses.len());
    for (j, clause) in f.clauses.iter().enumerate() {
        let [a, b, c] = clause.as_slice() else {
            return Err(input_err!("clause {} has {} literals, expected 3", j + 1, clause.len()));
        };
        if a.var == b.var || a.var == c.var || b.var == c.var {
            return Err(input_err!("clause {} repeats a variable", j + 1));
        }
        // row abc satisfies the clause unless every literal is false
        let members: Vec<usize> = (0..8u32)
            .filter(|code| {
                let row = [code >> 2 & 1, code >> 1 & 1, code & 1];
                clause.iter().zip(row).any(|(l, x)| (x == 1) == l.pos)
            })
            .map(|code| code as usize + 1)
            .collect();
        let u = UnionRelation::new(members, &relations[..8], 2, 3)?;
        relations.push(Relation::union(format!("C{}", j + 1), u));
        constraints.push(Constraint::new(relations.len(), vec![a.var, b.var, c.var]));
    }
    let n = f.vars;
    let target = Instance::new(Params::new(2, n, 3)?, AdmissibleSet::All, relations, constraints)?;
    let formula = f.clone();
    let source = Source::new(
        "3-CNF satisfiability",
        move |budget| all_words(2, n, budget),
        move |w| check_len(w, n, 2) && formula.eval(w),
    );
    Ok(ReductionOutput::new(
        "3sat-delta",
        "3-SAT is NP-complete (Cook)",
        target,
        source,
        identity(n, 2),
        identity(n, 2),
    ))
}

fn colouring_source(g: &Graph, k: u32, what: &str) -> Source {
    let g = g.clone();
    let n = g.n;
    Source::new(
        format!("proper {what}-colouring"),
        move |budget| all_words(k, n, budget),
        move |w| check_len(w, n, k) && g.edges.iter().all(|&(u, v)| w[u - 1] != w[v - 1]),
    )
}

/// Graph `k`-colouring as unique games: the type is the `k!` permutation
/// relations and every edge carries the union of the derangements, which
/// is `x != y`.
pub fn threecol_to_union_ug(g: &Graph, k: u32) -> Result<ReductionOutput> {
    if !(2..=6).contains(&k) {
        return Err(input_err!("k = {k} outside the supported range 2..=6"));
    }
    if g.n < 2 {
        return Err(input_err!("need at least 2 vertices for binary constraints"));
    }
    let mut perm: Vec<u32> = (0..k).collect();
    let mut relations = Vec::new();
    let mut derangements = Vec::new();
    loop {
        let rows: Vec<[u32; 2]> = perm.iter().enumerate().map(|(x, &y)| [x as u32, y]).collect();
        relations.push(Relation::explicit(format!("P{}", relations.len() + 1), k, 2, rows)?);
        if perm.iter().enumerate().all(|(x, &y)| x as u32 != y) {
            derangements.push(relations.len());
        }
        if !crate::csp::family::next_permutation(&mut perm) {
            break;
        }
    }
    let u = UnionRelation::new(derangements, &relations, k, 2)?;
    relations.push(Relation::union("Rdiff", u));
    let rd = relations.len();
    let constraints = g.edges.iter().map(|&(u, v)| Constraint::new(rd, vec![u, v])).collect();
    let target = Instance::new(Params::new(k, g.n, 2)?, AdmissibleSet::All, relations, constraints)?;
    Ok(ReductionOutput::new(
        "3col-ug",
        "graph 3-colouring is NP-complete (Karp)",
        target,
        colouring_source(g, k, &k.to_string()),
        identity(g.n, k),
        identity(g.n, k),
    ))
}

/// Graph `p`-colouring as hyperplane non-cover over `Z_p`: one in-equation
/// `x_u - x_v != 0` per edge.
pub fn coloring_to_hyperplane_noncover(g: &Graph, p: usize) -> Result<ReductionOutput> {
    if !is_prime(p) {
        return Err(input_err!("p = {p} is not prime"));
    }
    let w = p as u32;
    let q = g.n.min(2);
    let ne = TupleSet::new(w, 2, (0..w).flat_map(|x| (0..w).filter(move |&y| y != x).map(move |y| [x, y])))?;
    // a single vertex has no room for a binary relation
    let relations = if g.n >= 2 { vec![Relation::from_set("NE", ne)] } else { Vec::new() };
    let constraints = g.edges.iter().map(|&(u, v)| Constraint::new(1, vec![u, v])).collect();
    let target = Instance::new(Params::new(w, g.n, q)?, AdmissibleSet::All, relations, constraints)?;
    Ok(ReductionOutput::new(
        "col-hyp",
        "graph 3-colouring is NP-complete (Karp)",
        target,
        colouring_source(g, w, &p.to_string()),
        identity(g.n, w),
        identity(g.n, w),
    ))
}
