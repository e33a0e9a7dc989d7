//! Gadgets for the repetition-free promise and for group tables.

use std::collections::BTreeSet;

use super::{all_words, check_len, is_prime, prefix, ReductionOutput, Source};
use crate::closures::{ExtendedRelation, Term};
use crate::csp::family::{cyclic_table, next_permutation, Family};
use crate::csp::{AdmissibleSet, Assignment, Constraint, Instance, Params, Promise, Relation, TupleSet};
use crate::error::{input_err, CspError, Result};
use crate::graph::{Digraph, EdgeSpace};
use crate::solvers::Cnf;

/// The four 2-clauses `C_ab = {(u, v) : u = a or v = b}`; `C_ab` is
/// relation `1 + 2a + b`.
pub fn rf_2sat_clause_relations() -> Result<Vec<Relation>> {
    let mut out = Vec::with_capacity(4);
    for a in 0..2u32 {
        for b in 0..2u32 {
            let rows = (0..2u32).flat_map(|u| (0..2u32).map(move |v| [u, v])).filter(|r| r[0] == a || r[1] == b);
            out.push(Relation::explicit(format!("C{a}{b}"), 2, 2, rows)?);
        }
    }
    Ok(out)
}

fn clause_rel(a: u32, b: u32) -> usize {
    1 + 2 * a as usize + b as usize
}

fn check_3cnf(f: &Cnf) -> Result<()> {
    if f.vars == 0 {
        return Err(input_err!("formula has no variables"));
    }
    if let Some(j) = f.clauses.iter().position(|c| c.len() > 3) {
        return Err(input_err!("clause {} has more than 3 literals", j + 1));
    }
    Ok(())
}

/// 3-SAT into unions of 2-clauses under the repetition-free promise. Clause
/// `t` gets a fresh variable `y_t = x_{n+t}` and two constraints,
/// `clause ∨ ¬y_t` and `clause ∨ y_t`, each a union of 2-clause terms.
pub fn threesat_to_rf_union_2sat(f: &Cnf) -> Result<ReductionOutput> {
    check_3cnf(f)?;
    let (n, m) = (f.vars, f.clauses.len());
    let ell = n + m;
    // one variable and no clauses leaves no room for binary relations
    let mut relations = if ell >= 2 { rf_2sat_clause_relations()? } else { Vec::new() };
    let mut constraints = Vec::with_capacity(2 * m);
    for (t, clause) in f.clauses.iter().enumerate() {
        let y = n + t + 1;
        for (tag, yb) in [("'", 0u32), ("''", 1)] {
            let terms = clause.iter().map(|l| Term {
                rel: clause_rel(u32::from(l.pos), yb),
                vars: vec![l.var, y],
            });
            relations.push(Relation::extended(format!("C{}{tag}", t + 1), ExtendedRelation::new(terms)));
            constraints.push(Constraint::new(relations.len(), vec![]));
        }
    }
    let target = Instance::new(Params::new(2, ell, 2.min(ell))?, AdmissibleSet::All, relations, constraints)?
        .with_promise(Promise::RepetitionFree)?;
    let formula = f.clone();
    let source = Source::new(
        "3-CNF satisfiability",
        move |budget| all_words(2, n, budget),
        move |x| check_len(x, n, 2) && formula.eval(x),
    );
    let forward = move |x: &[u32]| -> Result<Assignment> {
        if !check_len(x, n, 2) {
            return Err(input_err!("expected a 0/1 word of length {n}"));
        }
        let mut a = x.to_vec();
        a.resize(ell, 0);
        Ok(a)
    };
    Ok(ReductionOutput::new(
        "rf-2sat",
        "3-SAT is NP-complete (Cook)",
        target,
        source,
        forward,
        move |a: &[u32]| prefix(a, n),
    ))
}

/// For a satisfying `x`, picks per clause a true literal `x_s^b` and returns
/// the `2m` pairwise distinct terms `C_{b0}(x_s, y_t)`, `C_{b1}(x_s, y_t)`.
pub fn select_rf_subsystem(f: &Cnf, x: &[u32]) -> Result<Vec<Term>> {
    check_3cnf(f)?;
    if !check_len(x, f.vars, 2) {
        return Err(input_err!("expected a 0/1 word of length {}", f.vars));
    }
    let mut out = Vec::with_capacity(2 * f.clauses.len());
    for (t, clause) in f.clauses.iter().enumerate() {
        let l = clause
            .iter()
            .find(|l| l.holds(x))
            .ok_or_else(|| input_err!("clause {} is false under the given assignment", t + 1))?;
        let y = f.vars + t + 1;
        for yb in 0..2 {
            out.push(Term {
                rel: clause_rel(u32::from(l.pos), yb),
                vars: vec![l.var, y],
            });
        }
    }
    Ok(out)
}

fn norm_edge(u: usize, v: usize, n: usize) -> Result<(usize, usize)> {
    if u == 0 || v == 0 || u > n || v > n || u == v {
        return Err(input_err!("{{{u},{v}}} is not an edge on [{n}]"));
    }
    Ok((u.min(v), u.max(v)))
}

/// Unions of 2-colouring constraints made pairwise disjoint. Each edge
/// `{u, v}` of `E_j` gets two fresh vertices `uvj1`, `uvj2` forced to the
/// opposite colours of `u` and `v`; `E_j` is replaced by the edges
/// `{uvj1, uvj2}`.
pub fn union_2col_rf_transform(n: usize, sets: &[Vec<(usize, usize)>]) -> Result<ReductionOutput> {
    if n == 0 {
        return Err(input_err!("need at least one vertex"));
    }
    let sets: Vec<Vec<(usize, usize)>> = sets
        .iter()
        .map(|s| {
            let e: BTreeSet<(usize, usize)> = s.iter().map(|&(u, v)| norm_edge(u, v, n)).collect::<Result<_>>()?;
            Ok(e.into_iter().collect())
        })
        .collect::<Result<_>>()?;
    let ell = n + 2 * sets.iter().map(Vec::len).sum::<usize>();
    let ne = Relation::explicit("NE", 2, 2, [[0u32, 1], [1, 0]])?;
    // a lone vertex cannot host a binary relation
    let mut relations = if ell >= 2 { vec![ne] } else { Vec::new() };
    let mut constraints = Vec::new();
    let mut fresh: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut used = BTreeSet::new();
    let mut next = n;
    for (j, set) in sets.iter().enumerate() {
        let mut replaced = Vec::with_capacity(set.len());
        for &(u, v) in set {
            let (a, b) = (next + 1, next + 2);
            next += 2;
            fresh.push((u, v, a, b));
            for (name, x, y) in [(format!("E{u}.{v}.{}.1", j + 1), u, a), (format!("E{u}.{v}.{}.2", j + 1), v, b)] {
                relations.push(Relation::extended(name, ExtendedRelation::new([Term { rel: 1, vars: vec![x, y] }])));
                constraints.push(Constraint::new(relations.len(), vec![]));
                if !used.insert((x, y)) {
                    return Err(CspError::Internal(format!("edge {{{x},{y}}} used twice")));
                }
            }
            replaced.push(Term { rel: 1, vars: vec![a, b] });
            if !used.insert((a, b)) {
                return Err(CspError::Internal(format!("edge {{{a},{b}}} used twice")));
            }
        }
        relations.push(Relation::extended(format!("E{}'", j + 1), ExtendedRelation::new(replaced)));
        constraints.push(Constraint::new(relations.len(), vec![]));
    }
    let target = Instance::new(Params::new(2, ell, 2.min(ell))?, AdmissibleSet::All, relations, constraints)?
        .with_promise(Promise::RepetitionFree)?;
    let source = Source::new(
        "union of 2-colouring constraints",
        move |budget| all_words(2, n, budget),
        move |c| check_len(c, n, 2) && sets.iter().all(|s| s.iter().any(|&(u, v)| c[u - 1] != c[v - 1])),
    );
    let forward = move |c: &[u32]| -> Result<Assignment> {
        if !check_len(c, n, 2) {
            return Err(input_err!("expected a 0/1 word of length {n}"));
        }
        let mut a = c.to_vec();
        a.resize(ell, 0);
        for &(u, v, x, y) in &fresh {
            a[x - 1] = 1 - c[u - 1];
            a[y - 1] = 1 - c[v - 1];
        }
        Ok(a)
    };
    Ok(ReductionOutput::new(
        "rf-2col",
        "the source problem itself; the output only removes repetitions",
        target,
        source,
        forward,
        move |a: &[u32]| prefix(a, n),
    ))
}

/// Directed Hamiltonian cycles through a loop-free digraph `d` on `[p]` as
/// group tables on `[p]`: entry `(u, z)` must be an out-neighbour of `u`,
/// all other entries are free. Table letters are elements minus one.
pub fn hamdigraph_to_groupeq(d: &Digraph, z: usize) -> Result<ReductionOutput> {
    let p = d.n;
    if !is_prime(p) {
        return Err(input_err!("p = {p} is not prime"));
    }
    if !(1..=p).contains(&z) {
        return Err(input_err!("z = {z} outside [{p}]"));
    }
    if let Some(&(u, _)) = d.arcs.iter().find(|(u, v)| u == v) {
        return Err(input_err!("loop at vertex {u}"));
    }
    let w = p as u32;
    let mut relations = vec![Relation::from_set("Any", TupleSet::full(w, 1)?)];
    let mut constraints = Vec::with_capacity(p * p);
    for u in 1..=p {
        let out: Vec<[u32; 1]> = d.arcs.iter().filter(|a| a.0 == u).map(|&(_, v)| [v as u32 - 1]).collect();
        relations.push(Relation::explicit(format!("N{u}"), w, 1, out)?);
        let nu = relations.len();
        for v in 1..=p {
            let rel = if v == z { nu } else { 1 };
            constraints.push(Constraint::new(rel, vec![(u - 1) * p + v]));
        }
    }
    let target = Instance::new(
        Params::new(w, p * p, 1)?,
        AdmissibleSet::Family(Family::GroupTables { p }),
        relations,
        constraints,
    )?;

    let space = EdgeSpace::Directed(p);
    let ell = space.len();
    let dd = d.clone();
    let check = move |word: &[u32]| -> bool {
        if !check_len(word, ell, 2) {
            return false;
        }
        let arcs = space.edges_of(word);
        if arcs.len() != p || arcs.iter().any(|&(u, v)| !dd.has_arc(u, v)) {
            return false;
        }
        let mut succ = vec![0usize; p + 1];
        for &(u, v) in &arcs {
            if succ[u] != 0 {
                return false;
            }
            succ[u] = v;
        }
        let (mut v, mut steps) = (1, 0);
        loop {
            v = succ[v];
            steps += 1;
            if v == 1 || v == 0 || steps > p {
                break;
            }
        }
        v == 1 && steps == p
    };
    let candidates = move |budget: u64| -> Result<Vec<Assignment>> {
        // cycles through 1 in the complete digraph
        let mut rest: Vec<usize> = (2..=p).collect();
        let mut out = Vec::new();
        loop {
            if out.len() as u64 >= budget {
                return Err(CspError::Resource(format!("more than {budget} cyclic orders")));
            }
            let mut order = vec![1];
            order.extend(&rest);
            let arcs: Vec<(usize, usize)> = (0..p).map(|i| (order[i], order[(i + 1) % p])).collect();
            out.push(space.word(&arcs)?);
            if !next_permutation(&mut rest) {
                break;
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    };
    let forward = move |word: &[u32]| -> Result<Assignment> {
        if !check_len(word, ell, 2) {
            return Err(input_err!("expected an arc word of length {ell}"));
        }
        let mut succ = vec![0usize; p + 1];
        for (u, v) in space.edges_of(word) {
            succ[u] = v;
        }
        // walk the cycle from z: phi(v_i) = i mod p, so phi(z) = 1
        let mut phi = vec![0usize; p];
        let mut v = z;
        for i in 1..=p {
            if v == 0 {
                return Err(input_err!("arc word is not a Hamiltonian cycle"));
            }
            phi[v - 1] = i % p;
            v = succ[v];
        }
        let table = cyclic_table(&phi);
        if !crate::csp::family::is_group_table(p, &table) {
            return Err(input_err!("arc word is not a Hamiltonian cycle"));
        }
        Ok(table)
    };
    let backward = move |table: &[u32]| -> Result<Assignment> {
        if !check_len(table, p * p, w) {
            return Err(input_err!("expected a {p} x {p} table"));
        }
        let arcs: Vec<(usize, usize)> = (1..=p).map(|u| (u, table[(u - 1) * p + z - 1] as usize + 1)).collect();
        space.word(&arcs)
    };
    Ok(ReductionOutput::new(
        "groupeq",
        "directed Hamiltonian cycle is NP-complete (Karp)",
        target,
        Source::new("directed Hamiltonian cycle", candidates, check),
        forward,
        backward,
    ))
}
