//! Monotone SAT encoded into arity extensions of a base type, one block of
//! `q' = (w-1)q + 1` coordinates per boolean variable.

use super::{all_words, check_len, is_prime, ReductionOutput, Source};
use crate::closures::{distinct_tuples, ExtendedRelation, Term};
use crate::csp::{AdmissibleSet, Assignment, Constraint, Instance, Params, Relation, TupleSet};
use crate::error::{input_err, CspError, Result};
use crate::solvers::Cnf;

/// The minimal empty-intersection family `R^0, .., R^h` of block relations
/// and the two sets the boolean values are read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonsatStructure {
    pub q_prime: usize,
    /// Origin of each `R^i`: base relation index and positions inside the block.
    pub origins: Vec<(usize, Vec<usize>)>,
    pub sets: Vec<TupleSet>,
    pub h: usize,
    /// `∩_{i != 1} R^i`, read as 0.
    pub a0: TupleSet,
    /// `∩_{i != 0} R^i`, read as 1.
    pub a1: TupleSet,
}

fn intersect_all<'a>(w: u32, arity: usize, sets: impl Iterator<Item = &'a TupleSet>) -> Result<TupleSet> {
    let mut acc = TupleSet::full(w, arity)?;
    for s in sets {
        acc = acc.intersection(s);
    }
    Ok(acc)
}

/// Builds the block family for a base type. Needs, for every letter `α`, a
/// nonempty base relation missing the constant tuple `(α, .., α)`.
pub fn monsat_structure(base: &[TupleSet]) -> Result<MonsatStructure> {
    let first = base.first().ok_or_else(|| input_err!("empty base type"))?;
    let (w, q) = (first.alphabet(), first.arity());
    if q == 0 || base.iter().any(|r| r.alphabet() != w || r.arity() != q) {
        return Err(input_err!("base relations must share one alphabet and a positive arity"));
    }
    for alpha in 0..w {
        let constant = vec![alpha; q];
        if !base.iter().any(|r| !r.is_empty() && !r.contains(&constant)) {
            return Err(CspError::Precondition(format!(
                "no nonempty base relation excludes the constant tuple of letter {alpha}"
            )));
        }
    }
    let q_prime = (w as usize - 1) * q + 1;
    let universe = TupleSet::full(w, q_prime)?;
    let points = universe.tuples();

    // R': extensions of nonempty base relations to one block, deduplicated
    let mut origins: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut sets: Vec<TupleSet> = Vec::new();
    for (k, r) in base.iter().enumerate() {
        if r.is_empty() {
            continue;
        }
        for t in distinct_tuples(q_prime, q) {
            let set = TupleSet::new(w, q_prime, points.iter().filter(|x| r.contains_at(x, &t)))?;
            if !sets.contains(&set) {
                origins.push((k + 1, t));
                sets.push(set);
            }
        }
    }
    if !intersect_all(w, q_prime, sets.iter())?.is_empty() {
        return Err(CspError::Internal("block extensions have a common point".into()));
    }

    // greedy shrink; a member kept once stays necessary as the family shrinks
    let mut keep: Vec<usize> = (0..sets.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let without = keep.iter().enumerate().filter(|&(x, _)| x != i).map(|(_, &s)| &sets[s]);
        if intersect_all(w, q_prime, without)?.is_empty() {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    let origins: Vec<(usize, Vec<usize>)> = keep.iter().map(|&s| origins[s].clone()).collect();
    let sets: Vec<TupleSet> = keep.iter().map(|&s| sets[s].clone()).collect();
    for i in 0..sets.len() {
        let without = sets.iter().enumerate().filter(|&(x, _)| x != i).map(|(_, s)| s);
        if intersect_all(w, q_prime, without)?.is_empty() {
            return Err(CspError::Internal(format!("member {i} of the block family is redundant")));
        }
    }
    let h = sets.len().saturating_sub(1);
    if h < 1 {
        return Err(CspError::Internal("block family has fewer than two members".into()));
    }
    let a0 = intersect_all(w, q_prime, sets.iter().enumerate().filter(|&(i, _)| i != 1).map(|(_, s)| s))?;
    let a1 = intersect_all(w, q_prime, sets.iter().enumerate().filter(|&(i, _)| i != 0).map(|(_, s)| s))?;
    if a0.is_empty() || a1.is_empty() || !a0.is_disjoint(&a1) {
        return Err(CspError::Internal("A^0 and A^1 are not disjoint nonempty sets".into()));
    }
    Ok(MonsatStructure {
        q_prime,
        origins,
        sets,
        h,
        a0,
        a1,
    })
}

/// The unary equations `x = 0` and `x = 1` over `Z_p`.
pub fn lineq_type(p: usize) -> Result<Vec<TupleSet>> {
    if !is_prime(p) {
        return Err(input_err!("p = {p} is not prime"));
    }
    Ok(vec![TupleSet::new(p as u32, 1, [[0u32]])?, TupleSet::new(p as u32, 1, [[1u32]])?])
}

/// Monotone CNF `k` to an instance over arity extensions of `base`. Variable
/// `x_i` owns block `i`; a positive clause asks some of its blocks to lie in
/// `R^1`, a negative one in `R^0`, and every block lies in `R^2, .., R^h`.
pub fn monsat_encode(base: &[TupleSet], k: &Cnf) -> Result<ReductionOutput> {
    if k.vars == 0 {
        return Err(input_err!("formula has no variables"));
    }
    for (j, c) in k.clauses.iter().enumerate() {
        if c.iter().any(|l| l.pos) && c.iter().any(|l| !l.pos) {
            return Err(input_err!("clause {} mixes positive and negative literals", j + 1));
        }
    }
    let st = monsat_structure(base)?;
    let (w, q, qp) = (base[0].alphabet(), base[0].arity(), st.q_prime);
    let ell = k.vars * qp;
    let block = move |x: usize, t: &[usize]| -> Vec<usize> { t.iter().map(|&i| (x - 1) * qp + i).collect() };

    let mut relations: Vec<Relation> = base
        .iter()
        .enumerate()
        .map(|(i, r)| Relation::from_set(format!("S{}", i + 1), r.clone()))
        .collect();
    let mut constraints = Vec::new();
    let mut push = |name: String, terms: Vec<Term>, relations: &mut Vec<Relation>| {
        relations.push(Relation::extended(name, ExtendedRelation::new(terms)));
        constraints.push(Constraint::new(relations.len(), vec![]));
    };
    for (j, c) in k.clauses.iter().enumerate() {
        let b = usize::from(c.first().is_some_and(|l| l.pos));
        let (rel, t) = &st.origins[b];
        let terms = c.iter().map(|l| Term { rel: *rel, vars: block(l.var, t) }).collect();
        push(format!("K{}", j + 1), terms, &mut relations);
    }
    for x in 1..=k.vars {
        for (i, (rel, t)) in st.origins.iter().enumerate().skip(2) {
            push(format!("B{x}.{i}"), vec![Term { rel: *rel, vars: block(x, t) }], &mut relations);
        }
    }
    let target = Instance::new(Params::new(w, ell, q)?, AdmissibleSet::All, relations, constraints)?;

    let least = |s: &TupleSet| s.tuples().into_iter().min().expect("nonempty");
    let (z0, z1) = (least(&st.a0), least(&st.a1));
    let n = k.vars;
    let forward = move |x: &[u32]| -> Result<Assignment> {
        if !check_len(x, n, 2) {
            return Err(input_err!("expected a 0/1 word of length {n}"));
        }
        Ok(x.iter().flat_map(|&b| if b == 1 { z1.clone() } else { z0.clone() }).collect())
    };
    let (a0, a1) = (st.a0.clone(), st.a1.clone());
    let backward = move |a: &[u32]| -> Result<Assignment> {
        if !check_len(a, ell, w) {
            return Err(input_err!("expected a word of length {ell} over {w} letters"));
        }
        Ok(a.chunks(qp)
            .map(|blk| if a0.contains(blk) { 0 } else { u32::from(a1.contains(blk)) })
            .collect())
    };
    let formula = k.clone();
    let source = Source::new(
        "monotone CNF satisfiability",
        move |budget| all_words(2, n, budget),
        move |x| check_len(x, n, 2) && formula.eval(x),
    );
    Ok(ReductionOutput::new(
        "monsat",
        "monotone SAT is NP-complete (Gold)",
        target,
        source,
        forward,
        backward,
    ))
}
