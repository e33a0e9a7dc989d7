//! Union closure, arity extensions and the `dim` measure.
//!
//! `dim` of a family counts strict-inclusion steps in its longest chain, so
//! a single nonempty relation has `dim` 1.

use std::collections::HashMap;

use crate::csp::{check_var_tuple, AdmissibleSet, Assignment, Params, Relation, TupleSet};
use crate::error::{input_err, CspError, Result};

/// Largest type size whose union closure is materialized.
pub const MAX_CLOSURE_GENERATORS: usize = 20;

/// Default cap on memoized states when computing `dim` of a generated family.
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// A member of the union closure: the union of some explicit relations,
/// kept together with its materialized tuple set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionRelation {
    members: Vec<usize>,
    set: TupleSet,
}

impl UnionRelation {
    /// Union of the explicit relations `members` (1-based into `relations`).
    pub fn new(members: Vec<usize>, relations: &[Relation], w: u32, arity: usize) -> Result<Self> {
        let mut set = TupleSet::empty(w, arity);
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        for &k in &members {
            let t = relations
                .get(k.wrapping_sub(1))
                .and_then(Relation::as_explicit)
                .ok_or_else(|| input_err!("union member {k} is not an explicit relation"))?;
            if t.arity() != arity || t.alphabet() != w {
                return Err(input_err!(
                    "union member {k} has arity {} over {} letters, expected {arity} over {w}",
                    t.arity(),
                    t.alphabet()
                ));
            }
            set = set.union(t);
        }
        Ok(Self { members, set })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn set(&self) -> &TupleSet {
        &self.set
    }
}

/// `R_rel^{(vars)}`: the `ell`-ary extension of an explicit relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub rel: usize,
    pub vars: Vec<usize>,
}

/// A union of extension terms; covers `R^(t)`, `R^I` and members of `⋃X(R)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExtendedRelation {
    terms: Vec<Term>,
}

impl ExtendedRelation {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut terms: Vec<Term> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        Self { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub(crate) fn holds(&self, relations: &[Relation], a: &[u32]) -> bool {
        self.terms.iter().any(|t| {
            relations[t.rel - 1]
                .as_explicit()
                .is_some_and(|r| r.contains_at(a, &t.vars))
        })
    }
}

/// Evaluates an extended relation: true iff some term's projection lies in its relation.
pub fn eval_extended(ext: &ExtendedRelation, relations: &[Relation], ell: usize, a: &[u32]) -> Result<bool> {
    if a.len() != ell {
        return Err(input_err!("assignment of length {} for arity {ell}", a.len()));
    }
    Ok(ext.holds(relations, a))
}

fn explicit(relations: &[Relation], k: usize) -> Result<&TupleSet> {
    relations
        .get(k.wrapping_sub(1))
        .and_then(Relation::as_explicit)
        .ok_or_else(|| input_err!("relation {k} is missing or not explicit"))
}

/// `R_k^{(t)}`.
pub fn extend(relations: &[Relation], k: usize, t: &[usize], ell: usize) -> Result<ExtendedRelation> {
    extend_over_set(relations, k, &[t.to_vec()], ell)
}

/// `R_k^I`; an empty `I` gives the always-false relation.
pub fn extend_over_set(
    relations: &[Relation],
    k: usize,
    index_set: &[Vec<usize>],
    ell: usize,
) -> Result<ExtendedRelation> {
    let r = explicit(relations, k)?;
    for t in index_set {
        if t.len() != r.arity() {
            return Err(input_err!(
                "index tuple {t:?} has length {}, relation {k} has arity {}",
                t.len(),
                r.arity()
            ));
        }
        check_var_tuple(t, ell)?;
    }
    Ok(ExtendedRelation::new(
        index_set.iter().map(|t| Term { rel: k, vars: t.clone() }),
    ))
}

/// `[ell]^(q)`: tuples of pairwise distinct indices, in lexicographic order.
pub fn distinct_tuples(ell: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(ell: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for v in 1..=ell {
            if !cur.contains(&v) {
                cur.push(v);
                rec(ell, q, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if q <= ell {
        rec(ell, q, &mut Vec::with_capacity(q), &mut out);
    }
    out
}

/// `|[ell]^(q)| = ell! / (ell - q)!`.
pub fn distinct_tuple_count(ell: usize, q: usize) -> u64 {
    if q > ell {
        return 0;
    }
    ((ell - q + 1)..=ell).map(|x| x as u64).product()
}

/// Every union of a subset of `relations`, deduplicated, including the empty union.
pub fn union_closure(relations: &[TupleSet]) -> Result<Vec<TupleSet>> {
    let s = relations.len();
    if s > MAX_CLOSURE_GENERATORS {
        return Err(CspError::Resource(format!(
            "union closure of {s} relations exceeds the {MAX_CLOSURE_GENERATORS}-relation limit"
        )));
    }
    let (w, arity) = closure_shape(relations)?;
    let mut out: Vec<TupleSet> = Vec::with_capacity(1 << s);
    out.push(TupleSet::empty(w, arity));
    // unions of subsets of the first i relations, built incrementally
    for r in relations {
        let extra: Vec<TupleSet> = out.iter().map(|u| u.union(r)).collect();
        out.extend(extra);
        out.sort_by(|a, b| a.codes().cmp(b.codes()));
        out.dedup();
    }
    Ok(out)
}

fn closure_shape(relations: &[TupleSet]) -> Result<(u32, usize)> {
    let Some(first) = relations.first() else {
        return Ok((1, 0));
    };
    let shape = (first.alphabet(), first.arity());
    if relations.iter().any(|r| (r.alphabet(), r.arity()) != shape) {
        return Err(input_err!("relations of a type must share alphabet and arity"));
    }
    Ok(shape)
}

/// `dim(⋃R)`.
pub fn dim_union(relations: &[TupleSet]) -> Result<usize> {
    if relations.len() > MAX_CLOSURE_GENERATORS {
        return Err(CspError::Resource(format!(
            "dim of a union closure over {} relations is not computed",
            relations.len()
        )));
    }
    closure_shape(relations)?;
    let sets: Vec<Vec<u64>> = relations.iter().map(|r| r.codes().to_vec()).collect();
    let gens = compact_bitsets(&sets);
    dim_generated(&gens, usize::MAX).ok_or_else(|| CspError::Internal("unbounded dim search".into()))
}

/// `dim` of a family together with whether it is exact or an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimEstimate {
    pub value: usize,
    pub exact: bool,
}

/// Maps sets of codes to bitsets over the union of their elements.
fn compact_bitsets(sets: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut universe: Vec<u64> = sets.iter().flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    let words = universe.len().div_ceil(64).max(1);
    let mut out: Vec<Vec<u64>> = sets
        .iter()
        .map(|s| {
            let mut bits = vec![0u64; words];
            for c in s {
                let i = universe.binary_search(c).unwrap();
                bits[i / 64] |= 1 << (i % 64);
            }
            bits
        })
        .filter(|b| b.iter().any(|&x| x != 0))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn is_subset_bits(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Longest chain of the union-closed family generated by `gens`, counted in
/// steps from the empty set. Every chain refines to one that adds a single
/// generator per step, so a memoized search over reachable unions suffices.
/// Returns `None` when more than `state_cap` unions would be memoized.
fn dim_generated(gens: &[Vec<u64>], state_cap: usize) -> Option<usize> {
    fn go(
        state: &Vec<u64>,
        gens: &[Vec<u64>],
        memo: &mut HashMap<Vec<u64>, usize>,
        cap: usize,
    ) -> Option<usize> {
        if let Some(&d) = memo.get(state) {
            return Some(d);
        }
        if memo.len() >= cap {
            return None;
        }
        let mut best = 0;
        for g in gens {
            if !is_subset_bits(g, state) {
                let next: Vec<u64> = state.iter().zip(g).map(|(x, y)| x | y).collect();
                best = best.max(1 + go(&next, gens, memo, cap)?);
            }
        }
        memo.insert(state.clone(), best);
        Some(best)
    }
    let Some(first) = gens.first() else {
        return Some(0);
    };
    let mut memo = HashMap::new();
    go(&vec![0u64; first.len()], gens, &mut memo, state_cap)
}

/// Longest chain in `{∅} ∪ gens` under inclusion, in steps.
fn dim_poset(gens: &[Vec<u64>]) -> usize {
    let mut order: Vec<usize> = (0..gens.len()).collect();
    let weight = |g: &Vec<u64>| g.iter().map(|x| x.count_ones()).sum::<u32>();
    order.sort_by_key(|&i| weight(&gens[i]));
    let mut depth = vec![1usize; gens.len()];
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[..pos] {
            if gens[i] != gens[j] && is_subset_bits(&gens[j], &gens[i]) {
                depth[i] = depth[i].max(depth[j] + 1);
            }
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

/// The extensions `R_k^(t) ∩ W` for every explicit relation `k` of the
/// type and every `t ∈ [ell]^(q)`, as sets of indices into the enumerated `W`.
pub struct LiftedFamily {
    pub words: Vec<Assignment>,
    /// `(k, t)` and the positions of `W` in `R_k^(t)`.
    pub generators: Vec<(Term, Vec<u64>)>,
}

impl LiftedFamily {
    pub fn new(relations: &[TupleSet], p: &Params, w_set: &AdmissibleSet, budget: u64) -> Result<Self> {
        let words = w_set.enumerate(p, budget)?;
        let mut generators = Vec::new();
        for (k, r) in relations.iter().enumerate() {
            for t in distinct_tuples(p.ell, r.arity()) {
                let members = words
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| r.contains_at(a, &t))
                    .map(|(i, _)| i as u64)
                    .collect();
                generators.push((Term { rel: k + 1, vars: t }, members));
            }
        }
        Ok(Self { words, generators })
    }

    fn bitsets(&self) -> Vec<Vec<u64>> {
        let words = self.words.len().div_ceil(64).max(1);
        let mut out: Vec<Vec<u64>> = self
            .generators
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(_, m)| {
                let mut bits = vec![0u64; words];
                for &i in m {
                    bits[(i / 64) as usize] |= 1 << (i % 64);
                }
                bits
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `dim(⋃X(R))`, exact when the search stays under `state_cap`, else the
    /// upper bound `min(#distinct nonempty generators, |⋃ generators|)`.
    pub fn dim_union(&self, state_cap: usize) -> DimEstimate {
        let gens = self.bitsets();
        match dim_generated(&gens, state_cap) {
            Some(value) => DimEstimate { value, exact: true },
            None => DimEstimate {
                value: gens.len().min(union_weight(&gens)),
                exact: false,
            },
        }
    }

    /// `dim(X(R))`, the longest chain inside the family itself.
    pub fn dim_family(&self) -> usize {
        dim_poset(&self.bitsets())
    }
}

fn union_weight(gens: &[Vec<u64>]) -> usize {
    let Some(first) = gens.first() else { return 0 };
    let mut acc = vec![0u64; first.len()];
    for g in gens {
        for (a, b) in acc.iter_mut().zip(g) {
            *a |= b;
        }
    }
    acc.iter().map(|x| x.count_ones() as usize).sum()
}

/// Upper bound on `dim(⋃X(R))` that needs no enumeration of `W`:
/// the number of `(k, t)` pairs with `R_k` nonempty.
pub fn dim_union_x_bound(relations: &[TupleSet], ell: usize) -> usize {
    relations
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| distinct_tuple_count(ell, r.arity()) as usize)
        .sum()
}

/// Explicit list of the members of `W` where `ext` holds.
pub fn materialize_extended(
    ext: &ExtendedRelation,
    relations: &[Relation],
    p: &Params,
    w_set: &AdmissibleSet,
    budget: u64,
) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    w_set.visit(p, budget, &mut |a| {
        if ext.holds(relations, a) {
            out.push(a.to_vec());
        }
        false
    })?;
    Ok(out)
}
