//! Seeded random instance generators for tests and benchmarks.
//!
//! Every generator takes a `ChaCha8Rng`, so a seed fixes the output on
//! every platform.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::closures::{ExtendedRelation, Term, UnionRelation};
use crate::csp::{AdmissibleSet, Constraint, Instance, Params, Relation, TupleSet};
use crate::error::Result;
use crate::solvers::{Cnf, Lit};

/// Size limits for [`random_instance`]; each quantity is drawn uniformly
/// from its range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub w: (u32, u32),
    pub ell: (usize, usize),
    pub q: (usize, usize),
    pub m: (usize, usize),
    pub s: (usize, usize),
}

impl Default for RandomSpec {
    /// `w <= 3`, `ell <= 5`, `q <= 2`, `m <= 5`, `|R| <= 3`.
    fn default() -> Self {
        Self {
            w: (2, 3),
            ell: (1, 5),
            q: (1, 2),
            m: (0, 5),
            s: (1, 3),
        }
    }
}

/// A relation of the given shape; each tuple is kept with a probability
/// that is itself random, so both sparse and dense relations show up.
pub fn random_relation(rng: &mut ChaCha8Rng, w: u32, arity: usize) -> Result<TupleSet> {
    let density = rng.gen_range(0.2..0.9);
    let all = TupleSet::full(w, arity)?.tuples();
    TupleSet::new(w, arity, all.into_iter().filter(|_| rng.gen_bool(density)))
}

/// Pairwise distinct variables from `[ell]`.
pub fn random_vars(rng: &mut ChaCha8Rng, ell: usize, q: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (1..=ell).collect();
    all.shuffle(rng);
    all.truncate(q);
    all
}

fn sizes(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> (u32, usize, usize) {
    let w = rng.gen_range(spec.w.0..=spec.w.1);
    let ell = rng.gen_range(spec.ell.0..=spec.ell.1);
    let q = rng.gen_range(spec.q.0..=spec.q.1.min(ell));
    (w, ell, q)
}

fn random_type(rng: &mut ChaCha8Rng, spec: &RandomSpec, w: u32, q: usize) -> Result<Vec<Relation>> {
    let s = rng.gen_range(spec.s.0..=spec.s.1);
    (0..s)
        .map(|k| Ok(Relation::from_set(format!("R{}", k + 1), random_relation(rng, w, q)?)))
        .collect()
}

/// An ordinary instance with `W` = all words and a type of constant arity.
pub fn random_instance(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Result<Instance> {
    let (w, ell, q) = sizes(rng, spec);
    let relations = random_type(rng, spec, w, q)?;
    let m = rng.gen_range(spec.m.0..=spec.m.1);
    let constraints = (0..m)
        .map(|_| Constraint::new(rng.gen_range(1..=relations.len()), random_vars(rng, ell, q)))
        .collect();
    Instance::new(Params::new(w, ell, q)?, AdmissibleSet::All, relations, constraints)
}

/// An instance of the union closure: every constraint applies a union of
/// base relations (possibly the empty union).
pub fn random_union_instance(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Result<Instance> {
    let (w, ell, q) = sizes(rng, spec);
    let mut relations = random_type(rng, spec, w, q)?;
    let s = relations.len();
    let m = rng.gen_range(spec.m.0..=spec.m.1);
    let mut constraints = Vec::with_capacity(m);
    for j in 0..m {
        let members: Vec<usize> = (1..=s).filter(|_| rng.gen_bool(0.5)).collect();
        let u = UnionRelation::new(members, &relations[..s], w, q)?;
        relations.push(Relation::union(format!("U{}", j + 1), u));
        constraints.push(Constraint::new(relations.len(), random_vars(rng, ell, q)));
    }
    Instance::new(Params::new(w, ell, q)?, AdmissibleSet::All, relations, constraints)
}

/// An instance of arity extensions. With `single_base` every constraint
/// uses one base relation over a random index set; otherwise the terms mix
/// base relations freely.
pub fn random_extension_instance(rng: &mut ChaCha8Rng, spec: &RandomSpec, single_base: bool) -> Result<Instance> {
    let (w, ell, q) = sizes(rng, spec);
    let mut relations = random_type(rng, spec, w, q)?;
    let s = relations.len();
    let m = rng.gen_range(spec.m.0..=spec.m.1);
    let mut constraints = Vec::with_capacity(m);
    for j in 0..m {
        let k = rng.gen_range(1..=s);
        let count = rng.gen_range(0..=3);
        let terms: Vec<Term> = (0..count)
            .map(|_| Term {
                rel: if single_base { k } else { rng.gen_range(1..=s) },
                vars: random_vars(rng, ell, q),
            })
            .collect();
        relations.push(Relation::extended(format!("X{}", j + 1), ExtendedRelation::new(terms)));
        constraints.push(Constraint::new(relations.len(), vec![]));
    }
    Instance::new(Params::new(w, ell, q)?, AdmissibleSet::All, relations, constraints)
}

/// 1-SAT: `Id = {1}` and `Neg = {0}` on random variables.
pub fn random_1sat(rng: &mut ChaCha8Rng, ell: usize, m: usize) -> Result<Instance> {
    let relations = vec![
        Relation::explicit("Id", 2, 1, [[1u32]])?,
        Relation::explicit("Neg", 2, 1, [[0u32]])?,
    ];
    let constraints = (0..m)
        .map(|_| Constraint::new(rng.gen_range(1..=2), vec![rng.gen_range(1..=ell)]))
        .collect();
    Instance::new(Params::new(2, ell, 1)?, AdmissibleSet::All, relations, constraints)
}

/// Binary boolean instances over the four 2-clauses plus equality and
/// inequality.
pub fn random_2sat(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<Instance> {
    let mut relations = crate::reductions::rf_2sat_clause_relations()?;
    relations.push(Relation::explicit("Eq", 2, 2, [[0u32, 0], [1, 1]])?);
    relations.push(Relation::explicit("Ne", 2, 2, [[0u32, 1], [1, 0]])?);
    let s = relations.len();
    let constraints = (0..m)
        .map(|_| Constraint::new(rng.gen_range(1..=s), random_vars(rng, n, 2)))
        .collect();
    Instance::new(Params::new(2, n, 2)?, AdmissibleSet::All, relations, constraints)
}

/// Unique games over two labels: identity and swap constraints.
pub fn random_ug2(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<Instance> {
    let relations = vec![
        Relation::explicit("Id", 2, 2, [[0u32, 0], [1, 1]])?,
        Relation::explicit("Swap", 2, 2, [[0u32, 1], [1, 0]])?,
    ];
    let constraints = (0..m)
        .map(|_| Constraint::new(rng.gen_range(1..=2), random_vars(rng, n, 2)))
        .collect();
    Instance::new(Params::new(2, n, 2)?, AdmissibleSet::All, relations, constraints)
}

/// A CNF with clauses of width `1..=width` over distinct variables.
pub fn random_cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize, width: usize) -> Cnf {
    let mut f = Cnf::new(vars);
    for _ in 0..clauses {
        let len = rng.gen_range(1..=width.min(vars));
        let lits: Vec<Lit> = random_vars(rng, vars, len)
            .into_iter()
            .map(|var| Lit { var, pos: rng.gen_bool(0.5) })
            .collect();
        f.add_clause(lits).expect("variables are in range");
    }
    f
}

/// Like [`random_cnf`] with exactly three distinct variables per clause.
pub fn random_3cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> Cnf {
    let mut f = Cnf::new(vars);
    for _ in 0..clauses {
        let lits: Vec<Lit> = random_vars(rng, vars, 3)
            .into_iter()
            .map(|var| Lit { var, pos: rng.gen_bool(0.5) })
            .collect();
        f.add_clause(lits).expect("variables are in range");
    }
    f
}

/// Clauses that are all-positive or all-negative.
pub fn random_monotone_cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize, width: usize) -> Cnf {
    let mut f = Cnf::new(vars);
    for _ in 0..clauses {
        let len = rng.gen_range(1..=width.min(vars));
        let pos = rng.gen_bool(0.5);
        let lits: Vec<Lit> = random_vars(rng, vars, len).into_iter().map(|var| Lit { var, pos }).collect();
        f.add_clause(lits).expect("variables are in range");
    }
    f
}

/// Each pair (or ordered pair, when `directed`) present with probability `p`.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64, directed: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 1..=n {
        for v in 1..=n {
            if u != v && (directed || u < v) && rng.gen_bool(p) {
                out.push((u, v));
            }
        }
    }
    out
}
