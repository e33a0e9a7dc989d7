use std::collections::{BTreeMap, HashSet};

use super::{EngineReport, SolverBackend};
use crate::closures::{
    dim_union, dim_union_x_bound, distinct_tuple_count, distinct_tuples, DimEstimate, ExtendedRelation,
    LiftedFamily, Term, UnionRelation,
};
use crate::csp::{
    brute_force_solve, project_admissible, Constraint, Instance, Outcome, Relation, TupleSet,
    DEFAULT_BUDGET,
};
use crate::error::{input_err, CspError, Result};
use crate::oracle::{Oracle, PublicInfo, Response};

/// Knobs shared by the engines.
#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    /// Memoized-state cap for the `dim(⋃X(R))` search of the lifted engines.
    pub state_cap: usize,
    /// Enumeration budget for `W` when computing bounds.
    pub budget: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            state_cap: 20_000,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Per-engine knowledge: produces the next instance for the backend and
/// absorbs violations.
trait EngineState {
    /// `None` when the synthesized instance is already known to be unsatisfiable.
    fn synthesize(&mut self) -> Result<Option<Instance>>;
    fn learn(&mut self, a: &[u32], j: usize, k: Option<usize>, vars: Option<Vec<usize>>) -> Result<()>;
}

struct Run {
    answer: Outcome,
    trials: usize,
    backend_calls: usize,
}

type ExceptionHandler<'a> = &'a dyn Fn(&Instance) -> Result<Outcome>;

fn drive(
    oracle: &mut dyn Oracle,
    backend: &dyn SolverBackend,
    state: &mut dyn EngineState,
    bound: u64,
    on_exception: ExceptionHandler<'_>,
) -> Result<Run> {
    let m = oracle.info().m;
    let level = oracle.info().level;
    let mut trials = 0usize;
    let mut backend_calls = 0usize;
    let finish = |answer, trials, backend_calls| Ok(Run { answer, trials, backend_calls });
    loop {
        let Some(inst) = state.synthesize()? else {
            return finish(Outcome::No, trials, backend_calls);
        };
        backend_calls += 1;
        let a = match backend.solve(&inst)? {
            Outcome::No => return finish(Outcome::No, trials, backend_calls),
            Outcome::Exception => {
                let answer = on_exception(&inst)?;
                return finish(answer, trials, backend_calls);
            }
            Outcome::Solution(a) => a,
        };
        inst.verify_solution(&a, backend.name())?;
        if trials as u64 >= bound {
            return Err(CspError::Protocol(format!(
                "trial bound {bound} reached without an answer; the oracle is inconsistent"
            )));
        }
        trials += 1;
        match oracle.submit(&a)? {
            Response::Yes => return finish(Outcome::Solution(a), trials, backend_calls),
            Response::Violation { j, k, vars } => {
                if j == 0 || j > m {
                    return Err(CspError::Protocol(format!("oracle reported constraint {j} of {m}")));
                }
                if k.is_some() != level.reveals_relation() || vars.is_some() != level.reveals_vars() {
                    return Err(CspError::Protocol(format!(
                        "oracle response does not match reveal level {}",
                        level.name()
                    )));
                }
                state.learn(&a, j, k, vars)?;
            }
        }
    }
}

fn no_exception(_: &Instance) -> Result<Outcome> {
    Err(CspError::Contract("backend returned EXCEPTION outside promise mode".into()))
}

fn require(info: &PublicInfo, relation: bool, vars: bool, engine: &str) -> Result<Vec<TupleSet>> {
    if (relation && !info.level.reveals_relation()) || (vars && !info.level.reveals_vars()) {
        return Err(input_err!(
            "the {engine} engine cannot run against a {}-revealing oracle",
            info.level.name()
        ));
    }
    info.relation_sets()
}

fn revealed_relation<'a>(sets: &'a [TupleSet], k: usize) -> Result<&'a TupleSet> {
    sets.get(k.wrapping_sub(1))
        .ok_or_else(|| CspError::Protocol(format!("oracle revealed unknown relation {k}")))
}

fn revealed_vars(info: &PublicInfo, rel: Option<&TupleSet>, vars: &[usize]) -> Result<()> {
    let bad = crate::csp::check_var_tuple(vars, info.params.ell).is_err()
        || rel.is_some_and(|r| r.arity() != vars.len());
    if bad {
        return Err(CspError::Protocol(format!("oracle revealed malformed variables {vars:?}")));
    }
    Ok(())
}

fn report(run: Run, bound: u64, dim: Option<DimEstimate>, dim_family: Option<usize>) -> EngineReport {
    EngineReport {
        answer: run.answer,
        trials: run.trials,
        bound,
        dim,
        dim_family,
        backend_calls: run.backend_calls,
    }
}

// ---------------------------------------------------------------- {R,V}

struct RvState {
    info: PublicInfo,
    sets: Vec<TupleSet>,
    revealed: BTreeMap<usize, Constraint>,
}

impl EngineState for RvState {
    fn synthesize(&mut self) -> Result<Option<Instance>> {
        let inst = Instance::new(
            self.info.params,
            self.info.admissible.clone(),
            self.info.relations.clone(),
            self.revealed.values().cloned().collect(),
        )?;
        Ok(Some(inst))
    }

    fn learn(&mut self, a: &[u32], j: usize, k: Option<usize>, vars: Option<Vec<usize>>) -> Result<()> {
        let (k, vars) = (k.unwrap(), vars.unwrap());
        let r = revealed_relation(&self.sets, k)?;
        revealed_vars(&self.info, Some(r), &vars)?;
        if r.contains_at(a, &vars) {
            return Err(CspError::Protocol(format!(
                "oracle reported constraint {j} violated, but {a:?} satisfies it"
            )));
        }
        if self.revealed.insert(j, Constraint::new(k, vars)).is_some() {
            return Err(CspError::Protocol(format!("constraint {j} revealed twice")));
        }
        Ok(())
    }
}

/// Solves a hidden instance when violations reveal relation and variables.
/// The backend solves ordinary instances of the type. At most `m + 1` trials.
pub fn solve_hidden_rv(oracle: &mut dyn Oracle, backend: &dyn SolverBackend) -> Result<EngineReport> {
    let info = oracle.info().clone();
    let sets = require(&info, true, true, "{R,V}")?;
    let bound = info.m as u64 + 1;
    let mut state = RvState {
        info,
        sets,
        revealed: BTreeMap::new(),
    };
    let run = drive(oracle, backend, &mut state, bound, &no_exception)?;
    Ok(report(run, bound, None, None))
}

// ---------------------------------------------------------------- {V}

struct VState {
    info: PublicInfo,
    sets: Vec<TupleSet>,
    /// `A_j`: projections of the trials blamed on each constraint.
    excluded: Vec<TupleSet>,
    /// Unknown until the first violation; such constraints are left out.
    vars: Vec<Option<Vec<usize>>>,
}

impl EngineState for VState {
    fn synthesize(&mut self) -> Result<Option<Instance>> {
        let p = self.info.params;
        let mut relations = self.info.relations.clone();
        let mut index_of: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut constraints = Vec::with_capacity(self.info.m);
        for j in 0..self.info.m {
            // ⋃R at guessed variables is not a relaxation unless ⋃R = W_q
            let Some(vars) = self.vars[j].clone() else { continue };
            let a_j = &self.excluded[j];
            let members: Vec<usize> = (1..=self.sets.len())
                .filter(|&k| self.sets[k - 1].is_disjoint(a_j))
                .collect();
            let rel = match index_of.get(&members) {
                Some(&idx) => idx,
                None => {
                    let u = UnionRelation::new(members.clone(), &self.info.relations, p.w, p.q)?;
                    if u.set().is_empty() {
                        return Ok(None);
                    }
                    let name = format!(
                        "U{{{}}}",
                        members.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
                    );
                    relations.push(Relation::union(name, u));
                    index_of.insert(members, relations.len());
                    relations.len()
                }
            };
            constraints.push(Constraint::new(rel, vars));
        }
        Ok(Some(Instance::new(p, self.info.admissible.clone(), relations, constraints)?))
    }

    fn learn(&mut self, a: &[u32], j: usize, _k: Option<usize>, vars: Option<Vec<usize>>) -> Result<()> {
        let vars = vars.unwrap();
        if vars.len() != self.info.params.q {
            return Err(CspError::Protocol(format!("oracle revealed {vars:?} for arity {}", self.info.params.q)));
        }
        revealed_vars(&self.info, None, &vars)?;
        match &self.vars[j - 1] {
            Some(prev) if *prev != vars => {
                return Err(CspError::Protocol(format!(
                    "constraint {j} revealed variables {vars:?} after {prev:?}"
                )))
            }
            _ => self.vars[j - 1] = Some(vars.clone()),
        }
        let u: Vec<u32> = vars.iter().map(|&v| a[v - 1]).collect();
        let point = TupleSet::new(self.info.params.w, vars.len(), [u])?;
        self.excluded[j - 1] = self.excluded[j - 1].union(&point);
        Ok(())
    }
}

/// Solves a hidden instance when violations reveal the variables, using a
/// backend for the union closure of the type.
/// At most `m * min(dim(⋃R), |W_q|) + 1` trials.
pub fn solve_hidden_v(oracle: &mut dyn Oracle, backend: &dyn SolverBackend) -> Result<EngineReport> {
    let info = oracle.info().clone();
    let sets = require(&info, false, true, "{V}")?;
    let p = info.params;
    if let Some(r) = sets.iter().find(|r| r.arity() != p.q) {
        return Err(input_err!("type relations must all have arity q = {}, found {}", p.q, r.arity()));
    }
    let dim = match dim_union(&sets) {
        Ok(value) => DimEstimate { value, exact: true },
        Err(CspError::Resource(_)) => DimEstimate {
            value: sets.len(),
            exact: false,
        },
        Err(e) => return Err(e),
    };
    let w_q = project_admissible(&info.admissible, &p, p.q)?.len() as u64;
    let bound = info.m as u64 * (dim.value as u64).min(w_q) + 1;
    let mut state = VState {
        excluded: vec![TupleSet::empty(p.w, p.q); info.m],
        vars: vec![None; info.m],
        info,
        sets,
    };
    let run = drive(oracle, backend, &mut state, bound, &no_exception)?;
    Ok(report(run, bound, Some(dim), None))
}

// ---------------------------------------------------------------- {R}

struct RState {
    info: PublicInfo,
    sets: Vec<TupleSet>,
    /// Revealed relation and surviving index tuples.
    known: Vec<Option<(usize, Vec<Vec<usize>>)>>,
}

impl EngineState for RState {
    fn synthesize(&mut self) -> Result<Option<Instance>> {
        let mut relations = self.info.relations.clone();
        let mut constraints = Vec::new();
        for (j, known) in self.known.iter().enumerate() {
            let Some((k, index_set)) = known else { continue };
            if index_set.is_empty() || self.sets[k - 1].is_empty() {
                return Ok(None);
            }
            let ext = ExtendedRelation::new(index_set.iter().map(|t| Term {
                rel: *k,
                vars: t.clone(),
            }));
            relations.push(Relation::extended(format!("E{}", j + 1), ext));
            constraints.push(Constraint::new(relations.len(), Vec::new()));
        }
        Ok(Some(Instance::new(
            self.info.params,
            self.info.admissible.clone(),
            relations,
            constraints,
        )?))
    }

    fn learn(&mut self, a: &[u32], j: usize, k: Option<usize>, _vars: Option<Vec<usize>>) -> Result<()> {
        let k = k.unwrap();
        let r = revealed_relation(&self.sets, k)?;
        let slot = &mut self.known[j - 1];
        match slot {
            Some((prev, _)) if *prev != k => {
                return Err(CspError::Protocol(format!("constraint {j} revealed relation {k} after {prev}")))
            }
            Some(_) => {}
            None => *slot = Some((k, distinct_tuples(self.info.params.ell, r.arity()))),
        }
        let (_, index_set) = slot.as_mut().unwrap();
        index_set.retain(|t| !r.contains_at(a, t));
        Ok(())
    }
}

/// Solves a hidden instance when violations reveal the relation, using a
/// backend for arity extensions. At most `m * |[ell]^(q)| + 1` trials.
pub fn solve_hidden_r(oracle: &mut dyn Oracle, backend: &dyn SolverBackend) -> Result<EngineReport> {
    let info = oracle.info().clone();
    let sets = require(&info, true, false, "{R}")?;
    let q = sets.iter().map(TupleSet::arity).max().unwrap_or(info.params.q);
    let bound = info.m as u64 * distinct_tuple_count(info.params.ell, q) + 1;
    let mut state = RState {
        known: vec![None; info.m],
        info,
        sets,
    };
    let run = drive(oracle, backend, &mut state, bound, &no_exception)?;
    Ok(report(run, bound, None, None))
}

// ---------------------------------------------------------------- lifted

struct LiftedState {
    info: PublicInfo,
    sets: Vec<TupleSet>,
    /// Terms `(k, t)` whose extension avoids every trial blamed on constraint `j`.
    alive: Vec<Vec<Term>>,
}

impl EngineState for LiftedState {
    fn synthesize(&mut self) -> Result<Option<Instance>> {
        let mut relations = self.info.relations.clone();
        let mut index_of: BTreeMap<Vec<Term>, usize> = BTreeMap::new();
        let mut constraints = Vec::with_capacity(self.info.m);
        for terms in &self.alive {
            if terms.is_empty() {
                return Ok(None);
            }
            let idx = match index_of.get(terms) {
                Some(&idx) => idx,
                None => {
                    let ext = ExtendedRelation::new(terms.iter().cloned());
                    relations.push(Relation::extended(format!("X{}", relations.len() + 1), ext));
                    index_of.insert(terms.clone(), relations.len());
                    relations.len()
                }
            };
            constraints.push(Constraint::new(idx, Vec::new()));
        }
        Ok(Some(Instance::new(
            self.info.params,
            self.info.admissible.clone(),
            relations,
            constraints,
        )?))
    }

    fn learn(&mut self, a: &[u32], j: usize, k: Option<usize>, vars: Option<Vec<usize>>) -> Result<()> {
        if let Some(k) = k {
            revealed_relation(&self.sets, k)?;
        }
        if let Some(v) = &vars {
            revealed_vars(&self.info, k.map(|k| &self.sets[k - 1]), v)?;
        }
        let sets = &self.sets;
        self.alive[j - 1].retain(|t| {
            !sets[t.rel - 1].contains_at(a, &t.vars)
                && k.is_none_or(|k| t.rel == k)
                && vars.as_ref().is_none_or(|v| t.vars == *v)
        });
        Ok(())
    }
}

fn lifted_setup(
    oracle: &mut dyn Oracle,
    opts: &EngineOptions,
) -> Result<(LiftedState, u64, DimEstimate, Option<usize>)> {
    let info = oracle.info().clone();
    let sets = info.relation_sets()?;
    let p = info.params;
    let (dim, dim_family) = match LiftedFamily::new(&sets, &p, &info.admissible, opts.budget) {
        Ok(fam) => (fam.dim_union(opts.state_cap), Some(fam.dim_family())),
        Err(CspError::Resource(_)) => (
            DimEstimate {
                value: dim_union_x_bound(&sets, p.ell),
                exact: false,
            },
            None,
        ),
        Err(e) => return Err(e),
    };
    let all_terms: Vec<Term> = sets
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .flat_map(|(k, r)| {
            distinct_tuples(p.ell, r.arity())
                .into_iter()
                .map(move |t| Term { rel: k + 1, vars: t })
        })
        .collect();
    let bound = info.m as u64 * dim.value as u64 + 1;
    let state = LiftedState {
        alive: vec![all_terms; info.m],
        info,
        sets,
    };
    Ok((state, bound, dim, dim_family))
}

/// Solves a hidden instance against an oracle revealing only constraint
/// indices, using a backend for unions of arity extensions. Revealed
/// relations or variables, if any, are used to prune.
/// At most `m * dim(⋃X(R)) + 1` trials.
pub fn solve_hidden_empty(
    oracle: &mut dyn Oracle,
    backend: &dyn SolverBackend,
    opts: &EngineOptions,
) -> Result<EngineReport> {
    let (mut state, bound, dim, dim_family) = lifted_setup(oracle, opts)?;
    let run = drive(oracle, backend, &mut state, bound, &no_exception)?;
    Ok(report(run, bound, Some(dim), dim_family))
}

/// Solves a hidden repetition-free instance with a backend that solves
/// under the promise: EXCEPTION from the backend means no satisfiable
/// repetition-free instance is included, so the answer is NO.
///
/// With `verify`, every EXCEPTION is double-checked by brute force and a
/// wrongful one is reported as a contract violation.
pub fn solve_hidden_v_promise(
    oracle: &mut dyn Oracle,
    backend: &dyn SolverBackend,
    opts: &EngineOptions,
    verify: bool,
) -> Result<EngineReport> {
    let (mut state, bound, dim, dim_family) = lifted_setup(oracle, opts)?;
    let budget = opts.budget;
    let on_exception = move |inst: &Instance| -> Result<Outcome> {
        if verify && includes_satisfiable_rf(inst, budget)? {
            return Err(CspError::Contract(
                "backend returned EXCEPTION although a satisfiable repetition-free instance is included".into(),
            ));
        }
        Ok(Outcome::No)
    };
    let run = drive(oracle, backend, &mut state, bound, &on_exception)?;
    Ok(report(run, bound, Some(dim), dim_family))
}

/// Whether choosing one term per constraint, pairwise distinct, can give a
/// satisfiable instance. Constraints must be explicit, union or extended;
/// a union at `t` offers one term per member. Exhaustive.
pub fn includes_satisfiable_rf(inst: &Instance, budget: u64) -> Result<bool> {
    let options: Vec<Vec<Term>> = inst
        .constraints
        .iter()
        .map(|c| match &inst.relations[c.rel - 1].body {
            crate::RelationBody::Explicit(_) => vec![Term {
                rel: c.rel,
                vars: c.vars.clone(),
            }],
            crate::RelationBody::Union(u) => u
                .members()
                .iter()
                .map(|&k| Term {
                    rel: k,
                    vars: c.vars.clone(),
                })
                .collect(),
            crate::RelationBody::Extended(e) => e.terms().to_vec(),
        })
        .collect();
    let base: Vec<Relation> = inst.relations.clone();
    let mut chosen: Vec<Term> = Vec::with_capacity(options.len());
    let mut used: HashSet<Term> = HashSet::new();
    let mut spent = 0u64;
    fn rec(
        i: usize,
        options: &[Vec<Term>],
        chosen: &mut Vec<Term>,
        used: &mut HashSet<Term>,
        inst: &Instance,
        base: &[Relation],
        spent: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        if i == options.len() {
            *spent += 1;
            if *spent > budget {
                return Err(CspError::Resource("repetition-free inclusion search exceeded its budget".into()));
            }
            let constraints = chosen.iter().map(|t| Constraint::new(t.rel, t.vars.clone())).collect();
            let sub = Instance::new(inst.params, inst.admissible.clone(), base.to_vec(), constraints)?;
            return Ok(brute_force_solve(&sub, budget)?.is_solution());
        }
        for t in &options[i] {
            if used.insert(t.clone()) {
                chosen.push(t.clone());
                let found = rec(i + 1, options, chosen, used, inst, base, spent, budget)?;
                chosen.pop();
                used.remove(t);
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
    rec(0, &options, &mut chosen, &mut used, inst, &base, &mut spent, budget)
}
