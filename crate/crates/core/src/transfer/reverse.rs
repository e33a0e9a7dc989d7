use crate::csp::{Instance, Outcome, Relation, RelationBody};
use crate::error::{input_err, CspError, Result};
use crate::oracle::{Candidate, LazyMode, LazyOracle, Oracle, Policy, RevealLevel};

/// The explicit relations of `inst` (the type) and, for each relation
/// index of `inst`, its position in that list.
fn split_type(inst: &Instance) -> (Vec<Relation>, Vec<Option<usize>>) {
    let mut base = Vec::new();
    let mut pos = Vec::with_capacity(inst.relations.len());
    for r in &inst.relations {
        if matches!(r.body, RelationBody::Explicit(_)) {
            base.push(r.clone());
            pos.push(Some(base.len()));
        } else {
            pos.push(None);
        }
    }
    (base, pos)
}

fn simulate<F>(
    inst: &Instance,
    level: RevealLevel,
    candidates: impl Fn(&Instance, &[Relation], &[Option<usize>], usize) -> Result<Vec<Candidate>>,
    algo: F,
) -> Result<Outcome>
where
    F: FnOnce(&mut dyn Oracle) -> Result<Outcome>,
{
    inst.validate()?;
    let (base, pos) = split_type(inst);
    let mut possible = Vec::with_capacity(inst.m());
    for j in 1..=inst.m() {
        let set = candidates(inst, &base, &pos, j)?;
        if set.is_empty() {
            return Ok(Outcome::No);
        }
        possible.push(set);
    }
    let mut oracle = LazyOracle::new(
        inst.params,
        inst.admissible.clone(),
        base,
        possible,
        level,
        LazyMode::Accommodating,
        Policy::First,
    )?;
    match algo(&mut oracle)? {
        Outcome::Solution(a) => {
            if !inst.satisfies(&a) {
                return Err(CspError::Protocol(format!(
                    "hidden-instance algorithm returned {a:?}, which does not satisfy the instance"
                )));
            }
            Ok(Outcome::Solution(a))
        }
        Outcome::No => Ok(Outcome::No),
        Outcome::Exception => Err(CspError::Protocol("hidden-instance algorithm raised EXCEPTION".into())),
    }
}

fn explicit_candidate(pos: &[Option<usize>], k: usize, vars: &[usize]) -> Candidate {
    Candidate {
        rel: pos[k - 1].unwrap(),
        vars: vars.to_vec(),
    }
}

/// Solves an instance over the union closure of its explicit relations by
/// running `algo`, a solver for hidden instances under variable-revealing
/// oracles, against a simulated oracle. Constraint `j` at `t` with union
/// `U` may be any `R_k(x_t)` with `R_k ⊆ U`.
pub fn reverse_union_via_hidden<F>(inst: &Instance, algo: F) -> Result<Outcome>
where
    F: FnOnce(&mut dyn Oracle) -> Result<Outcome>,
{
    let candidates = |inst: &Instance, base: &[Relation], _: &[Option<usize>], j: usize| {
        let c = &inst.constraints[j - 1];
        let u = match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(t) => t,
            RelationBody::Union(u) => u.set(),
            RelationBody::Extended(_) => {
                return Err(input_err!("constraint {j} uses an extended relation; expected a union"))
            }
        };
        Ok(base
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let t = r.as_explicit()?;
                (t.arity() == u.arity() && t.is_subset(u)).then(|| Candidate {
                    rel: i + 1,
                    vars: c.vars.clone(),
                })
            })
            .collect::<Vec<_>>())
    };
    simulate(inst, RevealLevel::Vars, candidates, algo)
}

/// Solves an arity-extension instance (`R_k^I` constraints, one base
/// relation per constraint) with an algorithm for hidden instances under
/// relation-revealing oracles.
pub fn reverse_extension_via_hidden<F>(inst: &Instance, algo: F) -> Result<Outcome>
where
    F: FnOnce(&mut dyn Oracle) -> Result<Outcome>,
{
    let candidates = |inst: &Instance, _: &[Relation], pos: &[Option<usize>], j: usize| {
        let c = &inst.constraints[j - 1];
        match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(_) => Ok(vec![explicit_candidate(pos, c.rel, &c.vars)]),
            RelationBody::Extended(e) => {
                let Some(first) = e.terms().first() else { return Ok(Vec::new()) };
                if e.terms().iter().any(|t| t.rel != first.rel) {
                    return Err(input_err!("constraint {j} mixes base relations; expected one"));
                }
                Ok(e.terms().iter().map(|t| explicit_candidate(pos, t.rel, &t.vars)).collect())
            }
            RelationBody::Union(_) => Err(input_err!("constraint {j} uses a union; expected an extension")),
        }
    };
    simulate(inst, RevealLevel::Relation, candidates, algo)
}

/// Solves an instance over unions of arity extensions with an algorithm for
/// hidden instances under oracles that reveal only constraint indices.
pub fn reverse_unionx_via_hidden<F>(inst: &Instance, algo: F) -> Result<Outcome>
where
    F: FnOnce(&mut dyn Oracle) -> Result<Outcome>,
{
    let candidates = |inst: &Instance, _: &[Relation], pos: &[Option<usize>], j: usize| {
        let c = &inst.constraints[j - 1];
        Ok(match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(_) => vec![explicit_candidate(pos, c.rel, &c.vars)],
            RelationBody::Union(u) => u
                .members()
                .iter()
                .map(|&k| explicit_candidate(pos, k, &c.vars))
                .collect(),
            RelationBody::Extended(e) => e
                .terms()
                .iter()
                .map(|t| explicit_candidate(pos, t.rel, &t.vars))
                .collect(),
        })
    };
    simulate(inst, RevealLevel::None, candidates, algo)
}
