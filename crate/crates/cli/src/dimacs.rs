//! Boolean targets as CNF.
//!
//! An explicit or union constraint contributes one clause per forbidden
//! row. An extended constraint is a disjunction of terms, so it becomes a
//! single clause when every term forbids exactly one row.

use hidden_csp::closures::Term;
use hidden_csp::solvers::{Cnf, Lit};
use hidden_csp::{AdmissibleSet, CspError, Instance, RelationBody, Result, TupleSet};

fn set_of(inst: &Instance, k: usize) -> Result<&TupleSet> {
    inst.tuple_set(k)
        .ok_or_else(|| CspError::Input(format!("relation {k} has no tuple set")))
}

fn forbidden(set: &TupleSet) -> Result<Vec<Vec<u32>>> {
    let all = TupleSet::full(2, set.arity())?;
    Ok(all.tuples().into_iter().filter(|t| !set.contains(t)).collect())
}

/// Literals true exactly off `row`.
fn blocking(row: &[u32], vars: &[usize]) -> Vec<Lit> {
    row.iter().zip(vars).map(|(&x, &var)| Lit { var, pos: x == 0 }).collect()
}

fn term_clause(inst: &Instance, t: &Term) -> Result<Vec<Lit>> {
    let rows = forbidden(set_of(inst, t.rel)?)?;
    match rows.as_slice() {
        [row] => Ok(blocking(row, &t.vars)),
        _ => Err(CspError::Input(format!(
            "term over relation {} is not a clause, so the constraint has no single-clause form",
            inst.relations[t.rel - 1].name
        ))),
    }
}

pub fn instance_to_cnf(inst: &Instance) -> Result<Cnf> {
    if inst.params.w != 2 || inst.admissible != AdmissibleSet::All {
        return Err(CspError::Input("DIMACS output needs a boolean instance over all words".into()));
    }
    let mut f = Cnf::new(inst.params.ell);
    for c in &inst.constraints {
        match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(_) | RelationBody::Union(_) => {
                for row in forbidden(set_of(inst, c.rel)?)? {
                    f.add_clause(blocking(&row, &c.vars))?;
                }
            }
            RelationBody::Extended(e) => {
                let mut lits: Vec<Lit> = Vec::new();
                for t in e.terms() {
                    lits.extend(term_clause(inst, t)?);
                }
                lits.sort_by_key(|l| (l.var, l.pos));
                lits.dedup();
                let tautology = lits.windows(2).any(|p| p[0].var == p[1].var);
                if !tautology {
                    f.add_clause(lits)?;
                }
            }
        }
    }
    Ok(f)
}
