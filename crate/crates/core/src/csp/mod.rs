//! Parameters, relations, constraints and instances.
//!
//! Variables and constraints are 1-based; letters are `0..w`.

mod admissible;
mod brute;
pub mod family;
mod relation;

use std::collections::HashSet;

pub use admissible::{project_admissible, AdmissibleSet};
pub use brute::{brute_force_solve, brute_force_all, DEFAULT_BUDGET};
pub use relation::{eval_relation, universe_size, Relation, RelationBody, TupleSet};

use crate::error::{input_err, CspError, Result};

pub type Assignment = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub w: u32,
    pub ell: usize,
    pub q: usize,
    /// Size parameter; bookkeeping only.
    pub n: usize,
}

impl Params {
    pub fn new(w: u32, ell: usize, q: usize) -> Result<Self> {
        if w == 0 || ell == 0 {
            return Err(input_err!("need w >= 1 and ell >= 1, got w={w}, ell={ell}"));
        }
        if q > ell {
            return Err(input_err!("arity q={q} exceeds assignment length ell={ell}"));
        }
        Ok(Self { w, ell, q, n: ell })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Promise {
    /// All `(relation, variables)` pairs are pairwise distinct.
    RepetitionFree,
}

/// `R_rel(x_{vars[0]}, ..)`. Extended relations take an empty `vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub rel: usize,
    pub vars: Vec<usize>,
}

impl Constraint {
    pub fn new(rel: usize, vars: impl Into<Vec<usize>>) -> Self {
        Self {
            rel,
            vars: vars.into(),
        }
    }
}

/// Result of solving an instance. `Exception` only arises under a promise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solution(Assignment),
    No,
    Exception,
}

impl Outcome {
    pub fn solution(&self) -> Option<&Assignment> {
        match self {
            Outcome::Solution(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_solution(&self) -> bool {
        matches!(self, Outcome::Solution(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub params: Params,
    pub admissible: AdmissibleSet,
    pub relations: Vec<Relation>,
    pub constraints: Vec<Constraint>,
    pub promise: Option<Promise>,
}

/// Checks that `vars` is a tuple of pairwise distinct indices from `[ell]`.
pub fn check_var_tuple(vars: &[usize], ell: usize) -> Result<()> {
    let mut seen = HashSet::new();
    for &v in vars {
        if v == 0 || v > ell {
            return Err(input_err!("variable index {v} outside [1, {ell}]"));
        }
        if !seen.insert(v) {
            return Err(input_err!("repeated variable index {v} in {vars:?}"));
        }
    }
    Ok(())
}

impl Instance {
    pub fn new(
        params: Params,
        admissible: AdmissibleSet,
        relations: Vec<Relation>,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let inst = Self {
            params,
            admissible,
            relations,
            constraints,
            promise: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_promise(mut self, promise: Promise) -> Result<Self> {
        self.promise = Some(promise);
        self.validate()?;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        self.admissible.check(p)?;
        for (i, rel) in self.relations.iter().enumerate() {
            self.validate_relation(i + 1, rel)?;
        }
        for (j, c) in self.constraints.iter().enumerate() {
            let rel = self
                .relations
                .get(c.rel.wrapping_sub(1))
                .ok_or_else(|| input_err!("constraint {} refers to missing relation {}", j + 1, c.rel))?;
            match &rel.body {
                RelationBody::Extended(_) => {
                    if !c.vars.is_empty() {
                        return Err(input_err!(
                            "constraint {} uses extended relation {} and must have no variables",
                            j + 1,
                            rel.name
                        ));
                    }
                }
                _ => {
                    let arity = self.arity_of(c.rel);
                    if c.vars.len() != arity {
                        return Err(input_err!(
                            "constraint {} has {} variables but relation {} has arity {}",
                            j + 1,
                            c.vars.len(),
                            rel.name,
                            arity
                        ));
                    }
                    check_var_tuple(&c.vars, p.ell)?;
                }
            }
        }
        if self.promise == Some(Promise::RepetitionFree) {
            let mut seen = HashSet::new();
            for (j, c) in self.constraints.iter().enumerate() {
                if !seen.insert(c) {
                    return Err(input_err!(
                        "constraint {} repeats an earlier constraint under the repetition-free promise",
                        j + 1
                    ));
                }
            }
        }
        Ok(())
    }

    fn validate_relation(&self, index: usize, rel: &Relation) -> Result<()> {
        let p = &self.params;
        let explicit_at = |k: usize| -> Result<&TupleSet> {
            if k >= index || k == 0 {
                return Err(input_err!(
                    "relation {} may only refer to earlier relations, got {k}",
                    rel.name
                ));
            }
            self.relations[k - 1]
                .as_explicit()
                .ok_or_else(|| input_err!("relation {} refers to non-explicit relation {k}", rel.name))
        };
        match &rel.body {
            RelationBody::Explicit(t) => {
                if t.alphabet() != p.w {
                    return Err(input_err!(
                        "relation {} has alphabet {} but w = {}",
                        rel.name,
                        t.alphabet(),
                        p.w
                    ));
                }
                if t.arity() > p.ell {
                    return Err(input_err!("relation {} has arity above ell", rel.name));
                }
            }
            RelationBody::Union(u) => {
                for &k in u.members() {
                    let t = explicit_at(k)?;
                    if t.arity() != u.set().arity() || t.alphabet() != p.w {
                        return Err(input_err!("union {} mixes arities or alphabets", rel.name));
                    }
                }
                if u.set().alphabet() != p.w {
                    return Err(input_err!("union {} has the wrong alphabet", rel.name));
                }
            }
            RelationBody::Extended(e) => {
                for term in e.terms() {
                    let t = explicit_at(term.rel)?;
                    if t.arity() != term.vars.len() {
                        return Err(input_err!(
                            "term of {} has {} variables for a relation of arity {}",
                            rel.name,
                            term.vars.len(),
                            t.arity()
                        ));
                    }
                    check_var_tuple(&term.vars, p.ell)?;
                }
            }
        }
        Ok(())
    }

    /// Arity of relation `k`; extended relations have arity `ell`.
    pub fn arity_of(&self, k: usize) -> usize {
        match &self.relations[k - 1].body {
            RelationBody::Explicit(t) => t.arity(),
            RelationBody::Union(u) => u.set().arity(),
            RelationBody::Extended(_) => self.params.ell,
        }
    }

    /// Tuple set of relation `k` if it is explicit or a materialized union.
    pub fn tuple_set(&self, k: usize) -> Option<&TupleSet> {
        match &self.relations[k - 1].body {
            RelationBody::Explicit(t) => Some(t),
            RelationBody::Union(u) => Some(u.set()),
            RelationBody::Extended(_) => None,
        }
    }

    /// Whether constraint `j` (1-based) holds at `a`. Does not check `a ∈ W`.
    pub fn constraint_holds(&self, j: usize, a: &[u32]) -> bool {
        let c = &self.constraints[j - 1];
        match &self.relations[c.rel - 1].body {
            RelationBody::Explicit(t) => t.contains_at(a, &c.vars),
            RelationBody::Union(u) => u.set().contains_at(a, &c.vars),
            RelationBody::Extended(e) => e.holds(&self.relations, a),
        }
    }

    pub fn check_assignment(&self, a: &[u32]) -> Result<()> {
        if a.len() != self.params.ell {
            return Err(input_err!(
                "assignment has length {}, expected {}",
                a.len(),
                self.params.ell
            ));
        }
        if !self.admissible.contains(&self.params, a) {
            return Err(input_err!("assignment {a:?} is not admissible"));
        }
        Ok(())
    }

    /// Ascending 1-based indices of violated constraints.
    pub fn violations(&self, a: &[u32]) -> Result<Vec<usize>> {
        self.check_assignment(a)?;
        Ok((1..=self.m()).filter(|&j| !self.constraint_holds(j, a)).collect())
    }

    pub fn satisfies(&self, a: &[u32]) -> bool {
        a.len() == self.params.ell
            && self.admissible.contains(&self.params, a)
            && (1..=self.m()).all(|j| self.constraint_holds(j, a))
    }

    /// Fails with a contract error unless `a` is an admissible satisfying assignment.
    pub fn verify_solution(&self, a: &[u32], who: &str) -> Result<()> {
        if self.satisfies(a) {
            Ok(())
        } else {
            Err(CspError::Contract(format!(
                "{who} returned {a:?}, which does not satisfy the instance"
            )))
        }
    }
}
