//! 2-SAT by strongly connected components of the implication graph.

use std::fmt::Write as _;

use crate::csp::{AdmissibleSet, Assignment, Instance, Outcome, RelationBody};
use crate::error::{input_err, CspError, Result};
use crate::transfer::SolverBackend;

/// `x_var` or `¬x_var`; variables are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub pos: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Self { var, pos: true }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, pos: false }
    }

    pub fn holds(self, a: &[u32]) -> bool {
        (a[self.var - 1] == 1) == self.pos
    }

    fn node(self) -> usize {
        2 * (self.var - 1) + usize::from(!self.pos)
    }
}

/// A CNF formula; [`solve_2sat`] only accepts clauses of width at most 2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            clauses: Vec::new(),
        }
    }

    pub fn add_clause(&mut self, clause: impl Into<Vec<Lit>>) -> Result<()> {
        let clause = clause.into();
        if let Some(l) = clause.iter().find(|l| l.var == 0 || l.var > self.vars) {
            return Err(input_err!("literal on variable {} outside [1, {}]", l.var, self.vars));
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn eval(&self, a: &[u32]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(a)))
    }

    /// DIMACS `p cnf` text.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64;
                let _ = write!(out, "{} ", if l.pos { v } else { -v });
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS CNF; `c` lines are comments, clauses end at `0`.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut cnf: Option<Cnf> = None;
        let mut expected = 0usize;
        let mut cur: Vec<Lit> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(CspError::Parse(format!("bad DIMACS header {line:?}")));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| CspError::Parse(format!("bad number {s:?}")));
                cnf = Some(Cnf::new(num(parts[1])?));
                expected = num(parts[2])?;
                continue;
            }
            let f = cnf
                .as_mut()
                .ok_or_else(|| CspError::Parse("clause before the DIMACS header".into()))?;
            for tok in line.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| CspError::Parse(format!("bad literal {tok:?}")))?;
                if x == 0 {
                    f.add_clause(std::mem::take(&mut cur))
                        .map_err(|e| CspError::Parse(e.to_string()))?;
                } else {
                    cur.push(Lit {
                        var: x.unsigned_abs() as usize,
                        pos: x > 0,
                    });
                }
            }
        }
        let f = cnf.ok_or_else(|| CspError::Parse("missing DIMACS header".into()))?;
        if !cur.is_empty() {
            return Err(CspError::Parse("last clause is not terminated by 0".into()));
        }
        if f.clauses.len() != expected {
            return Err(CspError::Parse(format!(
                "header announces {expected} clauses, found {}",
                f.clauses.len()
            )));
        }
        Ok(f)
    }
}

/// Kosaraju over the implication graph on `2 * vars` literal nodes.
/// Components come out numbered in topological order of the condensation.
fn scc(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut radj = vec![Vec::new(); n];
    for (u, out) in adj.iter().enumerate() {
        for &v in out {
            radj[v].push(u);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    // reverse start order: unconstrained variables come out false
    for s in (0..n).rev() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((u, i)) = stack.pop() {
            if i < adj[u].len() {
                stack.push((u, i + 1));
                let v = adj[u][i];
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = c;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &radj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = c;
                    stack.push(v);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Satisfying 0/1 assignment of a width-2 formula, or `None`.
pub fn solve_2sat(f: &Cnf) -> Result<Option<Assignment>> {
    let n = 2 * f.vars;
    let mut adj = vec![Vec::new(); n];
    for c in &f.clauses {
        let (a, b) = match c.as_slice() {
            [] => return Ok(None),
            [a] => (*a, *a),
            [a, b] => (*a, *b),
            _ => return Err(input_err!("clause of width {} in a 2-SAT formula", c.len())),
        };
        // ¬a → b, ¬b → a
        adj[a.node() ^ 1].push(b.node());
        adj[b.node() ^ 1].push(a.node());
    }
    let comp = scc(n, &adj);
    let mut out = vec![0u32; f.vars];
    for v in 0..f.vars {
        let (t, fl) = (comp[2 * v], comp[2 * v + 1]);
        if t == fl {
            return Ok(None);
        }
        // later in topological order wins
        out[v] = u32::from(t > fl);
    }
    Ok(Some(out))
}

/// One clause per falsifying row of each constraint; an empty relation
/// becomes the empty clause. Needs `w = 2`, `W` = all words and relations
/// of arity at most 2.
pub fn binary_csp_to_2sat(inst: &Instance) -> Result<Cnf> {
    if inst.params.w != 2 || inst.admissible != AdmissibleSet::All {
        return Err(input_err!("2-SAT translation needs w = 2 and W = all words"));
    }
    let mut f = Cnf::new(inst.params.ell);
    for (j, c) in inst.constraints.iter().enumerate() {
        let set = match &inst.relations[c.rel - 1].body {
            RelationBody::Explicit(t) => t,
            RelationBody::Union(u) => u.set(),
            RelationBody::Extended(_) => {
                return Err(input_err!("constraint {} is an arity extension, not binary", j + 1))
            }
        };
        if set.arity() > 2 {
            return Err(input_err!("constraint {} has arity {}", j + 1, set.arity()));
        }
        if set.is_empty() {
            f.add_clause(Vec::new())?;
            continue;
        }
        let full = crate::csp::TupleSet::full(2, set.arity())?;
        for row in full.tuples() {
            if !set.contains(&row) {
                let clause: Vec<Lit> = row
                    .iter()
                    .zip(&c.vars)
                    .map(|(&b, &v)| Lit { var: v, pos: b == 0 })
                    .collect();
                f.add_clause(clause)?;
            }
        }
    }
    Ok(f)
}

/// Backend for binary boolean instances and their unions.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoSatBackend;

impl SolverBackend for TwoSatBackend {
    fn name(&self) -> &str {
        "2sat"
    }

    fn solve(&self, inst: &Instance) -> Result<Outcome> {
        let f = binary_csp_to_2sat(inst)?;
        Ok(match solve_2sat(&f)? {
            Some(a) => Outcome::Solution(a),
            None => Outcome::No,
        })
    }
}

/// Unique games over two labels: every relation must be the identity or the
/// swap permutation.
pub fn solve_ug2(inst: &Instance) -> Result<Outcome> {
    let id = crate::csp::TupleSet::new(2, 2, [[0u32, 0], [1, 1]])?;
    let swap = crate::csp::TupleSet::new(2, 2, [[0u32, 1], [1, 0]])?;
    for c in &inst.constraints {
        let ok = inst.tuple_set(c.rel).is_some_and(|t| *t == id || *t == swap);
        if !ok {
            return Err(input_err!(
                "relation {} is not a permutation of two labels",
                inst.relations[c.rel - 1].name
            ));
        }
    }
    TwoSatBackend.solve(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_formulas() {
        let mut f = Cnf::new(2);
        f.add_clause([Lit::pos(1), Lit::pos(2)]).unwrap();
        f.add_clause([Lit::neg(1), Lit::pos(2)]).unwrap();
        let a = solve_2sat(&f).unwrap().unwrap();
        assert_eq!(a[1], 1);
        assert!(f.eval(&a));

        let mut g = Cnf::new(1);
        g.add_clause([Lit::pos(1)]).unwrap();
        g.add_clause([Lit::neg(1)]).unwrap();
        assert_eq!(solve_2sat(&g).unwrap(), None);

        assert_eq!(solve_2sat(&Cnf::new(3)).unwrap(), Some(vec![0, 0, 0]));
    }

    #[test]
    fn dimacs_round_trip() {
        let mut f = Cnf::new(3);
        f.add_clause([Lit::pos(1), Lit::neg(3)]).unwrap();
        f.add_clause([Lit::neg(2)]).unwrap();
        f.add_clause(Vec::new()).unwrap();
        let text = f.to_dimacs();
        assert_eq!(text, "p cnf 3 3\n1 -3 0\n-2 0\n0\n");
        assert_eq!(Cnf::from_dimacs(&text).unwrap(), f);
        assert!(Cnf::from_dimacs("1 2 0\n").is_err());
        assert!(Cnf::from_dimacs("p cnf 2 2\n1 2 0\n").is_err());
    }

    #[test]
    fn wide_clause_rejected() {
        let mut f = Cnf::new(3);
        f.add_clause([Lit::pos(1), Lit::pos(2), Lit::pos(3)]).unwrap();
        assert!(solve_2sat(&f).is_err());
    }
}
