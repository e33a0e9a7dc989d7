//! Text formats.
//!
//! Instances are JSON documents:
//!
//! ```json
//! {
//!   "params": {"w": 2, "ell": 3, "q": 1},
//!   "assignments": {"kind": "all"},
//!   "relations": [
//!     {"name": "Id", "arity": 1, "tuples": [[1]]},
//!     {"name": "Neg", "arity": 1, "tuples": [[0]]},
//!     {"name": "Any", "arity": 1, "union": [1, 2]},
//!     {"name": "X", "terms": [{"rel": 1, "vars": [2]}, {"rel": 2, "vars": [3]}]}
//!   ],
//!   "constraints": [{"rel": 1, "vars": [1]}, {"rel": 4, "vars": []}],
//!   "promise": "repetition-free"
//! }
//! ```
//!
//! Indices are 1-based. `assignments.kind` is one of `all`, `list` (with
//! `list`), `permutations`, `min-weight` (with `k`) or a family name:
//! `spanning-trees`, `in-arborescences` (`n`, `root`), `undirected-cycle-covers`,
//! `directed-cycle-covers`, `bipartite-perfect-matchings`, `directed-paths`
//! and `undirected-paths` (`n`, `s`, `t`), `cliques` (`n`, `k`),
//! `hamiltonian-cycles` (`n`), `group-tables` (`p`). Union relations list
//! earlier explicit relations; a relation with `terms` is an arity extension
//! and is used by constraints with an empty variable list.
//!
//! Graphs use a line format: `n N` first, then one edge `u v` per line.
//! Extra lines: `s V`, `t V`, `k K`, `p P`, `z V`, `cross a b c d` (edges
//! `{a,b}` and `{c,d}` cross), `fixed u v` (an edge that must be used) and
//! `set`, which starts a new edge set; later edges go into that set. `#`
//! starts a comment.
//!
//! CNF formulas use DIMACS, see [`Cnf`](crate::solvers::Cnf).

use serde::{Deserialize, Serialize};

use crate::closures::{ExtendedRelation, Term, UnionRelation};
use crate::csp::family::Family;
use crate::csp::{AdmissibleSet, Assignment, Constraint, Instance, Params, Promise, Relation, RelationBody, TupleSet};
use crate::error::{CspError, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    w: u32,
    ell: usize,
    q: usize,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct AssignmentsDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    list: Option<Vec<Assignment>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    rel: usize,
    vars: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tuples: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    union: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    params: ParamsDoc,
    assignments: AssignmentsDoc,
    relations: Vec<RelationDoc>,
    constraints: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    promise: Option<String>,
}

fn parse_err(msg: impl Into<String>) -> CspError {
    CspError::Parse(msg.into())
}

fn assignments_doc(w: &AdmissibleSet) -> AssignmentsDoc {
    let mut d = AssignmentsDoc::default();
    let kind = match w {
        AdmissibleSet::All => "all",
        AdmissibleSet::List(words) => {
            d.list = Some(words.clone());
            "list"
        }
        AdmissibleSet::Permutations => "permutations",
        AdmissibleSet::MinWeight(k) => {
            d.k = Some(*k);
            "min-weight"
        }
        AdmissibleSet::Family(f) => match *f {
            Family::SpanningTrees { n } => {
                d.n = Some(n);
                "spanning-trees"
            }
            Family::InArborescences { n, root } => {
                (d.n, d.root) = (Some(n), Some(root));
                "in-arborescences"
            }
            Family::UndirectedCycleCovers { n } => {
                d.n = Some(n);
                "undirected-cycle-covers"
            }
            Family::DirectedCycleCovers { n } => {
                d.n = Some(n);
                "directed-cycle-covers"
            }
            Family::BipartitePerfectMatchings { n } => {
                d.n = Some(n);
                "bipartite-perfect-matchings"
            }
            Family::DirectedPaths { n, s, t } => {
                (d.n, d.s, d.t) = (Some(n), Some(s), Some(t));
                "directed-paths"
            }
            Family::UndirectedPaths { n, s, t } => {
                (d.n, d.s, d.t) = (Some(n), Some(s), Some(t));
                "undirected-paths"
            }
            Family::Cliques { n, k } => {
                (d.n, d.k) = (Some(n), Some(k));
                "cliques"
            }
            Family::HamiltonianCycles { n } => {
                d.n = Some(n);
                "hamiltonian-cycles"
            }
            Family::GroupTables { p } => {
                d.p = Some(p);
                "group-tables"
            }
        },
    };
    d.kind = kind.to_string();
    d
}

fn admissible_of(d: AssignmentsDoc) -> Result<AdmissibleSet> {
    let need = |x: Option<usize>, what: &str| x.ok_or_else(|| parse_err(format!("assignments kind {:?} needs {what}", d.kind)));
    let n = || need(d.n, "n");
    let fam = |f: Family| Ok(AdmissibleSet::Family(f));
    match d.kind.as_str() {
        "all" => Ok(AdmissibleSet::All),
        "list" => Ok(AdmissibleSet::list(d.list.clone().ok_or_else(|| parse_err("kind list needs list"))?)),
        "permutations" => Ok(AdmissibleSet::Permutations),
        "min-weight" => Ok(AdmissibleSet::MinWeight(need(d.k, "k")?)),
        "spanning-trees" => fam(Family::SpanningTrees { n: n()? }),
        "in-arborescences" => fam(Family::InArborescences { n: n()?, root: need(d.root, "root")? }),
        "undirected-cycle-covers" => fam(Family::UndirectedCycleCovers { n: n()? }),
        "directed-cycle-covers" => fam(Family::DirectedCycleCovers { n: n()? }),
        "bipartite-perfect-matchings" => fam(Family::BipartitePerfectMatchings { n: n()? }),
        "directed-paths" => fam(Family::DirectedPaths { n: n()?, s: need(d.s, "s")?, t: need(d.t, "t")? }),
        "undirected-paths" => fam(Family::UndirectedPaths { n: n()?, s: need(d.s, "s")?, t: need(d.t, "t")? }),
        "cliques" => fam(Family::Cliques { n: n()?, k: need(d.k, "k")? }),
        "hamiltonian-cycles" => fam(Family::HamiltonianCycles { n: n()? }),
        "group-tables" => fam(Family::GroupTables { p: need(d.p, "p")? }),
        other => Err(parse_err(format!("unknown assignments kind {other:?}"))),
    }
}

/// Pretty-printed JSON for an instance.
pub fn instance_to_json(inst: &Instance) -> String {
    let relations = inst
        .relations
        .iter()
        .map(|r| {
            let mut d = RelationDoc {
                name: r.name.clone(),
                arity: None,
                tuples: None,
                union: None,
                terms: None,
            };
            match &r.body {
                RelationBody::Explicit(t) => {
                    d.arity = Some(t.arity());
                    d.tuples = Some(t.tuples());
                }
                RelationBody::Union(u) => {
                    d.arity = Some(u.set().arity());
                    d.union = Some(u.members().to_vec());
                }
                RelationBody::Extended(e) => {
                    d.terms = Some(
                        e.terms()
                            .iter()
                            .map(|t| TermDoc { rel: t.rel, vars: t.vars.clone() })
                            .collect(),
                    );
                }
            }
            d
        })
        .collect();
    let doc = InstanceDoc {
        params: ParamsDoc {
            w: inst.params.w,
            ell: inst.params.ell,
            q: inst.params.q,
        },
        assignments: assignments_doc(&inst.admissible),
        relations,
        constraints: inst
            .constraints
            .iter()
            .map(|c| TermDoc { rel: c.rel, vars: c.vars.clone() })
            .collect(),
        promise: inst.promise.map(|Promise::RepetitionFree| "repetition-free".to_string()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("instance documents serialize");
    s.push('\n');
    s
}

/// Parses and validates an instance document.
pub fn instance_from_json(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let p = &doc.params;
    let params = Params::new(p.w, p.ell, p.q).map_err(|e| parse_err(e.to_string()))?;
    let mut relations: Vec<Relation> = Vec::with_capacity(doc.relations.len());
    for r in doc.relations {
        let rel = match (r.tuples, r.union, r.terms) {
            (Some(tuples), None, None) => {
                let arity = r
                    .arity
                    .or_else(|| tuples.first().map(Vec::len))
                    .ok_or_else(|| parse_err(format!("relation {} needs an arity", r.name)))?;
                Relation::from_set(&r.name, TupleSet::new(params.w, arity, tuples)?)
            }
            (None, Some(members), None) => {
                let arity = match r.arity {
                    Some(a) => a,
                    None => members
                        .first()
                        .and_then(|&k| relations.get(k.wrapping_sub(1)))
                        .and_then(Relation::as_explicit)
                        .map(TupleSet::arity)
                        .ok_or_else(|| parse_err(format!("union {} needs an arity", r.name)))?,
                };
                Relation::union(&r.name, UnionRelation::new(members, &relations, params.w, arity)?)
            }
            (None, None, Some(terms)) => Relation::extended(
                &r.name,
                ExtendedRelation::new(terms.into_iter().map(|t| Term { rel: t.rel, vars: t.vars })),
            ),
            _ => {
                return Err(parse_err(format!(
                    "relation {} needs exactly one of tuples, union, terms",
                    r.name
                )))
            }
        };
        relations.push(rel);
    }
    let constraints = doc.constraints.into_iter().map(|c| Constraint::new(c.rel, c.vars)).collect();
    let mut inst = Instance::new(params, admissible_of(doc.assignments)?, relations, constraints)?;
    match doc.promise.as_deref() {
        None => {}
        Some("repetition-free") => inst = inst.with_promise(Promise::RepetitionFree)?,
        Some(other) => return Err(parse_err(format!("unknown promise {other:?}"))),
    }
    Ok(inst)
}

/// An assignment as a JSON array, or letters separated by spaces or commas.
pub fn parse_assignment(text: &str) -> Result<Assignment> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|_| parse_err(format!("bad letter {t:?}"))))
        .collect()
}

pub fn assignment_to_string(a: &[u32]) -> String {
    a.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

/// A graph in the line format, with the optional extras.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphText {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub s: Option<usize>,
    pub t: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<usize>,
    pub z: Option<usize>,
    pub crossings: Vec<((usize, usize), (usize, usize))>,
    pub fixed: Vec<(usize, usize)>,
    pub sets: Vec<Vec<(usize, usize)>>,
}

pub fn parse_graph(text: &str) -> Result<GraphText> {
    let mut g = GraphText::default();
    let mut seen_n = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| parse_err(format!("line {}: {msg}: {raw:?}", i + 1));
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        let nums: Vec<usize> = parts
            .map(|t| t.parse::<usize>().map_err(|_| err("expected a number")))
            .collect::<Result<_>>()?;
        let want = |k: usize| if nums.len() == k { Ok(()) } else { Err(err(&format!("expected {k} numbers"))) };
        match head {
            "n" => {
                want(1)?;
                g.n = nums[0];
                seen_n = true;
            }
            "s" | "t" | "k" | "p" | "z" => {
                want(1)?;
                let slot = match head {
                    "s" => &mut g.s,
                    "t" => &mut g.t,
                    "k" => &mut g.k,
                    "p" => &mut g.p,
                    _ => &mut g.z,
                };
                *slot = Some(nums[0]);
            }
            "cross" => {
                want(4)?;
                g.crossings.push(((nums[0], nums[1]), (nums[2], nums[3])));
            }
            "fixed" => {
                want(2)?;
                g.fixed.push((nums[0], nums[1]));
            }
            "set" => {
                want(0)?;
                g.sets.push(Vec::new());
            }
            _ => {
                let u = head.parse::<usize>().map_err(|_| err("unknown directive"))?;
                if nums.len() != 1 {
                    return Err(err("an edge line holds two vertices"));
                }
                match g.sets.last_mut() {
                    Some(set) => set.push((u, nums[0])),
                    None => g.edges.push((u, nums[0])),
                }
            }
        }
        if !seen_n {
            return Err(err("the first line must be `n N`"));
        }
    }
    if !seen_n {
        return Err(parse_err("missing `n N` line"));
    }
    let bad = |&(u, v): &(usize, usize)| u == 0 || v == 0 || u > g.n || v > g.n;
    let all_edges = g
        .edges
        .iter()
        .chain(&g.fixed)
        .chain(g.sets.iter().flatten())
        .chain(g.crossings.iter().flat_map(|(a, b)| [a, b]));
    if let Some(e) = all_edges.copied().find(|e| bad(e)) {
        return Err(parse_err(format!("edge {e:?} outside [1, {}]", g.n)));
    }
    Ok(g)
}

pub fn graph_to_text(g: &GraphText) -> String {
    let mut out = format!("n {}\n", g.n);
    for (key, v) in [("s", g.s), ("t", g.t), ("k", g.k), ("p", g.p), ("z", g.z)] {
        if let Some(v) = v {
            out.push_str(&format!("{key} {v}\n"));
        }
    }
    for (u, v) in &g.edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    for (u, v) in &g.fixed {
        out.push_str(&format!("fixed {u} {v}\n"));
    }
    for ((a, b), (c, d)) in &g.crossings {
        out.push_str(&format!("cross {a} {b} {c} {d}\n"));
    }
    for set in &g.sets {
        out.push_str("set\n");
        for (u, v) in set {
            out.push_str(&format!("{u} {v}\n"));
        }
    }
    out
}
