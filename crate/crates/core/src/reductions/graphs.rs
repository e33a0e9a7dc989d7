//! Monotone graph-property gadgets and the "equal to a graph from a class"
//! constructions. Targets are boolean instances over an edge word; a
//! constraint `Neg` at coordinate `e` says "edge `e` is absent".

use std::collections::{BTreeMap, BTreeSet};

use super::{check_len, ReductionOutput, Source};
use crate::closures::{ExtendedRelation, Term};
use crate::csp::family::Family;
use crate::csp::{AdmissibleSet, Assignment, Constraint, Instance, Params, Relation};
use crate::error::{input_err, Result};
use crate::graph::{Digraph, EdgeSpace, Graph, UnionFind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphProperty {
    /// Spanning trees; source is Hamiltonian path.
    St,
    /// In-arborescences rooted at 1; source is a Hamiltonian path ending at 1.
    Dst,
    /// Undirected cycle covers; source is a cycle cover without 5-cycles.
    Ucc,
    /// Directed cycle covers; source is a cycle cover without loops and 2-cycles.
    Dcc,
    /// Bipartite perfect matchings, read as directed cycle covers.
    Bpm,
    /// Directed s-t paths; source is a path using no crossing pair.
    Dpath,
    /// Undirected s-t paths; source as for `Dpath`.
    Upath,
}

impl GraphProperty {
    pub const ALL: [GraphProperty; 7] = [
        GraphProperty::St,
        GraphProperty::Dst,
        GraphProperty::Ucc,
        GraphProperty::Dcc,
        GraphProperty::Bpm,
        GraphProperty::Dpath,
        GraphProperty::Upath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphProperty::St => "st",
            GraphProperty::Dst => "dst",
            GraphProperty::Ucc => "ucc",
            GraphProperty::Dcc => "dcc",
            GraphProperty::Bpm => "bpm",
            GraphProperty::Dpath => "dpath",
            GraphProperty::Upath => "upath",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| input_err!("unknown graph property {s:?}"))
    }

    pub fn directed(self) -> bool {
        matches!(self, GraphProperty::Dst | GraphProperty::Dcc | GraphProperty::Bpm | GraphProperty::Dpath)
    }

    fn loops(self) -> bool {
        matches!(self, GraphProperty::Dcc | GraphProperty::Bpm)
    }

    fn family(self, g: &GraphLayout) -> Family {
        let n = g.n;
        match self {
            GraphProperty::St => Family::SpanningTrees { n },
            GraphProperty::Dst => Family::InArborescences { n, root: 1 },
            GraphProperty::Ucc => Family::UndirectedCycleCovers { n },
            GraphProperty::Dcc => Family::DirectedCycleCovers { n },
            GraphProperty::Bpm => Family::BipartitePerfectMatchings { n },
            GraphProperty::Dpath => Family::DirectedPaths { n, s: g.s, t: g.t },
            GraphProperty::Upath => Family::UndirectedPaths { n, s: g.s, t: g.t },
        }
    }
}

/// A graph on `[n]` with the extra data some properties need: `s`, `t`
/// and the crossing edge pairs of a drawing (paths only).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphLayout {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
    pub crossings: Vec<((usize, usize), (usize, usize))>,
}

impl GraphLayout {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self {
            n,
            edges: edges.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn with_path(mut self, s: usize, t: usize, crossings: Vec<((usize, usize), (usize, usize))>) -> Self {
        self.s = s;
        self.t = t;
        self.crossings = crossings;
        self
    }
}

fn neg() -> Result<Relation> {
    Relation::explicit("Neg", 2, 1, [[0u32]])
}

/// `Neg` at every absent coordinate, plus one "avoid some edge of `E_i`"
/// constraint per exclusion set.
fn exclusion_instance(family: Family, present: &BTreeSet<usize>, sets: &[Vec<usize>]) -> Result<Instance> {
    let ell = family.ell();
    let mut relations = vec![neg()?];
    let mut constraints: Vec<Constraint> = (1..=ell)
        .filter(|c| !present.contains(c))
        .map(|c| Constraint::new(1, vec![c]))
        .collect();
    for (i, set) in sets.iter().enumerate() {
        relations.push(Relation::extended(
            format!("E{}", i + 1),
            ExtendedRelation::new(set.iter().map(|&c| Term { rel: 1, vars: vec![c] })),
        ));
        constraints.push(Constraint::new(relations.len(), vec![]));
    }
    Instance::new(Params::new(2, ell, 1)?, AdmissibleSet::Family(family), relations, constraints)
}

fn identity(len: usize) -> impl Fn(&[u32]) -> Result<Assignment> + Send + Sync + Clone {
    move |a: &[u32]| {
        if check_len(a, len, 2) {
            Ok(a.to_vec())
        } else {
            Err(input_err!("expected a 0/1 edge word of length {len}"))
        }
    }
}

fn component_sizes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for &(u, v) in edges {
        uf.union(u, v);
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 1..=n {
        *sizes.entry(uf.find(v)).or_default() += 1;
    }
    sizes.into_values().collect()
}

/// Vertex sequences of the 5-cycles of `g`, each cycle once.
fn five_cycles(g: &Graph) -> Vec<[usize; 5]> {
    let n = g.n;
    let mut out = Vec::new();
    for a in 1..=n {
        // a is the least vertex; b < e fixes the orientation
        for b in a + 1..=n {
            for c in a + 1..=n {
                for d in a + 1..=n {
                    for e in b + 1..=n {
                        let cyc = [a, b, c, d, e];
                        let distinct = cyc.iter().collect::<BTreeSet<_>>().len() == 5;
                        if distinct && (0..5).all(|i| g.has_edge(cyc[i], cyc[(i + 1) % 5])) {
                            out.push(cyc);
                        }
                    }
                }
            }
        }
    }
    out
}

/// The exclusion-set gadget for a monotone graph property: a target over
/// `W_P` whose solutions are exactly the source witnesses, as edge words.
pub fn graph_property_gadget(prop: GraphProperty, g: &GraphLayout) -> Result<ReductionOutput> {
    let family = prop.family(g);
    let space = family.space();
    if space.is_empty() {
        return Err(input_err!("{} needs more vertices, got n = {}", prop.name(), g.n));
    }
    let n = g.n;
    let arcs: Vec<(usize, usize)> = if prop.directed() {
        Digraph::new(n, g.edges.iter().copied(), prop.loops())?.arcs
    } else {
        Graph::new(n, g.edges.iter().copied())?.edges
    };
    let coord = |u: usize, v: usize| space.index(u, v);
    let present: BTreeSet<usize> = arcs.iter().map(|&(u, v)| coord(u, v)).collect::<Result<_>>()?;
    let is_present = |u: usize, v: usize| coord(u, v).is_ok_and(|c| present.contains(&c));
    if matches!(prop, GraphProperty::Dpath | GraphProperty::Upath) {
        if !(1..=n).contains(&g.s) || !(1..=n).contains(&g.t) || g.s == g.t {
            return Err(input_err!("need distinct s, t in [{n}], got s = {}, t = {}", g.s, g.t));
        }
    } else if !g.crossings.is_empty() {
        return Err(input_err!("crossing pairs only make sense for path properties"));
    }

    let mut sets: Vec<Vec<usize>> = Vec::new();
    let (description, provenance) = match prop {
        GraphProperty::St => {
            for v in 1..=n {
                let others: Vec<usize> = (1..=n).filter(|&x| x != v).collect();
                for (x, &i) in others.iter().enumerate() {
                    for (y, &j) in others.iter().enumerate().skip(x + 1) {
                        for &k in others.iter().skip(y + 1) {
                            sets.push(vec![coord(v, i)?, coord(v, j)?, coord(v, k)?]);
                        }
                    }
                }
            }
            ("Hamiltonian path", "Hamiltonian path is NP-complete (Garey and Johnson)")
        }
        GraphProperty::Dst => {
            let d = Digraph { n, arcs: arcs.clone() };
            for v in 1..=n {
                if d.in_degree(v) > 2 || d.out_degree(v) > 2 {
                    return Err(input_err!("vertex {v} has in- or out-degree above 2"));
                }
                // a single in-arc needs no constraint: the path may use it
                if d.in_degree(v) == 2 {
                    sets.push(arcs.iter().filter(|a| a.1 == v).map(|&(u, w)| coord(u, w)).collect::<Result<_>>()?);
                }
            }
            (
                "directed Hamiltonian path ending at 1",
                "directed Hamiltonian path in planar digraphs of degree at most 2 (Garey and Johnson)",
            )
        }
        GraphProperty::Ucc => {
            let graph = Graph { n, edges: arcs.clone() };
            for cyc in five_cycles(&graph) {
                sets.push((0..5).map(|i| coord(cyc[i], cyc[(i + 1) % 5])).collect::<Result<_>>()?);
            }
            ("cycle cover without 5-cycles", "cycle covers avoiding 5-cycles (Hell, Kirkpatrick, Kratochvil, Kriz)")
        }
        GraphProperty::Dcc | GraphProperty::Bpm => {
            for v in 1..=n {
                if is_present(v, v) {
                    sets.push(vec![coord(v, v)?]);
                }
                for u in v + 1..=n {
                    if is_present(v, u) && is_present(u, v) {
                        sets.push(vec![coord(v, u)?, coord(u, v)?]);
                    }
                }
            }
            (
                "directed cycle cover without cycles of length 1 or 2",
                "directed cycle covers avoiding short cycles (Garey and Johnson)",
            )
        }
        GraphProperty::Dpath | GraphProperty::Upath => {
            for &((a, b), (c, d)) in &g.crossings {
                if !is_present(a, b) || !is_present(c, d) {
                    return Err(input_err!("crossing pair ({a},{b}), ({c},{d}) uses an edge outside the graph"));
                }
                sets.push(vec![coord(a, b)?, coord(c, d)?]);
            }
            ("crossing-free s-t path", "crossing-free paths in drawn graphs (Kratochvil, Lubiw, Nesetril)")
        }
    };
    let target = exclusion_instance(family.clone(), &present, &sets)?;

    let ell = space.len();
    let crossings: Vec<(usize, usize)> = sets
        .iter()
        .filter(|_| matches!(prop, GraphProperty::Dpath | GraphProperty::Upath))
        .map(|s| (s[0], s[1]))
        .collect();
    let fam = family.clone();
    let check = move |w: &[u32]| -> bool {
        if !check_len(w, ell, 2) || !fam.contains(w) {
            return false;
        }
        if (1..=ell).any(|c| w[c - 1] == 1 && !present.contains(&c)) {
            return false;
        }
        let edges = space.edges_of(w);
        match prop {
            GraphProperty::St => {
                let mut deg = vec![0; n + 1];
                for &(u, v) in &edges {
                    deg[u] += 1;
                    deg[v] += 1;
                }
                deg.iter().all(|&d| d <= 2)
            }
            GraphProperty::Dst => {
                let mut indeg = vec![0; n + 1];
                for &(_, v) in &edges {
                    indeg[v] += 1;
                }
                indeg.iter().all(|&d| d <= 1)
            }
            GraphProperty::Ucc => component_sizes(n, &edges).iter().all(|&s| s != 5),
            GraphProperty::Dcc | GraphProperty::Bpm => {
                edges.iter().all(|&(u, v)| u != v && !edges.contains(&(v, u)))
            }
            GraphProperty::Dpath | GraphProperty::Upath => {
                crossings.iter().all(|&(c, d)| w[c - 1] == 0 || w[d - 1] == 0)
            }
        }
    };
    let source = Source::new(description, move |budget| family.enumerate(budget), check);
    Ok(ReductionOutput::new(
        prop.name(),
        provenance,
        target,
        source,
        identity(ell),
        identity(ell),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqClass {
    Clique(usize),
    HamiltonianCycle,
}

/// "Is there a member `G` of the class with `E1 ⊆ G ⊆ E2`": `Id` on the
/// edges of `E1`, `Neg` off `E2`, the full relation elsewhere.
pub fn eq_class_hardness(kind: EqClass, e2: &Graph, e1: &[(usize, usize)]) -> Result<ReductionOutput> {
    let n = e2.n;
    let family = match kind {
        EqClass::Clique(k) => Family::Cliques { n, k },
        EqClass::HamiltonianCycle => Family::HamiltonianCycles { n },
    };
    let space = EdgeSpace::Undirected(n);
    if space.is_empty() {
        return Err(input_err!("need at least 2 vertices"));
    }
    let e1 = Graph::new(n, e1.iter().copied())?;
    if let Some(e) = e1.edges.iter().find(|&&(u, v)| !e2.has_edge(u, v)) {
        return Err(input_err!("edge {e:?} of E1 is not in E2"));
    }
    let relations = vec![
        Relation::explicit("Id", 2, 1, [[1u32]])?,
        Relation::explicit("Neg", 2, 1, [[0u32]])?,
        Relation::explicit("Top", 2, 1, [[0u32], [1]])?,
    ];
    let constraints = space
        .edges()
        .into_iter()
        .enumerate()
        .map(|(i, (u, v))| {
            let rel = if e1.has_edge(u, v) {
                1
            } else if !e2.has_edge(u, v) {
                2
            } else {
                3
            };
            Constraint::new(rel, vec![i + 1])
        })
        .collect();
    let ell = space.len();
    let target = Instance::new(Params::new(2, ell, 1)?, AdmissibleSet::Family(family.clone()), relations, constraints)?;
    let (name, description, provenance) = match kind {
        EqClass::Clique(_) => ("eq-clique", "k-clique between E1 and E2", "k-clique is NP-complete (Karp)"),
        EqClass::HamiltonianCycle => (
            "eq-hamc",
            "Hamiltonian cycle between E1 and E2",
            "Hamiltonian cycle is NP-complete (Karp)",
        ),
    };
    let fam = family.clone();
    let (g1, g2) = (e1, e2.clone());
    let check = move |w: &[u32]| {
        check_len(w, ell, 2) && fam.contains(w) && {
            let edges = space.edges_of(w);
            edges.iter().all(|&(u, v)| g2.has_edge(u, v)) && g1.edges.iter().all(|e| edges.contains(e))
        }
    };
    let source = Source::new(description, move |budget| family.enumerate(budget), check);
    Ok(ReductionOutput::new(name, provenance, target, source, identity(ell), identity(ell)))
}
