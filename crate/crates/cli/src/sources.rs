//! Reading reduction sources: graphs in the line format, formulas in DIMACS.

use hidden_csp::format::{parse_graph, GraphText};
use hidden_csp::graph::{Digraph, Graph};
use hidden_csp::reductions::{
    coloring_to_hyperplane_noncover, eq_class_hardness, graph_property_gadget, hamdigraph_to_groupeq, lineq_type,
    monsat_encode, rf_2sat_clause_relations, threecol_to_union_ug, threesat_to_rf_union_2sat,
    threesat_to_union_delta, union_2col_rf_transform, EqClass, GraphLayout, GraphProperty, ReductionOutput,
};
use hidden_csp::solvers::Cnf;
use hidden_csp::{CspError, Result, TupleSet};

pub const KINDS: &[&str] = &[
    "st", "dst", "ucc", "dcc", "bpm", "dpath", "upath", "3sat-delta", "3col-ug", "eq-clique", "eq-hamc", "col-hyp",
    "monsat", "rf-2sat", "rf-2col", "groupeq",
];

fn need(v: Option<usize>, what: &str, kind: &str) -> Result<usize> {
    v.ok_or_else(|| CspError::Input(format!("{kind} needs a `{what}` line in the source")))
}

fn base_type(spec: &str) -> Result<Vec<TupleSet>> {
    match spec {
        "1sat" => lineq_type(2),
        "2sat" => rf_2sat_clause_relations()?
            .iter()
            .map(|r| r.as_explicit().cloned().ok_or_else(|| CspError::Internal("clause relation".into())))
            .collect(),
        _ => match spec.strip_prefix("lineq:").map(str::parse::<usize>) {
            Some(Ok(p)) => lineq_type(p),
            _ => Err(CspError::Input(format!("unknown base {spec:?} (1sat, 2sat, lineq:P)"))),
        },
    }
}

pub fn build(kind: &str, text: &str, base: &str) -> Result<ReductionOutput> {
    if let Ok(prop) = GraphProperty::parse(kind) {
        let g = parse_graph(text)?;
        let mut layout = GraphLayout::new(g.n, g.edges.iter().copied());
        if matches!(prop, GraphProperty::Dpath | GraphProperty::Upath) {
            layout = layout.with_path(need(g.s, "s", kind)?, need(g.t, "t", kind)?, g.crossings.clone());
        } else if !g.crossings.is_empty() {
            return Err(CspError::Input(format!("{kind} takes no crossings")));
        }
        return graph_property_gadget(prop, &layout);
    }
    match kind {
        "3sat-delta" => threesat_to_union_delta(&Cnf::from_dimacs(text)?),
        "rf-2sat" => threesat_to_rf_union_2sat(&Cnf::from_dimacs(text)?),
        "monsat" => monsat_encode(&base_type(base)?, &Cnf::from_dimacs(text)?),
        "3col-ug" => {
            let g = parse_graph(text)?;
            threecol_to_union_ug(&graph(&g)?, g.k.unwrap_or(3) as u32)
        }
        "col-hyp" => {
            let g = parse_graph(text)?;
            coloring_to_hyperplane_noncover(&graph(&g)?, need(g.p, "p", kind)?)
        }
        "eq-clique" => {
            let g = parse_graph(text)?;
            eq_class_hardness(EqClass::Clique(need(g.k, "k", kind)?), &graph(&g)?, &g.fixed)
        }
        "eq-hamc" => {
            let g = parse_graph(text)?;
            eq_class_hardness(EqClass::HamiltonianCycle, &graph(&g)?, &g.fixed)
        }
        "rf-2col" => {
            let g = parse_graph(text)?;
            union_2col_rf_transform(g.n, &g.sets)
        }
        "groupeq" => {
            let g = parse_graph(text)?;
            let d = Digraph::new(g.n, g.edges.iter().copied(), false)?;
            hamdigraph_to_groupeq(&d, g.z.unwrap_or(1))
        }
        _ => Err(CspError::Input(format!("unknown reduction {kind:?} ({})", KINDS.join(", ")))),
    }
}

fn graph(g: &GraphText) -> Result<Graph> {
    Graph::new(g.n, g.edges.iter().copied())
}

/// Plain-text account of the witness maps, for the manifest.
pub fn map_description(name: &str) -> &'static str {
    match name {
        "st" | "dst" | "ucc" | "dcc" | "bpm" | "dpath" | "upath" => {
            "forward and backward: identity on edge words (coordinate i is the i-th possible edge)"
        }
        "3sat-delta" => "forward and backward: identity on 0/1 variable vectors",
        "3col-ug" => "forward: colour vector as labels; backward: labels as colours",
        "col-hyp" => "forward and backward: identity on colour vectors",
        "eq-clique" | "eq-hamc" => "forward and backward: identity on edge words",
        "monsat" => {
            "forward: each variable becomes the least block in A^0 or A^1; backward: a block in A^1 reads 1, otherwise 0"
        }
        "rf-2sat" => "forward: pad with zeros for the clause variables; backward: prefix of the original variables",
        "rf-2col" => "forward: fresh pair vertices take the complements of their endpoints; backward: prefix",
        "groupeq" => {
            "forward: number the cycle from z and write the cyclic group table; backward: read the cycle off column z"
        }
        _ => "",
    }
}
