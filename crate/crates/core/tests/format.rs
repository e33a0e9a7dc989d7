use hidden_csp::format::{
    assignment_to_string, graph_to_text, instance_from_json, instance_to_json, parse_assignment, parse_graph,
    GraphText,
};
use hidden_csp::graph::Digraph;
use hidden_csp::random::{random_extension_instance, random_instance, random_union_instance, RandomSpec};
use hidden_csp::reductions::{
    eq_class_hardness, graph_property_gadget, hamdigraph_to_groupeq, threesat_to_rf_union_2sat, EqClass, GraphLayout,
    GraphProperty,
};
use hidden_csp::solvers::{Cnf, Lit};
use hidden_csp::{CspError, Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn round_trip(inst: &Instance) {
    let text = instance_to_json(inst);
    let back = instance_from_json(&text).unwrap();
    assert_eq!(&back, inst, "{text}");
    assert_eq!(instance_to_json(&back), text);
}

#[test]
fn random_instances_round_trip() {
    let spec = RandomSpec::default();
    for seed in 0..300 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        round_trip(&random_instance(&mut rng, &spec).unwrap());
        round_trip(&random_union_instance(&mut rng, &spec).unwrap());
        round_trip(&random_extension_instance(&mut rng, &spec, seed % 2 == 0).unwrap());
    }
}

#[test]
fn reduction_targets_round_trip() {
    for prop in GraphProperty::ALL {
        let layout = GraphLayout::new(4, [(1, 2), (2, 3), (3, 4), (4, 1)]);
        let layout = if matches!(prop, GraphProperty::Dpath | GraphProperty::Upath) {
            layout.with_path(1, 3, vec![((1, 2), (3, 4))])
        } else {
            layout
        };
        round_trip(&graph_property_gadget(prop, &layout).unwrap().target);
    }
    let g = hidden_csp::graph::Graph::new(4, [(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
    round_trip(&eq_class_hardness(EqClass::Clique(2), &g, &[(1, 2)]).unwrap().target);
    round_trip(&eq_class_hardness(EqClass::HamiltonianCycle, &g, &[]).unwrap().target);
    let mut f = Cnf::new(3);
    f.add_clause(vec![Lit::pos(1), Lit::neg(2), Lit::pos(3)]).unwrap();
    let rf = threesat_to_rf_union_2sat(&f).unwrap().target;
    assert!(instance_to_json(&rf).contains("repetition-free"));
    round_trip(&rf);
    let d = Digraph::new(3, [(1, 2), (2, 3), (3, 1)], false).unwrap();
    round_trip(&hamdigraph_to_groupeq(&d, 2).unwrap().target);
}

#[test]
fn malformed_json_is_a_parse_error() {
    for text in ["", "{", "[]", r#"{"params": {"w": 2, "ell": 1, "q": 1}}"#, r#"{"bogus": 1}"#] {
        assert!(matches!(instance_from_json(text), Err(CspError::Parse(_))), "{text:?}");
    }
    // well-formed JSON describing an invalid instance
    let bad_rel = r#"{"params": {"w": 2, "ell": 1, "q": 1}, "assignments": {"kind": "all"},
        "relations": [{"name": "Id", "arity": 1, "tuples": [[1]]}],
        "constraints": [{"rel": 2, "vars": [1]}]}"#;
    assert!(instance_from_json(bad_rel).is_err());
}

#[test]
fn assignments_and_graphs_round_trip() {
    let a = vec![0, 2, 1, 1];
    assert_eq!(parse_assignment(&assignment_to_string(&a)).unwrap(), a);
    assert_eq!(parse_assignment("[0, 2, 1, 1]").unwrap(), a);
    assert!(parse_assignment("0 x").is_err());

    let g = GraphText {
        n: 5,
        edges: vec![(1, 2), (2, 5)],
        s: Some(1),
        t: Some(5),
        k: Some(3),
        crossings: vec![((1, 2), (2, 5))],
        fixed: vec![(1, 2)],
        ..Default::default()
    };
    assert_eq!(parse_graph(&graph_to_text(&g)).unwrap(), g);
    assert!(parse_graph("1 2\n").is_err());
}
