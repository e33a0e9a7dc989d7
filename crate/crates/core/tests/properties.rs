use std::collections::BTreeSet;

use hidden_csp::bench::{run_case, BenchFamily};
use hidden_csp::closures::{dim_union, union_closure};
use hidden_csp::oracle::{FixedOracle, Oracle, Policy, RevealLevel, Response};
use hidden_csp::random::{random_2sat, random_instance, random_relation, RandomSpec};
use hidden_csp::reductions::{check_reduction, graph_property_gadget, threesat_to_rf_union_2sat, GraphLayout, GraphProperty};
use hidden_csp::solvers::{binary_csp_to_2sat, solve_2sat, solve_kweight_rf, solve_union_1sat_rf, Cnf, Lit};
use hidden_csp::{AdmissibleSet, Outcome, Params, TupleSet, DEFAULT_BUDGET};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_words(n: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..1u32 << n).map(move |mask| (0..n).map(|i| mask >> i & 1).collect())
}

fn lit() -> impl Strategy<Value = (usize, bool)> {
    (1usize..=12, any::<bool>())
}

fn cnf_from(vars: usize, clauses: &[Vec<(usize, bool)>]) -> Cnf {
    let mut f = Cnf::new(vars);
    for c in clauses {
        let lits: Vec<Lit> = c.iter().map(|&(v, pos)| Lit { var: (v - 1) % vars + 1, pos }).collect();
        f.add_clause(lits).unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn union_closure_is_closed(seed in any::<u64>(), s in 1usize..=5, w in 2u32..=3, arity in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rels: Vec<TupleSet> = (0..s).map(|_| random_relation(&mut rng, w, arity).unwrap()).collect();
        let closure = union_closure(&rels).unwrap();
        let members: BTreeSet<Vec<u64>> = closure.iter().map(|t| t.codes().to_vec()).collect();
        prop_assert_eq!(members.len(), closure.len());
        prop_assert!(closure.len() <= 1 << s);
        prop_assert!(members.contains(&Vec::new()));
        for r in &rels {
            prop_assert!(members.contains(r.codes()));
        }
        for a in &closure {
            for b in &closure {
                prop_assert!(members.contains(a.union(b).codes()));
            }
        }
        let d = dim_union(&rels).unwrap();
        let everything = closure.iter().map(TupleSet::len).max().unwrap();
        prop_assert!(d <= s && d <= everything);
    }

    #[test]
    fn fixed_oracle_is_sound(seed in any::<u64>(), level in 0usize..4, policy in 0u64..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
        let level = RevealLevel::ALL[level];
        let policy = [Policy::First, Policy::Greedy, Policy::Random(seed)][policy as usize];
        let mut o = FixedOracle::new(inst.clone(), level, policy);
        let words = AdmissibleSet::All.enumerate(&inst.params, DEFAULT_BUDGET).unwrap();
        for a in words.iter().take(40) {
            match o.submit(a).unwrap() {
                Response::Yes => prop_assert!(inst.satisfies(a)),
                Response::Violation { j, k, vars } => {
                    prop_assert!(!inst.constraint_holds(j, a));
                    let c = &inst.constraints[j - 1];
                    prop_assert_eq!(k, level.reveals_relation().then_some(c.rel));
                    prop_assert_eq!(vars, level.reveals_vars().then(|| c.vars.clone()));
                }
            }
        }
        prop_assert_eq!(o.transcript().trials(), words.len().min(40));
        prop_assert!(o.submit(&vec![9; inst.params.ell]).is_err());
    }

    #[test]
    fn two_sat_matches_brute_force(vars in 1usize..=12, clauses in prop::collection::vec(prop::collection::vec(lit(), 1..=2), 0..=20)) {
        let f = cnf_from(vars, &clauses);
        let expected = all_words(vars).any(|a| f.eval(&a));
        match solve_2sat(&f).unwrap() {
            Some(a) => prop_assert!(expected && f.eval(&a)),
            None => prop_assert!(!expected),
        }
        let again = Cnf::from_dimacs(&f.to_dimacs()).unwrap();
        prop_assert_eq!(again, f);
    }

    #[test]
    fn binary_csp_to_2sat_is_pointwise_equal(seed in any::<u64>(), n in 2usize..=8, m in 0usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_2sat(&mut rng, n, m).unwrap();
        let f = binary_csp_to_2sat(&inst).unwrap();
        for a in all_words(n) {
            prop_assert_eq!(inst.satisfies(&a), f.eval(&a));
        }
    }

    #[test]
    fn matching_solvers_answer_exactly(ell in 1usize..=6, sets in prop::collection::vec(prop::collection::btree_set(1usize..=6, 1..=3), 0..=6), k in 0usize..=6, signs in prop::collection::vec(any::<bool>(), 18)) {
        let sets: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().map(|&i| (i - 1) % ell + 1).collect::<BTreeSet<_>>().into_iter().collect()).collect();
        let k = k.min(ell);
        // distinct representatives by brute force over all position tuples
        let reps = |opts: &[Vec<usize>]| -> bool {
            fn go(opts: &[Vec<usize>], used: &mut Vec<usize>) -> bool {
                let Some((first, rest)) = opts.split_first() else { return true };
                first.iter().any(|&x| {
                    if used.contains(&x) { return false; }
                    used.push(x);
                    let ok = go(rest, used);
                    used.pop();
                    ok
                })
            }
            go(opts, &mut Vec::new())
        };
        let system = reps(&sets);
        match solve_kweight_rf(ell, k, &sets).unwrap() {
            Outcome::Solution(a) => {
                prop_assert!(system && sets.len() + k <= ell);
                prop_assert!(a.iter().filter(|&&x| x == 1).count() >= k);
                prop_assert!(sets.iter().all(|s| s.iter().any(|&i| a[i - 1] == 0)));
            }
            other => prop_assert!(other == Outcome::Exception && !(system && sets.len() + k <= ell)),
        }
        let clauses: Vec<Vec<Lit>> = sets.iter().enumerate().map(|(j, s)| s.iter().enumerate().map(|(i, &var)| Lit { var, pos: signs[(3 * j + i) % 18] }).collect()).collect();
        match solve_union_1sat_rf(ell, &clauses).unwrap() {
            Outcome::Solution(a) => {
                prop_assert!(system);
                prop_assert!(clauses.iter().all(|c| c.iter().any(|l| l.holds(&a))));
            }
            other => prop_assert!(other == Outcome::Exception && !system),
        }
    }

    #[test]
    fn engines_stay_within_bounds(seed in any::<u64>(), case in 0usize..1000) {
        for row in run_case(BenchFamily::RandSmall, seed, case).unwrap() {
            prop_assert!(row.within_bound && row.agrees, "{:?}", row);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn spanning_tree_gadget_is_equivalent(n in 2usize..=5, mask in any::<u16>()) {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let out = graph_property_gadget(GraphProperty::St, &GraphLayout::new(n, edges)).unwrap();
        prop_assert!(check_reduction(&out, DEFAULT_BUDGET, true).unwrap().holds());
    }

    #[test]
    fn rf_2sat_is_equivalent(vars in 1usize..=4, clauses in prop::collection::vec(prop::collection::vec(lit(), 1..=3), 0..=5)) {
        let f = cnf_from(vars, &clauses);
        let out = threesat_to_rf_union_2sat(&f).unwrap();
        let c = check_reduction(&out, DEFAULT_BUDGET, true).unwrap();
        prop_assert!(c.holds());
        prop_assert_eq!(c.source_sat, all_words(vars).any(|a| f.eval(&a)));
    }
}

#[test]
fn params_reject_bad_shapes() {
    assert!(Params::new(0, 3, 1).is_err());
    assert!(Params::new(2, 2, 3).is_err());
}
