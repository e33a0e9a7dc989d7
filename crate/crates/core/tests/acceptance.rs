//! Acceptance suite. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hidden_csp::bench::{case_seed, run_bench, BenchFamily};
use hidden_csp::closures::{dim_union, distinct_tuple_count, union_closure, LiftedFamily};
use hidden_csp::csp::brute_force_all;
use hidden_csp::graph::{Digraph, Graph};
use hidden_csp::oracle::{FixedOracle, Policy, RevealLevel};
use hidden_csp::random::{
    random_2sat, random_3cnf, random_cnf, random_edges, random_extension_instance, random_instance,
    random_monotone_cnf, random_relation, random_union_instance, random_vars, RandomSpec,
};
use hidden_csp::reductions::{
    check_reduction, coloring_to_hyperplane_noncover, eq_class_hardness, graph_property_gadget, hamdigraph_to_groupeq,
    lineq_type, monsat_encode, monsat_structure, rf_2sat_clause_relations, threecol_to_union_ug,
    threesat_to_rf_union_2sat, threesat_to_union_delta, union_2col_rf_transform, EqClass, GraphLayout, GraphProperty,
    ReductionOutput,
};
use hidden_csp::solvers::{solve_kweight_rf, solve_union_1sat_rf, Cnf, Lit, TwoSatBackend};
use hidden_csp::transfer::{
    reverse_extension_via_hidden, reverse_union_via_hidden, reverse_unionx_via_hidden, solve_hidden_empty,
    solve_hidden_r, solve_hidden_v, BruteForceBackend, EngineOptions,
};
use hidden_csp::{brute_force_solve, AdmissibleSet, Constraint, Instance, Outcome, Params, TupleSet, DEFAULT_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BENCH_SEED: u64 = 2024;
const BENCH_CASES: usize = 1000;
const BENCH_TIME_LIMIT: Duration = Duration::from_secs(120);
const REVERSE_CASES: usize = 500;
const CLOSURE_CASES: usize = 200;
const TWOSAT_N: usize = 100;
const TWOSAT_M: usize = 300;
const TWOSAT_INSTANCES: usize = 20;
const TWOSAT_TIME_LIMIT: Duration = Duration::from_secs(5);
const TWOSAT_SMALL_CASES: usize = 500;
const MATCHING_RANDOM_CASES: usize = 1000;
const REDUCTION_SOURCES: u64 = 200;
const GROUPEQ_RANDOM_DIGRAPHS: u64 = 50;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(tag: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(case_seed(tag, i as usize))
}

fn explicit_sets(inst: &Instance) -> Vec<TupleSet> {
    inst.relations.iter().filter_map(|r| r.as_explicit().cloned()).collect()
}

// ---------------------------------------------------------------- 1 and 2

fn transfer_round_trip() -> Check {
    let start = Instant::now();
    let report = run_bench(BenchFamily::RandSmall, BENCH_CASES, BENCH_SEED).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(report.rows.len() == BENCH_CASES * 12, "expected 12 runs per case, got {}", report.rows.len());
    ensure!(report.disagreements() == 0, "{} disagreements with brute force", report.disagreements());
    ensure!(took < BENCH_TIME_LIMIT, "took {took:?}, limit {BENCH_TIME_LIMIT:?}");
    Ok(format!("{} runs on {BENCH_CASES} instances, 0 disagreements, {:.1}s", report.rows.len(), took.as_secs_f64()))
}

/// Longest strict chain in the union closure, by listing the closure.
fn dim_union_reference(rels: &[TupleSet]) -> usize {
    let s = rels.len();
    let mut members: Vec<BTreeSet<u64>> = (0..1u32 << s)
        .map(|mask| {
            (0..s)
                .filter(|i| mask >> i & 1 == 1)
                .flat_map(|i| rels[i].codes().iter().copied())
                .collect()
        })
        .collect();
    members.sort_by_key(BTreeSet::len);
    members.dedup();
    let mut depth = vec![0usize; members.len()];
    for i in 0..members.len() {
        for j in 0..i {
            if members[j].len() < members[i].len() && members[j].is_subset(&members[i]) {
                depth[i] = depth[i].max(depth[j] + 1);
            }
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

fn trial_bounds() -> Check {
    let report = run_bench(BenchFamily::RandSmall, BENCH_CASES, BENCH_SEED).map_err(|e| e.to_string())?;
    let mut inexact = 0;
    let mut violations = Vec::new();
    for case in 0..BENCH_CASES {
        let mut r = ChaCha8Rng::seed_from_u64(case_seed(BENCH_SEED, case));
        let inst = random_instance(&mut r, &RandomSpec::default()).map_err(|e| e.to_string())?;
        let rels = explicit_sets(&inst);
        let (w, ell, q, m) = (inst.params.w, inst.params.ell, inst.params.q, inst.m() as u64);
        let w_q = (w as u64).pow(q as u32);
        let dim_r = dim_union_reference(&rels) as u64;
        let lifted = LiftedFamily::new(&rels, &inst.params, &AdmissibleSet::All, DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?
            .dim_union(20_000);
        if !lifted.exact {
            inexact += 1;
        }
        let bound = |engine: &str| match engine {
            "rv" => m + 1,
            "v" => m * dim_r.min(w_q) + 1,
            "r" => m * distinct_tuple_count(ell, q) + 1,
            _ => m * lifted.value as u64 + 1,
        };
        for row in report.rows.iter().filter(|r| r.case == case) {
            if row.trials as u64 > bound(row.engine) || !row.within_bound {
                violations.push(format!("case {case} {} {}", row.engine, row.policy));
            }
        }
    }
    ensure!(violations.is_empty(), "{} violations, first {:?}", violations.len(), &violations[..violations.len().min(3)]);
    Ok(format!(
        "{} runs within m+1 / m*min(dim,|W_q|)+1 / m*|[l]^(q)|+1 / m*dim(UX)+1; {inexact} lifted dims were upper bounds",
        report.rows.len()
    ))
}

// ---------------------------------------------------------------- 3

fn reverse_direction() -> Check {
    let spec = RandomSpec::default();
    let brute = BruteForceBackend::default();
    let opts = EngineOptions::default();
    let mut counts = [0usize; 3];
    for i in 0..REVERSE_CASES as u64 {
        for (kind, count) in counts.iter_mut().enumerate() {
            let mut r = rng(31 + kind as u64, i);
            let inst = match kind {
                0 => random_union_instance(&mut r, &spec),
                1 => random_extension_instance(&mut r, &spec, true),
                _ => random_extension_instance(&mut r, &spec, false),
            }
            .map_err(|e| e.to_string())?;
            let got = match kind {
                0 => reverse_union_via_hidden(&inst, |o| Ok(solve_hidden_v(o, &brute)?.answer)),
                1 => reverse_extension_via_hidden(&inst, |o| Ok(solve_hidden_r(o, &brute)?.answer)),
                _ => reverse_unionx_via_hidden(&inst, |o| Ok(solve_hidden_empty(o, &brute, &opts)?.answer)),
            }
            .map_err(|e| format!("kind {kind} case {i}: {e}"))?;
            let want = brute_force_solve(&inst, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            match &got {
                Outcome::Solution(a) => ensure!(
                    want.is_solution() && inst.satisfies(a),
                    "kind {kind} case {i}: bad solution {a:?}"
                ),
                _ => ensure!(got == Outcome::No && want == Outcome::No, "kind {kind} case {i}: {got:?} vs {want:?}"),
            }
            *count += usize::from(got.is_solution());
        }
    }
    Ok(format!(
        "{REVERSE_CASES} instances each for unions, extensions, unions of extensions ({}/{}/{} satisfiable), 0 disagreements",
        counts[0], counts[1], counts[2]
    ))
}

// ---------------------------------------------------------------- 4

fn closure_fact() -> Check {
    let id = TupleSet::new(2, 1, [[1u32]]).unwrap();
    let neg = TupleSet::new(2, 1, [[0u32]]).unwrap();
    let closure = union_closure(&[id.clone(), neg.clone()]).map_err(|e| e.to_string())?;
    let got: BTreeSet<Vec<Vec<u32>>> = closure.iter().map(TupleSet::tuples).collect();
    let want: BTreeSet<Vec<Vec<u32>>> = [vec![], vec![vec![1]], vec![vec![0]], vec![vec![0], vec![1]]].into();
    ensure!(got == want, "closure is {got:?}");
    let d = dim_union(&[id, neg]).map_err(|e| e.to_string())?;
    ensure!(d == 2, "dim is {d}");
    for i in 0..CLOSURE_CASES as u64 {
        let mut r = rng(41, i);
        let (w, arity, s) = (r.gen_range(2..=3), r.gen_range(1..=2), r.gen_range(1..=5));
        let rels: Vec<TupleSet> = (0..s).map(|_| random_relation(&mut r, w, arity).unwrap()).collect();
        let d = dim_union(&rels).map_err(|e| e.to_string())?;
        ensure!(d <= s, "case {i}: dim {d} > |R| = {s}");
        let reference = dim_union_reference(&rels);
        ensure!(d == reference, "case {i}: dim {d}, reference {reference}");
    }
    Ok(format!("closure {{∅, Id, Neg, {{0,1}}}}, dim 2; dim <= |R| and matches listing on {CLOSURE_CASES} sets"))
}

// ---------------------------------------------------------------- 5

fn planted_2sat(r: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let relations = random_2sat(r, n, 0).unwrap().relations;
    let planted: Vec<u32> = (0..n).map(|_| r.gen_range(0..2)).collect();
    let mut constraints = Vec::new();
    while constraints.len() < m {
        let c = Constraint::new(r.gen_range(1..=relations.len()), random_vars(r, n, 2));
        let t = relations[c.rel - 1].as_explicit().unwrap();
        if t.contains_at(&planted, &c.vars) {
            constraints.push(c);
        }
    }
    Instance::new(Params::new(2, n, 2).unwrap(), AdmissibleSet::All, relations, constraints).unwrap()
}

fn hidden_2sat() -> Check {
    let mut slowest = Duration::ZERO;
    let mut sat = 0;
    for i in 0..TWOSAT_INSTANCES as u64 {
        let mut r = rng(51, i);
        let inst = if i % 2 == 0 {
            planted_2sat(&mut r, TWOSAT_N, TWOSAT_M)
        } else {
            random_2sat(&mut r, TWOSAT_N, TWOSAT_M).unwrap()
        };
        let start = Instant::now();
        let mut o = FixedOracle::new(inst.clone(), RevealLevel::Vars, Policy::Random(i));
        let rep = solve_hidden_v(&mut o, &TwoSatBackend).map_err(|e| format!("instance {i}: {e}"))?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure!(took < TWOSAT_TIME_LIMIT, "instance {i} took {took:?}");
        ensure!(rep.trials as u64 <= rep.bound, "instance {i}: {} trials > {}", rep.trials, rep.bound);
        match &rep.answer {
            Outcome::Solution(a) => {
                ensure!(inst.satisfies(a), "instance {i}: bad solution");
                sat += 1;
            }
            _ => ensure!(i % 2 == 1, "planted instance {i} answered NO"),
        }
    }
    let mut small_sat = 0;
    for i in 0..TWOSAT_SMALL_CASES as u64 {
        let mut r = rng(52, i);
        let m = r.gen_range(0..=20);
        let inst = random_2sat(&mut r, 12, m).unwrap();
        let mut o = FixedOracle::new(inst.clone(), RevealLevel::Vars, Policy::Greedy);
        let rep = solve_hidden_v(&mut o, &TwoSatBackend).map_err(|e| e.to_string())?;
        let want = brute_force_solve(&inst, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure!(rep.answer.is_solution() == want.is_solution(), "small case {i} disagrees with brute force");
        if let Outcome::Solution(a) = &rep.answer {
            ensure!(inst.satisfies(a), "small case {i}: bad solution");
            small_sat += 1;
        }
    }
    Ok(format!(
        "{TWOSAT_INSTANCES} instances n={TWOSAT_N} m={TWOSAT_M} ({sat} sat), slowest {:.0} ms; {TWOSAT_SMALL_CASES} n=12 cases agree with brute force ({small_sat} sat)",
        slowest.as_secs_f64() * 1e3
    ))
}

// ---------------------------------------------------------------- 6

/// Distinct representatives: `choice[j]` from `options[j]`, pairwise distinct.
fn has_distinct_system(options: &[Vec<usize>]) -> bool {
    fn go(options: &[Vec<usize>], used: &mut Vec<usize>) -> bool {
        let Some((first, rest)) = options.split_first() else { return true };
        for &x in first {
            if !used.contains(&x) {
                used.push(x);
                if go(rest, used) {
                    return true;
                }
                used.pop();
            }
        }
        false
    }
    go(options, &mut Vec::new())
}

fn check_1sat_rf(ell: usize, clauses: &[Vec<Lit>]) -> Result<(), String> {
    let options: Vec<Vec<usize>> = clauses.iter().map(|c| c.iter().map(|l| l.var).collect()).collect();
    let expected = has_distinct_system(&options);
    match solve_union_1sat_rf(ell, clauses).map_err(|e| e.to_string())? {
        Outcome::Solution(a) => {
            ensure!(expected, "{clauses:?}: solution without a distinct literal system");
            ensure!(clauses.iter().all(|c| c.iter().any(|l| l.holds(&a))), "{clauses:?}: {a:?} fails");
        }
        Outcome::Exception => ensure!(!expected, "{clauses:?}: EXCEPTION although a system exists"),
        Outcome::No => return Err(format!("{clauses:?}: NO is not a promise answer")),
    }
    Ok(())
}

fn check_kweight_rf(ell: usize, k: usize, sets: &[Vec<usize>]) -> Result<(), String> {
    let expected = sets.len() + k <= ell && has_distinct_system(sets);
    match solve_kweight_rf(ell, k, sets).map_err(|e| e.to_string())? {
        Outcome::Solution(a) => {
            ensure!(expected, "{sets:?} k={k}: solution without a hitting system");
            ensure!(a.iter().filter(|&&x| x == 1).count() >= k, "{sets:?}: weight below {k}");
            ensure!(sets.iter().all(|s| s.iter().any(|&i| a[i - 1] == 0)), "{sets:?}: {a:?} misses a set");
        }
        Outcome::Exception => ensure!(!expected, "{sets:?} k={k}: EXCEPTION although a system exists"),
        Outcome::No => return Err(format!("{sets:?}: NO is not a promise answer")),
    }
    Ok(())
}

fn nonempty_subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (1..1u32 << items.len())
        .map(|mask| (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i].clone()).collect())
        .collect()
}

fn sequences<T: Clone>(pool: &[T], len: usize, f: &mut dyn FnMut(&[T]) -> Result<(), String>) -> Result<usize, String> {
    let mut idx = vec![0usize; len];
    let mut count = 0;
    loop {
        let seq: Vec<T> = idx.iter().map(|&i| pool[i].clone()).collect();
        f(&seq)?;
        count += 1;
        let mut p = 0;
        loop {
            if p == len {
                return Ok(count);
            }
            idx[p] += 1;
            if idx[p] < pool.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

fn matching_solvers() -> Check {
    let mut exhaustive = 0;
    for ell in 1..=3 {
        let lits: Vec<Lit> = (1..=ell).flat_map(|v| [Lit::pos(v), Lit::neg(v)]).collect();
        let clauses = nonempty_subsets(&lits);
        for m in 0..=3 {
            exhaustive += sequences(&clauses, m, &mut |cs| check_1sat_rf(ell, cs))?;
        }
    }
    for ell in 1..=4 {
        let positions: Vec<usize> = (1..=ell).collect();
        let sets = nonempty_subsets(&positions);
        for m in 0..=4 {
            for k in 0..=ell {
                exhaustive += sequences(&sets, m, &mut |ss| check_kweight_rf(ell, k, ss))?;
            }
        }
    }
    for i in 0..MATCHING_RANDOM_CASES as u64 {
        let mut r = rng(61, i);
        let ell = r.gen_range(1..=8);
        let m = r.gen_range(0..=8);
        let clauses: Vec<Vec<Lit>> = (0..m)
            .map(|_| {
                let len = r.gen_range(1..=3.min(ell));
                random_vars(&mut r, ell, len).into_iter().map(|var| Lit { var, pos: r.gen_bool(0.5) }).collect()
            })
            .collect();
        check_1sat_rf(ell, &clauses)?;
        let k = r.gen_range(0..=ell);
        let sets: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let len = r.gen_range(1..=3.min(ell));
                random_vars(&mut r, ell, len)
            })
            .collect();
        check_kweight_rf(ell, k, &sets)?;
    }
    Ok(format!(
        "{exhaustive} exhaustive instances (l <= 3, m <= 3 and l <= 4, m <= 4) and {} random (l, m <= 8) agree",
        2 * MATCHING_RANDOM_CASES
    ))
}

// ---------------------------------------------------------------- 7

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

fn undirected_has(edges: &[(usize, usize)], u: usize, v: usize) -> bool {
    edges.contains(&(u, v)) || edges.contains(&(v, u))
}

fn ham_path(n: usize, edges: &[(usize, usize)]) -> bool {
    permutations(n).iter().any(|p| p.windows(2).all(|w| undirected_has(edges, w[0], w[1])))
}

fn directed_ham_path_into(n: usize, arcs: &[(usize, usize)], root: usize) -> bool {
    permutations(n)
        .iter()
        .any(|p| p[n - 1] == root && p.windows(2).all(|w| arcs.contains(&(w[0], w[1]))))
}

fn directed_ham_cycle(n: usize, arcs: &[(usize, usize)]) -> bool {
    permutations(n)
        .iter()
        .filter(|p| p[0] == 1)
        .any(|p| (0..n).all(|i| arcs.contains(&(p[i], p[(i + 1) % n]))))
}

fn undirected_ham_cycle_within(n: usize, e2: &[(usize, usize)], e1: &[(usize, usize)]) -> bool {
    permutations(n).iter().filter(|p| p[0] == 1).any(|p| {
        let cyc: Vec<(usize, usize)> = (0..n).map(|i| (p[i], p[(i + 1) % n])).collect();
        cyc.iter().all(|&(u, v)| undirected_has(e2, u, v))
            && e1.iter().all(|&(u, v)| cyc.iter().any(|&(a, b)| (a, b) == (u, v) || (b, a) == (u, v)))
    })
}

/// Cycle cover with no loops and no 2-cycles, as a permutation.
fn long_cycle_cover(n: usize, arcs: &[(usize, usize)]) -> bool {
    permutations(n).iter().any(|s| {
        (1..=n).all(|v| {
            let t = s[v - 1];
            t != v && s[t - 1] != v && arcs.contains(&(v, t))
        })
    })
}

fn colourable(n: usize, edges: &[(usize, usize)], k: u32) -> bool {
    let mut c = vec![0u32; n];
    loop {
        if edges.iter().all(|&(u, v)| c[u - 1] != c[v - 1]) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            c[i] += 1;
            if c[i] < k {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn clique_within(n: usize, k: usize, e2: &[(usize, usize)], e1: &[(usize, usize)]) -> bool {
    let verts: Vec<usize> = (1..=n).collect();
    nonempty_subsets(&verts).into_iter().filter(|s| s.len() == k).any(|s| {
        s.iter().all(|&u| s.iter().all(|&v| u >= v || undirected_has(e2, u, v)))
            && e1.iter().all(|(u, v)| s.contains(u) && s.contains(v))
    })
}

fn cnf_sat(f: &Cnf) -> bool {
    (0..1u32 << f.vars).any(|mask| {
        f.clauses
            .iter()
            .all(|c| c.iter().any(|l| (mask >> (l.var - 1) & 1 == 1) == l.pos))
    })
}

/// A simple digraph with in- and out-degree at most 2.
fn low_degree_arcs(r: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut indeg, mut outdeg) = (vec![0; n + 1], vec![0; n + 1]);
    for (u, v) in random_edges(r, n, p, true) {
        if indeg[v] < 2 && outdeg[u] < 2 {
            indeg[v] += 1;
            outdeg[u] += 1;
            out.push((u, v));
        }
    }
    out
}

fn random_crossings(r: &mut ChaCha8Rng, edges: &[(usize, usize)]) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    if edges.len() >= 2 {
        for _ in 0..r.gen_range(0..=3) {
            let i = r.gen_range(0..edges.len());
            let j = r.gen_range(0..edges.len());
            if i != j {
                out.push((edges[i], edges[j]));
            }
        }
    }
    out
}

/// Builds the reduction for source `i` and, when there is one, the
/// satisfiability of the source according to an independent oracle.
fn reduction_case(kind: &str, i: u64) -> hidden_csp::Result<(ReductionOutput, Option<bool>)> {
    let mut r = rng(71 + kind.len() as u64 * 1000 + kind.bytes().map(u64::from).sum::<u64>(), i);
    let n = r.gen_range(3..=7);
    let p = r.gen_range(0.3..0.8);
    Ok(match kind {
        "st" => {
            let e = random_edges(&mut r, n, p, false);
            (graph_property_gadget(GraphProperty::St, &GraphLayout::new(n, e.clone()))?, Some(ham_path(n, &e)))
        }
        "dst" => {
            let a = low_degree_arcs(&mut r, n, p);
            let out = graph_property_gadget(GraphProperty::Dst, &GraphLayout::new(n, a.clone()))?;
            (out, Some(directed_ham_path_into(n, &a, 1)))
        }
        "ucc" => {
            let e = random_edges(&mut r, n, p, false);
            (graph_property_gadget(GraphProperty::Ucc, &GraphLayout::new(n, e))?, None)
        }
        "dcc" | "bpm" => {
            let mut a = random_edges(&mut r, n, p, true);
            a.extend((1..=n).filter(|_| r.gen_bool(0.3)).map(|v| (v, v)));
            let prop = if kind == "dcc" { GraphProperty::Dcc } else { GraphProperty::Bpm };
            let n = n.min(6);
            a.retain(|&(u, v)| u <= n && v <= n);
            (graph_property_gadget(prop, &GraphLayout::new(n, a.clone()))?, Some(long_cycle_cover(n, &a)))
        }
        "dpath" | "upath" => {
            let directed = kind == "dpath";
            let e = random_edges(&mut r, n, p, directed);
            let cross = random_crossings(&mut r, &e);
            let s = r.gen_range(1..=n);
            let t = (s % n) + 1;
            let prop = if directed { GraphProperty::Dpath } else { GraphProperty::Upath };
            (graph_property_gadget(prop, &GraphLayout::new(n, e).with_path(s, t, cross))?, None)
        }
        "3sat-delta" => {
            let vars = r.gen_range(3..=4);
            let m = r.gen_range(1..=14);
            let f = random_3cnf(&mut r, vars, m);
            (threesat_to_union_delta(&f)?, Some(cnf_sat(&f)))
        }
        "3col-ug" => {
            let n = r.gen_range(2..=7);
            let e = random_edges(&mut r, n, p, false);
            let k = if r.gen_bool(0.25) { 2 } else { 3 };
            (threecol_to_union_ug(&Graph::new(n, e.clone())?, k)?, Some(colourable(n, &e, k)))
        }
        "col-hyp" => {
            let e = random_edges(&mut r, n, p, false);
            let q = if r.gen_bool(0.5) { 2 } else { 3 };
            (coloring_to_hyperplane_noncover(&Graph::new(n, e.clone())?, q)?, Some(colourable(n, &e, q as u32)))
        }
        "eq-clique" | "eq-hamc" => {
            let e2 = random_edges(&mut r, n, p, false);
            let e1: Vec<(usize, usize)> = e2.iter().copied().filter(|_| r.gen_bool(0.2)).collect();
            let g = Graph::new(n, e2.clone())?;
            if kind == "eq-clique" {
                let k = r.gen_range(2..=4.min(n));
                (eq_class_hardness(EqClass::Clique(k), &g, &e1)?, Some(clique_within(n, k, &e2, &e1)))
            } else {
                let truth = undirected_ham_cycle_within(n, &e2, &e1);
                (eq_class_hardness(EqClass::HamiltonianCycle, &g, &e1)?, Some(truth))
            }
        }
        "monsat" => {
            let base = match i % 3 {
                0 => lineq_type(2)?,
                1 => rf_2sat_clause_relations()?.iter().map(|x| x.as_explicit().unwrap().clone()).collect(),
                _ => lineq_type(3)?,
            };
            let vars = if i % 3 == 2 { r.gen_range(1..=3) } else { r.gen_range(1..=4) };
            let m = r.gen_range(0..=6);
            let f = random_monotone_cnf(&mut r, vars, m, 3);
            let st = monsat_structure(&base)?;
            let minimal = (0..st.sets.len()).all(|skip| {
                let mut acc = TupleSet::full(st.sets[0].alphabet(), st.q_prime).unwrap();
                for (j, s) in st.sets.iter().enumerate() {
                    if j != skip {
                        acc = acc.intersection(s);
                    }
                }
                !acc.is_empty()
            });
            let mut all = TupleSet::full(st.sets[0].alphabet(), st.q_prime).unwrap();
            for s in &st.sets {
                all = all.intersection(s);
            }
            assert!(st.h >= 1, "h = {}", st.h);
            assert!(st.a0.is_disjoint(&st.a1) && !st.a0.is_empty() && !st.a1.is_empty(), "A^0/A^1 broken");
            assert!(all.is_empty() && minimal, "family is not a minimal empty-intersection family");
            (monsat_encode(&base, &f)?, Some(cnf_sat(&f)))
        }
        "rf-2sat" => {
            let vars = r.gen_range(1..=4);
            let m = r.gen_range(0..=8);
            let f = random_cnf(&mut r, vars, m, 3);
            (threesat_to_rf_union_2sat(&f)?, Some(cnf_sat(&f)))
        }
        "rf-2col" => {
            let n = r.gen_range(1..=4);
            let pairs = random_edges(&mut r, n, 1.0, false);
            let sets: Vec<Vec<(usize, usize)>> = if pairs.is_empty() {
                Vec::new()
            } else {
                (0..r.gen_range(0..=3))
                    .map(|_| (0..r.gen_range(1..=2)).map(|_| pairs[r.gen_range(0..pairs.len())]).collect())
                    .collect()
            };
            (union_2col_rf_transform(n, &sets)?, None)
        }
        "groupeq" => {
            let p = if r.gen_bool(0.5) { 3 } else { 5 };
            let density = r.gen_range(0.4..0.9);
            let a = random_edges(&mut r, p, density, true);
            let z = r.gen_range(1..=p);
            let truth = directed_ham_cycle(p, &a);
            (hamdigraph_to_groupeq(&Digraph::new(p, a, false)?, z)?, Some(truth))
        }
        _ => unreachable!("unknown reduction {kind}"),
    })
}

const REDUCTIONS: [&str; 16] = [
    "st", "dst", "ucc", "dcc", "bpm", "dpath", "upath", "3sat-delta", "3col-ug", "col-hyp", "eq-clique", "eq-hamc",
    "monsat", "rf-2sat", "rf-2col", "groupeq",
];

fn reduction_equivalence() -> Check {
    use rayon::prelude::*;
    let results: Vec<Result<(usize, usize), String>> = REDUCTIONS
        .par_iter()
        .map(|&kind| {
            let mut sat = 0;
            let mut oracle_checked = 0;
            for i in 0..REDUCTION_SOURCES {
                let (out, truth) = reduction_case(kind, i).map_err(|e| format!("{kind} source {i}: {e}"))?;
                let c = check_reduction(&out, DEFAULT_BUDGET, true).map_err(|e| format!("{kind} {i}: {e}"))?;
                ensure!(c.holds(), "{kind} source {i}: {c:?}");
                ensure!(
                    c.forward_ok == c.source_sat.then_some(true) && c.backward_ok == c.target_sat.then_some(true),
                    "{kind} source {i}: witness maps not exercised: {c:?}"
                );
                if let Some(t) = truth {
                    ensure!(t == c.source_sat, "{kind} source {i}: independent oracle says {t}");
                    oracle_checked += 1;
                }
                sat += usize::from(c.source_sat);
            }
            ensure!(
                sat > 0 && sat < REDUCTION_SOURCES as usize,
                "{kind}: sources are all {}",
                if sat > 0 { "satisfiable" } else { "unsatisfiable" }
            );
            Ok((sat, oracle_checked))
        })
        .collect();
    let mut detail = Vec::new();
    let mut cross = 0;
    for (kind, r) in REDUCTIONS.iter().zip(results) {
        let (sat, checked) = r?;
        cross += checked;
        detail.push(format!("{kind} {sat}"));
    }
    Ok(format!(
        "{REDUCTION_SOURCES} sources x {} reductions hold (sat counts: {}); {cross} cross-checked by independent oracles",
        REDUCTIONS.len(),
        detail.join(", ")
    ))
}

// ---------------------------------------------------------------- 8

fn is_group_table(p: usize, t: &[u32]) -> bool {
    let op = |a: usize, b: usize| t[a * p + b] as usize;
    if t.len() != p * p || t.iter().any(|&x| x as usize >= p) {
        return false;
    }
    let Some(e) = (0..p).find(|&e| (0..p).all(|a| op(e, a) == a && op(a, e) == a)) else {
        return false;
    };
    let inverses = (0..p).all(|a| (0..p).any(|b| op(a, b) == e && op(b, a) == e));
    let assoc = (0..p).all(|a| (0..p).all(|b| (0..p).all(|c| op(op(a, b), c) == op(a, op(b, c)))));
    inverses && assoc
}

fn groupeq_case(p: usize, arcs: &[(usize, usize)], z: usize) -> Result<bool, String> {
    let d = Digraph::new(p, arcs.iter().copied(), false).map_err(|e| e.to_string())?;
    let out = hamdigraph_to_groupeq(&d, z).map_err(|e| e.to_string())?;
    let truth = directed_ham_cycle(p, arcs);
    let tables = brute_force_all(&out.target, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure!(truth == !tables.is_empty(), "p={p} arcs {arcs:?}: ham cycle {truth}, {} tables", tables.len());
    for t in &tables {
        ensure!(is_group_table(p, t), "p={p} arcs {arcs:?}: table {t:?} is not a group");
        let back = out.witness_backward(t).map_err(|e| e.to_string())?;
        ensure!(out.source.is_witness(&back), "p={p} arcs {arcs:?}: backward map gives a non-cycle");
    }
    let c = check_reduction(&out, DEFAULT_BUDGET, true).map_err(|e| e.to_string())?;
    ensure!(c.holds(), "p={p} arcs {arcs:?}: {c:?}");
    Ok(truth)
}

fn groupeq() -> Check {
    let all_arcs: Vec<(usize, usize)> = (1..=3).flat_map(|u| (1..=3).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    let mut yes = 0;
    let mut cases = 0;
    for mask in 0..1u32 << all_arcs.len() {
        let arcs: Vec<(usize, usize)> = (0..all_arcs.len()).filter(|i| mask >> i & 1 == 1).map(|i| all_arcs[i]).collect();
        for z in 1..=3 {
            yes += usize::from(groupeq_case(3, &arcs, z)?);
            cases += 1;
        }
    }
    for i in 0..GROUPEQ_RANDOM_DIGRAPHS {
        let mut r = rng(81, i);
        let density = r.gen_range(0.3..0.9);
        let arcs = random_edges(&mut r, 5, density, true);
        yes += usize::from(groupeq_case(5, &arcs, r.gen_range(1..=5))?);
        cases += 1;
    }
    Ok(format!("{cases} digraphs (all 64 over [3] with every z, {GROUPEQ_RANDOM_DIGRAPHS} random over [5]) match, {yes} Hamiltonian; every table is a group"))
}

// ---------------------------------------------------------------- 9

fn determinism() -> Check {
    let mut sizes = Vec::new();
    for fam in [BenchFamily::RandSmall, BenchFamily::OneSat, BenchFamily::TwoSat, BenchFamily::Ug] {
        let a = run_bench(fam, 100, 99).map_err(|e| e.to_string())?;
        let b = run_bench(fam, 100, 99).map_err(|e| e.to_string())?;
        ensure!(a.table().as_bytes() == b.table().as_bytes(), "{} tables differ", fam.name());
        ensure!(a.to_json().as_bytes() == b.to_json().as_bytes(), "{} JSON differs", fam.name());
        sizes.push(format!("{} {}B", fam.name(), a.table().len()));
    }
    Ok(format!("two runs byte-identical for every family ({})", sizes.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("transfer round-trip", transfer_round_trip),
        ("trial bounds", trial_bounds),
        ("reverse direction", reverse_direction),
        ("closure fact", closure_fact),
        ("hidden 2-SAT", hidden_2sat),
        ("RF matching solvers", matching_solvers),
        ("reduction equivalence", reduction_equivalence),
        ("GROUPEQ", groupeq),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {}. {name} [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
