//! Trial-count benchmarks: run the engines on seeded random hidden
//! instances, compare trials with the proven bounds and answers with brute
//! force.
//!
//! Cases run in parallel. Each case derives its own generator from the
//! seed and the case id, so the report does not depend on scheduling.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::csp::{brute_force_solve, Instance, Outcome, DEFAULT_BUDGET};
use crate::error::{input_err, Result};
use crate::oracle::{FixedOracle, Policy, RevealLevel};
use crate::random::{random_1sat, random_2sat, random_instance, random_ug2, RandomSpec};
use crate::solvers::TwoSatBackend;
use crate::transfer::{
    solve_hidden_empty, solve_hidden_r, solve_hidden_rv, solve_hidden_v, BruteForceBackend, EngineOptions,
    EngineReport, SolverBackend,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchFamily {
    /// `w <= 3`, `ell <= 5`, `q <= 2`, `m <= 5`, `|R| <= 3`; all four engines.
    RandSmall,
    /// 1-SAT on 8 variables; all four engines.
    OneSat,
    /// Binary boolean instances on 12 variables with the 2-SAT backend.
    TwoSat,
    /// Unique games over two labels on 12 variables with the 2-SAT backend.
    Ug,
}

impl BenchFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rand-small" => Ok(Self::RandSmall),
            "1sat" => Ok(Self::OneSat),
            "2sat" => Ok(Self::TwoSat),
            "ug" => Ok(Self::Ug),
            _ => Err(input_err!("unknown family {s:?} (rand-small, 1sat, 2sat, ug)")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::RandSmall => "rand-small",
            Self::OneSat => "1sat",
            Self::TwoSat => "2sat",
            Self::Ug => "ug",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub case: usize,
    pub engine: &'static str,
    pub policy: String,
    pub m: usize,
    pub trials: usize,
    pub bound: u64,
    /// `sat`, `no`, or the error text.
    pub answer: String,
    pub within_bound: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchReport {
    pub family: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn bound_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.within_bound).count()
    }

    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| !r.agrees).count()
    }

    /// Aligned columns, one row per (case, engine, policy), then a summary.
    pub fn table(&self) -> String {
        let header = ["case", "engine", "policy", "m", "trials", "bound", "answer", "ok"];
        let cells: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.case.to_string(),
                    r.engine.to_string(),
                    r.policy.clone(),
                    r.m.to_string(),
                    r.trials.to_string(),
                    r.bound.to_string(),
                    r.answer.clone(),
                    if r.within_bound && r.agrees { "yes" } else { "NO" }.to_string(),
                ]
            })
            .collect();
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let mut line = |row: &[&str]| {
            let parts: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&header);
        for row in &cells {
            line(&row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        let _ = writeln!(
            out,
            "family {} seed {} cases {}: {} runs, {} bound violations, {} disagreements",
            self.family,
            self.seed,
            self.cases,
            self.rows.len(),
            self.bound_violations(),
            self.disagreements()
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Generator seed for one case (splitmix64 of seed and case id).
pub fn case_seed(seed: u64, case: usize) -> u64 {
    let mut z = seed ^ (case as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

type Engine = fn(&mut FixedOracle, &dyn SolverBackend) -> Result<EngineReport>;

const ENGINES: [(&str, RevealLevel, Engine); 4] = [
    ("rv", RevealLevel::RelationAndVars, |o, b| solve_hidden_rv(o, b)),
    ("v", RevealLevel::Vars, |o, b| solve_hidden_v(o, b)),
    ("r", RevealLevel::Relation, |o, b| solve_hidden_r(o, b)),
    ("none", RevealLevel::None, |o, b| solve_hidden_empty(o, b, &EngineOptions::default())),
];

fn row(case: usize, engine: &'static str, policy: Policy, inst: &Instance, expected: bool, r: Result<EngineReport>) -> BenchRow {
    let (trials, bound, answer, within, agrees) = match r {
        Ok(rep) => {
            let (answer, agrees) = match &rep.answer {
                Outcome::Solution(a) => ("sat".to_string(), expected && inst.satisfies(a)),
                Outcome::No => ("no".to_string(), !expected),
                Outcome::Exception => ("exception".to_string(), false),
            };
            (rep.trials, rep.bound, answer, rep.trials as u64 <= rep.bound, agrees)
        }
        Err(e) => (0, 0, format!("error: {e}"), false, false),
    };
    BenchRow {
        case,
        engine,
        policy: policy.name(),
        m: inst.m(),
        trials,
        bound,
        answer,
        within_bound: within,
        agrees,
    }
}

/// Runs every engine and oracle policy of the family on case `case`.
pub fn run_case(family: BenchFamily, seed: u64, case: usize) -> Result<Vec<BenchRow>> {
    use rand::Rng;
    let cs = case_seed(seed, case);
    let mut rng = ChaCha8Rng::seed_from_u64(cs);
    let inst = match family {
        BenchFamily::RandSmall => random_instance(&mut rng, &RandomSpec::default())?,
        BenchFamily::OneSat => {
            let m = rng.gen_range(0..=8);
            random_1sat(&mut rng, 8, m)?
        }
        BenchFamily::TwoSat => {
            let m = rng.gen_range(0..=20);
            random_2sat(&mut rng, 12, m)?
        }
        BenchFamily::Ug => {
            let m = rng.gen_range(0..=16);
            random_ug2(&mut rng, 12, m)?
        }
    };
    let expected = brute_force_solve(&inst, DEFAULT_BUDGET)?.is_solution();
    let brute = BruteForceBackend::default();
    let (engines, backend): (&[(&str, RevealLevel, Engine)], &dyn SolverBackend) = match family {
        BenchFamily::RandSmall | BenchFamily::OneSat => (&ENGINES, &brute),
        BenchFamily::TwoSat | BenchFamily::Ug => (&ENGINES[..2], &TwoSatBackend),
    };
    let mut rows = Vec::new();
    for &(name, level, engine) in engines {
        for policy in [Policy::First, Policy::Random(cs), Policy::Greedy] {
            let mut oracle = FixedOracle::new(inst.clone(), level, policy);
            rows.push(row(case, name, policy, &inst, expected, engine(&mut oracle, backend)));
        }
    }
    Ok(rows)
}

pub fn run_bench(family: BenchFamily, cases: usize, seed: u64) -> Result<BenchReport> {
    let per_case: Vec<Vec<BenchRow>> = (0..cases)
        .into_par_iter()
        .map(|c| run_case(family, seed, c))
        .collect::<Result<_>>()?;
    let mut rows: Vec<BenchRow> = per_case.into_iter().flatten().collect();
    // par_iter keeps order already; sort anyway so the contract is explicit
    rows.sort_by_key(|r| r.case);
    Ok(BenchReport {
        family: family.name(),
        seed,
        cases,
        rows,
    })
}
