//! `hcsp`: solve, hide, reduce, verify and bench hidden CSP instances.
//!
//! Exit codes: 0 solution (or OK), 1 NO, 2 EXCEPTION, 64 usage or parse
//! errors, 70 internal failures.

mod dimacs;
mod external;
mod sources;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use hidden_csp::bench::{run_bench, BenchFamily};
use hidden_csp::format::{assignment_to_string, instance_from_json, instance_to_json, parse_assignment};
use hidden_csp::oracle::{FixedOracle, Oracle, Policy, RevealLevel};
use hidden_csp::reductions::check_reduction;
use hidden_csp::solvers::{MatchingBackend, TwoSatBackend};
use hidden_csp::transfer::{
    solve_hidden_empty, solve_hidden_r, solve_hidden_rv, solve_hidden_v, solve_hidden_v_promise, BruteForceBackend,
    EngineOptions, SolverBackend,
};
use hidden_csp::{brute_force_solve, CspError, Instance, Outcome};

const EXIT_SOLUTION: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_EXCEPTION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "hcsp", version, about = "Hidden constraint satisfaction problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance by exhaustive search.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = hidden_csp::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Hide an instance behind an oracle and solve it by trial and error.
    Hide {
        file: PathBuf,
        /// rv, v, r or none.
        #[arg(long, default_value = "v")]
        reveal: String,
        /// first, random:SEED or greedy.
        #[arg(long, default_value = "first")]
        policy: String,
        /// brute, 2sat, matching or custom:PATH.
        #[arg(long, default_value = "brute")]
        backend: String,
        /// Print every trial after the report.
        #[arg(long)]
        transcript: bool,
        #[arg(long)]
        json: bool,
    },
    /// Build the target instance of a reduction from a source file.
    Reduce {
        /// st, dst, ucc, dcc, bpm, dpath, upath, 3sat-delta, 3col-ug, eq-clique,
        /// eq-hamc, col-hyp, monsat, rf-2sat, rf-2col or groupeq.
        #[arg(long)]
        from: String,
        source: PathBuf,
        /// Target instance file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Manifest file; defaults to OUT with `.manifest.json` appended.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Base type for monsat: 1sat, 2sat or lineq:P.
        #[arg(long, default_value = "1sat")]
        base: String,
        /// Also write the target as DIMACS CNF (boolean targets only).
        #[arg(long)]
        emit_dimacs: Option<PathBuf>,
        /// Check the reduction on this source by brute force.
        #[arg(long)]
        check: bool,
    },
    /// Check an assignment against an instance.
    Verify { instance: PathBuf, assignment: PathBuf },
    /// Trial counts of the engines on seeded random instances.
    Bench {
        /// rand-small, 1sat, 2sat or ug.
        #[arg(long, default_value = "rand-small")]
        family: String,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full report as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hcsp: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    if let Some(c) = e.downcast_ref::<CspError>() {
        return match c {
            CspError::Input(_) | CspError::Parse(_) | CspError::Precondition(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
    }
    if e.downcast_ref::<std::io::Error>().is_some() || e.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    EXIT_INTERNAL
}

/// A bad command line that clap cannot catch.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = read(path)?;
    instance_from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn run(cmd: Cmd) -> anyhow::Result<u8> {
    match cmd {
        Cmd::Solve { file, budget } => solve(&file, budget),
        Cmd::Hide {
            file,
            reveal,
            policy,
            backend,
            transcript,
            json,
        } => hide(&file, &reveal, &policy, &backend, transcript, json),
        Cmd::Reduce {
            from,
            source,
            out,
            manifest,
            base,
            emit_dimacs,
            check,
        } => reduce(&from, &source, out, manifest, &base, emit_dimacs, check),
        Cmd::Verify { instance, assignment } => verify(&instance, &assignment),
        Cmd::Bench {
            family,
            cases,
            seed,
            json,
        } => bench(&family, cases, seed, json),
    }
}

/// Under a promise an unsatisfiable instance breaks the promise.
fn print_outcome(inst: &Instance, outcome: &Outcome) -> u8 {
    match outcome {
        Outcome::Solution(a) => {
            println!("{}", assignment_to_string(a));
            EXIT_SOLUTION
        }
        Outcome::No if inst.promise.is_none() => {
            println!("NO");
            EXIT_NO
        }
        Outcome::No | Outcome::Exception => {
            println!("EXCEPTION");
            EXIT_EXCEPTION
        }
    }
}

fn solve(file: &Path, budget: u64) -> anyhow::Result<u8> {
    let inst = load_instance(file)?;
    let outcome = brute_force_solve(&inst, budget)?;
    Ok(print_outcome(&inst, &outcome))
}

fn backend_from(spec: &str) -> anyhow::Result<Box<dyn SolverBackend>> {
    Ok(match spec {
        "brute" => Box::new(BruteForceBackend::default()),
        "2sat" => Box::new(TwoSatBackend),
        "matching" => Box::new(MatchingBackend),
        _ => match spec.strip_prefix("custom:") {
            Some(path) if !path.is_empty() => Box::new(external::ExternalBackend::new(path)),
            _ => bail!(Usage(format!("unknown backend {spec:?} (brute, 2sat, matching, custom:PATH)"))),
        },
    })
}

fn hide(file: &Path, reveal: &str, policy: &str, backend: &str, transcript: bool, json: bool) -> anyhow::Result<u8> {
    let inst = load_instance(file)?;
    let level = RevealLevel::parse(reveal)?;
    let policy = Policy::parse(policy)?;
    let backend = backend_from(backend)?;
    let promise = inst.promise.is_some();
    let mut oracle = FixedOracle::new(inst.clone(), level, policy);
    let opts = EngineOptions::default();
    let start = Instant::now();
    let report = match level {
        RevealLevel::Vars if promise => solve_hidden_v_promise(&mut oracle, backend.as_ref(), &opts, true),
        RevealLevel::RelationAndVars => solve_hidden_rv(&mut oracle, backend.as_ref()),
        RevealLevel::Vars => solve_hidden_v(&mut oracle, backend.as_ref()),
        RevealLevel::Relation => solve_hidden_r(&mut oracle, backend.as_ref()),
        RevealLevel::None => solve_hidden_empty(&mut oracle, backend.as_ref(), &opts),
    }?;
    let elapsed = start.elapsed();
    if let Outcome::Solution(a) = &report.answer {
        inst.verify_solution(a, "engine")?;
    }
    let answer = match &report.answer {
        Outcome::Solution(a) => assignment_to_string(a),
        Outcome::No if !promise => "NO".into(),
        _ => "EXCEPTION".into(),
    };
    let problem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if json {
        let v = serde_json::json!({
            "problem": problem,
            "level": level.name(),
            "policy": policy.name(),
            "backend": backend.name(),
            "m": inst.m(),
            "trials": report.trials,
            "bound": report.bound,
            "backend_calls": report.backend_calls,
            "answer": answer,
            "time_ms": elapsed.as_secs_f64() * 1e3,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("problem: {problem}");
        println!("level: {}", level.name());
        println!("policy: {}", policy.name());
        println!("backend: {}", backend.name());
        println!("m: {}", inst.m());
        println!("trials: {}", report.trials);
        println!("bound: {}", report.bound);
        println!("backend calls: {}", report.backend_calls);
        println!("answer: {answer}");
        println!("time: {:.3} ms", elapsed.as_secs_f64() * 1e3);
    }
    if transcript {
        print!("{}", oracle.transcript().dump());
    }
    if report.trials as u64 > report.bound {
        bail!(CspError::Internal(format!(
            "{} trials exceed the bound {}",
            report.trials, report.bound
        )));
    }
    Ok(match report.answer {
        Outcome::Solution(_) => EXIT_SOLUTION,
        Outcome::No if !promise => EXIT_NO,
        _ => EXIT_EXCEPTION,
    })
}

fn reduce(
    from: &str,
    source: &Path,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
    base: &str,
    emit_dimacs: Option<PathBuf>,
    check: bool,
) -> anyhow::Result<u8> {
    let text = read(source)?;
    let red = sources::build(from, &text, base).with_context(|| format!("in {}", source.display()))?;
    let target = instance_to_json(&red.target);
    let manifest_json = serde_json::to_string_pretty(&serde_json::json!({
        "reduction": red.name,
        "provenance": red.provenance,
        "source": red.source.description(),
        "source_file": source.display().to_string(),
        "witness_maps": sources::map_description(red.name),
        "target": { "w": red.target.params.w, "ell": red.target.params.ell, "m": red.target.m() },
    }))? + "\n";
    match &out {
        Some(path) => {
            write(path, &target)?;
            let mpath = manifest.unwrap_or_else(|| {
                let mut s = path.clone().into_os_string();
                s.push(".manifest.json");
                s.into()
            });
            write(&mpath, &manifest_json)?;
        }
        None => {
            print!("{target}");
            if let Some(m) = &manifest {
                write(m, &manifest_json)?;
            }
        }
    }
    if let Some(path) = emit_dimacs {
        write(&path, &dimacs::instance_to_cnf(&red.target)?.to_dimacs())?;
    }
    if check {
        let c = check_reduction(&red, hidden_csp::DEFAULT_BUDGET, true)?;
        let show = |o: Option<bool>| match o {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "-",
        };
        eprintln!(
            "check: source {} target {} forward {} backward {}",
            if c.source_sat { "sat" } else { "unsat" },
            if c.target_sat { "sat" } else { "unsat" },
            show(c.forward_ok),
            show(c.backward_ok)
        );
        if !c.holds() {
            bail!(CspError::Internal(format!("reduction {} failed its check", red.name)));
        }
    }
    Ok(EXIT_SOLUTION)
}

fn verify(instance: &Path, assignment: &Path) -> anyhow::Result<u8> {
    let inst = load_instance(instance)?;
    let a = parse_assignment(&read(assignment)?)?;
    let bad = inst.violations(&a)?;
    if bad.is_empty() {
        println!("OK");
        return Ok(EXIT_SOLUTION);
    }
    let list: Vec<String> = bad.iter().map(usize::to_string).collect();
    println!("VIOLATED {}", list.join(" "));
    Ok(EXIT_NO)
}

fn bench(family: &str, cases: usize, seed: u64, json: Option<PathBuf>) -> anyhow::Result<u8> {
    let family = BenchFamily::parse(family)?;
    let report = run_bench(family, cases, seed)?;
    print!("{}", report.table());
    if let Some(path) = json {
        write(&path, &(report.to_json() + "\n"))?;
    }
    if report.bound_violations() + report.disagreements() > 0 {
        bail!(CspError::Internal("bench found bound violations or disagreements".into()));
    }
    Ok(EXIT_SOLUTION)
}
