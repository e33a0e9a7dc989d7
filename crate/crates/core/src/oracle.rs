//! Revealing oracles for hidden instances.
//!
//! A fixed oracle answers for one concrete instance. A lazy oracle only
//! knows, for each constraint, a set of candidate `(relation, variables)`
//! pairs and picks answers consistent with at least one choice.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::{AdmissibleSet, Assignment, Instance, Params, Relation, TupleSet};
use crate::error::{input_err, CspError, Result};

/// What a violation reveals besides the constraint index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RevealLevel {
    /// Relation and variable indices.
    RelationAndVars,
    Vars,
    Relation,
    /// Only the constraint index.
    None,
}

impl RevealLevel {
    pub const ALL: [RevealLevel; 4] = [
        RevealLevel::RelationAndVars,
        RevealLevel::Vars,
        RevealLevel::Relation,
        RevealLevel::None,
    ];

    pub fn reveals_relation(self) -> bool {
        matches!(self, RevealLevel::RelationAndVars | RevealLevel::Relation)
    }

    pub fn reveals_vars(self) -> bool {
        matches!(self, RevealLevel::RelationAndVars | RevealLevel::Vars)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rv" => Ok(RevealLevel::RelationAndVars),
            "v" => Ok(RevealLevel::Vars),
            "r" => Ok(RevealLevel::Relation),
            "none" => Ok(RevealLevel::None),
            _ => Err(CspError::Parse(format!("unknown reveal level {s:?} (rv, v, r, none)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RevealLevel::RelationAndVars => "rv",
            RevealLevel::Vars => "v",
            RevealLevel::Relation => "r",
            RevealLevel::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Response {
    Yes,
    /// Constraint `j` is violated; `k` and `vars` are present per the reveal level.
    Violation {
        j: usize,
        k: Option<usize>,
        vars: Option<Vec<usize>>,
    },
}

impl Response {
    pub fn is_yes(&self) -> bool {
        matches!(self, Response::Yes)
    }
}

/// Which violated constraint an oracle reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Lowest violated index.
    First,
    /// Uniform among violated constraints, from a seeded stream.
    Random(u64),
    /// The violated constraint reported least often so far; ties to the lowest index.
    Greedy,
}

impl Policy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Policy::First),
            "greedy" => Ok(Policy::Greedy),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(Policy::Random)
                    .map_err(|_| CspError::Parse(format!("bad seed in policy {s:?}"))),
                None => Err(CspError::Parse(format!(
                    "unknown policy {s:?} (first, random:SEED, greedy)"
                ))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            Policy::First => "first".into(),
            Policy::Random(s) => format!("random:{s}"),
            Policy::Greedy => "greedy".into(),
        }
    }
}

struct Chooser {
    policy: Policy,
    rng: ChaCha8Rng,
    reported: Vec<usize>,
}

impl Chooser {
    fn new(policy: Policy, m: usize) -> Self {
        let seed = match policy {
            Policy::Random(s) => s,
            _ => 0,
        };
        Self {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            reported: vec![0; m + 1],
        }
    }

    /// Picks one of the ascending, nonempty `violated` indices.
    fn choose(&mut self, violated: &[usize]) -> usize {
        let j = match self.policy {
            Policy::First => violated[0],
            Policy::Random(_) => violated[self.rng.gen_range(0..violated.len())],
            Policy::Greedy => *violated
                .iter()
                .min_by_key(|&&j| (self.reported[j], j))
                .unwrap(),
        };
        self.reported[j] += 1;
        j
    }
}

/// What every party knows in advance: the type, `W`, `m` and the reveal level.
#[derive(Clone, Debug)]
pub struct PublicInfo {
    pub params: Params,
    pub admissible: AdmissibleSet,
    pub relations: Vec<Relation>,
    pub m: usize,
    pub level: RevealLevel,
}

impl PublicInfo {
    /// Tuple sets of the type; every relation must be explicit.
    pub fn relation_sets(&self) -> Result<Vec<TupleSet>> {
        self.relations
            .iter()
            .map(|r| {
                r.as_explicit()
                    .cloned()
                    .ok_or_else(|| input_err!("type relation {} is not explicit", r.name))
            })
            .collect()
    }
}

/// Append-only record of trials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<(Assignment, Response)>,
}

impl Transcript {
    pub fn trials(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(Assignment, Response)] {
        &self.entries
    }

    fn push(&mut self, a: Assignment, r: Response) {
        self.entries.push((a, r));
    }

    /// One line per trial: `trial<TAB>assignment<TAB>response`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, (a, r)) in self.entries.iter().enumerate() {
            let word = a.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            let resp = match r {
                Response::Yes => "YES".to_string(),
                Response::Violation { j, k, vars } => {
                    let mut s = format!("VIOLATED j={j}");
                    if let Some(k) = k {
                        let _ = write!(s, " k={k}");
                    }
                    if let Some(v) = vars {
                        let v = v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                        let _ = write!(s, " vars=({v})");
                    }
                    s
                }
            };
            let _ = writeln!(out, "{}\t{}\t{}", i + 1, word, resp);
        }
        out
    }
}

pub trait Oracle {
    fn info(&self) -> &PublicInfo;
    /// Proposes `a ∈ W` and records the answer.
    fn submit(&mut self, a: &[u32]) -> Result<Response>;
    fn transcript(&self) -> &Transcript;
}

fn check_trial(info: &PublicInfo, a: &[u32]) -> Result<()> {
    if !info.admissible.contains(&info.params, a) {
        return Err(CspError::Protocol(format!("trial {a:?} is not an admissible assignment")));
    }
    Ok(())
}

/// Oracle for a concrete hidden instance.
pub struct FixedOracle {
    info: PublicInfo,
    inst: Instance,
    chooser: Chooser,
    transcript: Transcript,
}

impl FixedOracle {
    pub fn new(inst: Instance, level: RevealLevel, policy: Policy) -> Self {
        let info = PublicInfo {
            params: inst.params,
            admissible: inst.admissible.clone(),
            relations: inst.relations.clone(),
            m: inst.m(),
            level,
        };
        Self {
            chooser: Chooser::new(policy, inst.m()),
            info,
            inst,
            transcript: Transcript::default(),
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }
}

impl Oracle for FixedOracle {
    fn info(&self) -> &PublicInfo {
        &self.info
    }

    fn submit(&mut self, a: &[u32]) -> Result<Response> {
        check_trial(&self.info, a)?;
        let violated: Vec<usize> = (1..=self.inst.m())
            .filter(|&j| !self.inst.constraint_holds(j, a))
            .collect();
        let resp = if violated.is_empty() {
            Response::Yes
        } else {
            let j = self.chooser.choose(&violated);
            let c = &self.inst.constraints[j - 1];
            let level = self.info.level;
            Response::Violation {
                j,
                k: level.reveals_relation().then_some(c.rel),
                vars: level.reveals_vars().then(|| c.vars.clone()),
            }
        };
        self.transcript.push(a.to_vec(), resp.clone());
        Ok(resp)
    }

    fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

/// A possible identity of a hidden constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub rel: usize,
    pub vars: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LazyMode {
    /// Answer YES whenever every constraint has a candidate satisfied by the
    /// trial; otherwise report a constraint all of whose candidates fail.
    /// Candidate sets never shrink. Used by the reverse simulations.
    Accommodating,
    /// Report a violation whenever some candidate of some constraint fails,
    /// then keep only the candidates consistent with that report.
    Delaying,
}

pub struct LazyOracle {
    info: PublicInfo,
    possible: Vec<Vec<Candidate>>,
    mode: LazyMode,
    chooser: Chooser,
    transcript: Transcript,
}

impl LazyOracle {
    pub fn new(
        params: Params,
        admissible: AdmissibleSet,
        relations: Vec<Relation>,
        possible: Vec<Vec<Candidate>>,
        level: RevealLevel,
        mode: LazyMode,
        policy: Policy,
    ) -> Result<Self> {
        for (j, set) in possible.iter().enumerate() {
            if set.is_empty() {
                return Err(input_err!("possibility set of constraint {} is empty", j + 1));
            }
            for c in set {
                let r = relations
                    .get(c.rel.wrapping_sub(1))
                    .and_then(Relation::as_explicit)
                    .ok_or_else(|| input_err!("candidate relation {} is not an explicit type relation", c.rel))?;
                if r.arity() != c.vars.len() {
                    return Err(input_err!("candidate {c:?} does not match its relation's arity"));
                }
                crate::csp::check_var_tuple(&c.vars, params.ell)?;
            }
            if mode == LazyMode::Accommodating {
                let agree_k = set.iter().all(|c| c.rel == set[0].rel);
                let agree_t = set.iter().all(|c| c.vars == set[0].vars);
                if (level.reveals_relation() && !agree_k) || (level.reveals_vars() && !agree_t) {
                    return Err(input_err!(
                        "candidates of constraint {} disagree on data the oracle reveals",
                        j + 1
                    ));
                }
            }
        }
        let m = possible.len();
        Ok(Self {
            info: PublicInfo {
                params,
                admissible,
                relations,
                m,
                level,
            },
            possible,
            mode,
            chooser: Chooser::new(policy, m),
            transcript: Transcript::default(),
        })
    }

    pub fn possibilities(&self) -> &[Vec<Candidate>] {
        &self.possible
    }

    fn holds(&self, c: &Candidate, a: &[u32]) -> bool {
        self.info.relations[c.rel - 1]
            .as_explicit()
            .is_some_and(|r| r.contains_at(a, &c.vars))
    }
}

impl Oracle for LazyOracle {
    fn info(&self) -> &PublicInfo {
        &self.info
    }

    fn submit(&mut self, a: &[u32]) -> Result<Response> {
        check_trial(&self.info, a)?;
        let level = self.info.level;
        let violated: Vec<usize> = (1..=self.info.m)
            .filter(|&j| {
                let set = &self.possible[j - 1];
                match self.mode {
                    LazyMode::Accommodating => set.iter().all(|c| !self.holds(c, a)),
                    LazyMode::Delaying => set.iter().any(|c| !self.holds(c, a)),
                }
            })
            .collect();
        let resp = if violated.is_empty() {
            Response::Yes
        } else {
            let j = self.chooser.choose(&violated);
            let witness = self.possible[j - 1]
                .iter()
                .find(|c| !self.holds(c, a))
                .cloned()
                .ok_or_else(|| CspError::Internal("chosen constraint has no violated candidate".into()))?;
            if self.mode == LazyMode::Delaying {
                let keep: Vec<Candidate> = self.possible[j - 1]
                    .iter()
                    .filter(|c| {
                        !self.holds(c, a)
                            && (!level.reveals_relation() || c.rel == witness.rel)
                            && (!level.reveals_vars() || c.vars == witness.vars)
                    })
                    .cloned()
                    .collect();
                if keep.is_empty() {
                    return Err(CspError::Internal(format!("possibility set of constraint {j} emptied")));
                }
                self.possible[j - 1] = keep;
            }
            Response::Violation {
                j,
                k: level.reveals_relation().then_some(witness.rel),
                vars: level.reveals_vars().then(|| witness.vars.clone()),
            }
        };
        self.transcript.push(a.to_vec(), resp.clone());
        Ok(resp)
    }

    fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Constraint;

    fn id_neg() -> Vec<Relation> {
        vec![
            Relation::explicit("Id", 2, 1, [[1u32]]).unwrap(),
            Relation::explicit("Neg", 2, 1, [[0u32]]).unwrap(),
        ]
    }

    fn one_sat(ell: usize, cons: Vec<Constraint>) -> Instance {
        Instance::new(Params::new(2, ell, 1).unwrap(), AdmissibleSet::All, id_neg(), cons).unwrap()
    }

    #[test]
    fn fixed_oracle_examples() {
        let inst = one_sat(2, vec![Constraint::new(1, vec![1]), Constraint::new(2, vec![2])]);
        let mut o = FixedOracle::new(inst.clone(), RevealLevel::None, Policy::First);
        assert_eq!(
            o.submit(&[0, 1]).unwrap(),
            Response::Violation { j: 1, k: None, vars: None }
        );
        assert_eq!(o.submit(&[1, 0]).unwrap(), Response::Yes);
        assert_eq!(o.transcript().trials(), 2);

        let mut o = FixedOracle::new(inst, RevealLevel::Vars, Policy::First);
        assert_eq!(
            o.submit(&[0, 1]).unwrap(),
            Response::Violation { j: 1, k: None, vars: Some(vec![1]) }
        );
        assert!(o.transcript().dump().starts_with("1\t0,1\tVIOLATED j=1 vars=(1)"));
    }

    #[test]
    fn policies_parse_and_stay_deterministic() {
        assert_eq!(Policy::parse("random:42").unwrap(), Policy::Random(42));
        assert!(Policy::parse("random:x").is_err());
        assert!(Policy::parse("worst").is_err());
        let inst = one_sat(3, (1..=3).map(|v| Constraint::new(1, vec![v])).collect());
        let run = |p| {
            let mut o = FixedOracle::new(inst.clone(), RevealLevel::None, p);
            (0..5).map(|_| o.submit(&[0, 0, 0]).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(Policy::Random(7)), run(Policy::Random(7)));
        let greedy: Vec<usize> = run(Policy::Greedy)
            .into_iter()
            .map(|r| match r {
                Response::Violation { j, .. } => j,
                Response::Yes => 0,
            })
            .collect();
        assert_eq!(greedy, vec![1, 2, 3, 1, 2]);
    }

    #[test]
    fn inadmissible_trial_is_protocol_error() {
        let mut o = FixedOracle::new(one_sat(1, vec![]), RevealLevel::None, Policy::First);
        assert!(matches!(o.submit(&[3]), Err(CspError::Protocol(_))));
    }

    #[test]
    fn delaying_oracle_commits_late() {
        let p = Params::new(2, 2, 1).unwrap();
        let cands = vec![vec![
            Candidate { rel: 1, vars: vec![1] },
            Candidate { rel: 1, vars: vec![2] },
        ]];
        let mut o = LazyOracle::new(
            p,
            AdmissibleSet::All,
            id_neg(),
            cands,
            RevealLevel::None,
            LazyMode::Delaying,
            Policy::First,
        )
        .unwrap();
        assert!(!o.submit(&[0, 0]).unwrap().is_yes());
        assert_eq!(o.possibilities()[0].len(), 2);
        assert!(!o.submit(&[1, 0]).unwrap().is_yes());
        assert_eq!(o.possibilities()[0], vec![Candidate { rel: 1, vars: vec![2] }]);
        assert!(o.submit(&[1, 1]).unwrap().is_yes());
    }

    #[test]
    fn singleton_lazy_oracle_matches_fixed() {
        let inst = one_sat(2, vec![Constraint::new(1, vec![1]), Constraint::new(2, vec![2])]);
        let cands: Vec<Vec<Candidate>> = inst
            .constraints
            .iter()
            .map(|c| vec![Candidate { rel: c.rel, vars: c.vars.clone() }])
            .collect();
        for mode in [LazyMode::Accommodating, LazyMode::Delaying] {
            let mut lazy = LazyOracle::new(
                inst.params,
                AdmissibleSet::All,
                id_neg(),
                cands.clone(),
                RevealLevel::RelationAndVars,
                mode,
                Policy::First,
            )
            .unwrap();
            let mut fixed = FixedOracle::new(inst.clone(), RevealLevel::RelationAndVars, Policy::First);
            for a in [[0u32, 0], [0, 1], [1, 1], [1, 0]] {
                assert_eq!(lazy.submit(&a).unwrap(), fixed.submit(&a).unwrap());
            }
        }
    }

    #[test]
    fn empty_possibility_set_rejected() {
        let p = Params::new(2, 1, 1).unwrap();
        assert!(LazyOracle::new(
            p,
            AdmissibleSet::All,
            id_neg(),
            vec![vec![]],
            RevealLevel::None,
            LazyMode::Delaying,
            Policy::First
        )
        .is_err());
    }
}
