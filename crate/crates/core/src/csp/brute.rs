use super::{Assignment, Instance, Outcome};
use crate::error::Result;

/// Default number of admissible assignments brute force may examine.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// First satisfying assignment in lexicographic order over `W`, or `No`.
///
/// Examines at most `budget` assignments; if the budget runs out before
/// `W` is exhausted the result is a resource error, never `No`.
pub fn brute_force_solve(inst: &Instance, budget: u64) -> Result<Outcome> {
    let mut found = None;
    let m = inst.m();
    inst.admissible.visit(&inst.params, budget, &mut |a| {
        if (1..=m).all(|j| inst.constraint_holds(j, a)) {
            found = Some(a.to_vec());
            true
        } else {
            false
        }
    })?;
    Ok(found.map_or(Outcome::No, Outcome::Solution))
}

/// Every satisfying assignment, in lexicographic order.
pub fn brute_force_all(inst: &Instance, budget: u64) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    let m = inst.m();
    inst.admissible.visit(&inst.params, budget, &mut |a| {
        if (1..=m).all(|j| inst.constraint_holds(j, a)) {
            out.push(a.to_vec());
        }
        false
    })?;
    Ok(out)
}
