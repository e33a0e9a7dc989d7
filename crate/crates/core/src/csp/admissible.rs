use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::family::Family;
use super::relation::{pack, TupleSet};
use super::{Assignment, Params, DEFAULT_BUDGET};
use crate::error::{input_err, CspError, Result};

/// The admissible set `W ⊆ [w]^ell`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AdmissibleSet {
    /// Every word of `[w]^ell`.
    All,
    /// An explicit list, kept sorted and deduplicated.
    List(Vec<Assignment>),
    /// Words with pairwise distinct letters.
    Permutations,
    /// Binary words with at least `k` ones.
    MinWeight(usize),
    /// A graph or table family with its own membership test and enumerator.
    Family(Family),
}

impl AdmissibleSet {
    pub fn list(mut words: Vec<Assignment>) -> Self {
        words.sort();
        words.dedup();
        AdmissibleSet::List(words)
    }

    pub(crate) fn check(&self, p: &Params) -> Result<()> {
        match self {
            AdmissibleSet::All | AdmissibleSet::Permutations => Ok(()),
            AdmissibleSet::List(words) => {
                for a in words {
                    if a.len() != p.ell || a.iter().any(|&x| x >= p.w) {
                        return Err(input_err!("listed word {a:?} is not in [{}]^{}", p.w, p.ell));
                    }
                }
                Ok(())
            }
            AdmissibleSet::MinWeight(k) => {
                if p.w != 2 {
                    return Err(input_err!("weight sets need w = 2, got {}", p.w));
                }
                if *k > p.ell {
                    return Err(input_err!("weight bound {k} exceeds ell = {}", p.ell));
                }
                Ok(())
            }
            AdmissibleSet::Family(f) => {
                if f.ell() != p.ell || f.alphabet() != p.w {
                    return Err(input_err!(
                        "family {f:?} needs w = {}, ell = {}; got w = {}, ell = {}",
                        f.alphabet(),
                        f.ell(),
                        p.w,
                        p.ell
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, p: &Params, a: &[u32]) -> bool {
        if a.len() != p.ell || a.iter().any(|&x| x >= p.w) {
            return false;
        }
        match self {
            AdmissibleSet::All => true,
            AdmissibleSet::List(words) => words.binary_search_by(|w| w.as_slice().cmp(a)).is_ok(),
            AdmissibleSet::Permutations => {
                let mut seen = vec![false; p.w as usize];
                a.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true))
            }
            AdmissibleSet::MinWeight(k) => a.iter().filter(|&&x| x == 1).count() >= *k,
            AdmissibleSet::Family(f) => f.contains(a),
        }
    }

    /// Calls `f` on the elements of `W` in lexicographic order until it
    /// returns `true`. Returns whether `f` stopped the walk. At most
    /// `budget` elements are visited; if more remain, a resource error.
    pub fn visit(
        &self,
        p: &Params,
        budget: u64,
        f: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Result<bool> {
        let mut seen = 0u64;
        let mut exceeded = false;
        let mut step = |a: &[u32]| -> bool {
            if seen == budget {
                exceeded = true;
                return true;
            }
            seen += 1;
            f(a)
        };
        let stopped = match self {
            AdmissibleSet::All => odometer(p, &mut |a| step(a)),
            AdmissibleSet::MinWeight(k) => {
                let k = *k;
                odometer(p, &mut |a| a.iter().filter(|&&x| x == 1).count() >= k && step(a))
            }
            AdmissibleSet::List(words) => words.iter().any(|a| step(a)),
            AdmissibleSet::Permutations => {
                let mut word = vec![0u32; p.ell];
                let mut used = vec![false; p.w as usize];
                injective(p, 0, &mut word, &mut used, &mut |a| step(a))
            }
            AdmissibleSet::Family(fam) => {
                let words = fam.enumerate_cached(budget)?;
                words.iter().any(|a| step(a))
            }
        };
        if exceeded {
            return Err(CspError::Resource(format!(
                "admissible set has more than {budget} elements"
            )));
        }
        Ok(stopped)
    }

    pub fn enumerate(&self, p: &Params, budget: u64) -> Result<Vec<Assignment>> {
        let mut out = Vec::new();
        self.visit(p, budget, &mut |a| {
            out.push(a.to_vec());
            false
        })?;
        Ok(out)
    }

    /// Lexicographically least element of `W`.
    pub fn first(&self, p: &Params) -> Result<Option<Assignment>> {
        let mut found = None;
        self.visit(p, u64::MAX, &mut |a| {
            found = Some(a.to_vec());
            true
        })?;
        Ok(found)
    }

    /// Samples words of `W` and checks that random coordinate permutations
    /// stay inside `W`.
    pub fn symmetry_spot_check(&self, p: &Params, seed: u64, samples: usize) -> Result<bool> {
        let words = self.enumerate(p, DEFAULT_BUDGET)?;
        if words.is_empty() {
            return Ok(true);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..p.ell).collect();
        for _ in 0..samples {
            let a = &words[rng.gen_range(0..words.len())];
            perm.shuffle(&mut rng);
            let b: Vec<u32> = perm.iter().map(|&i| a[i]).collect();
            if !self.contains(p, &b) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn odometer(p: &Params, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    let mut a = vec![0u32; p.ell];
    loop {
        if f(&a) {
            return true;
        }
        let mut i = p.ell;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < p.w {
                break;
            }
            a[i] = 0;
        }
    }
}

fn injective(
    p: &Params,
    pos: usize,
    word: &mut Vec<u32>,
    used: &mut Vec<bool>,
    f: &mut dyn FnMut(&[u32]) -> bool,
) -> bool {
    if pos == p.ell {
        return f(word);
    }
    for x in 0..p.w {
        if !used[x as usize] {
            used[x as usize] = true;
            word[pos] = x;
            let stop = injective(p, pos + 1, word, used, f);
            used[x as usize] = false;
            if stop {
                return true;
            }
        }
    }
    false
}

/// `W_q`: the set of length-`q` prefixes of words in `W`.
pub fn project_admissible(w_set: &AdmissibleSet, p: &Params, q: usize) -> Result<TupleSet> {
    if q > p.ell {
        return Err(input_err!("cannot project to {q} > ell = {} coordinates", p.ell));
    }
    let sub = Params { ell: q, ..*p };
    match w_set {
        AdmissibleSet::All => TupleSet::full(p.w, q),
        AdmissibleSet::Permutations => {
            if (p.w as usize) < p.ell {
                return Ok(TupleSet::empty(p.w, q));
            }
            let words = AdmissibleSet::Permutations.enumerate(&sub, DEFAULT_BUDGET)?;
            Ok(TupleSet::from_codes(p.w, q, words.iter().map(|a| pack(p.w, a.iter().copied())).collect()))
        }
        AdmissibleSet::MinWeight(k) => {
            let need = k.saturating_sub(p.ell - q);
            let words = AdmissibleSet::MinWeight(need).enumerate(&sub, DEFAULT_BUDGET)?;
            Ok(TupleSet::from_codes(p.w, q, words.iter().map(|a| pack(p.w, a.iter().copied())).collect()))
        }
        _ => {
            let mut codes = Vec::new();
            w_set.visit(p, DEFAULT_BUDGET, &mut |a| {
                codes.push(pack(p.w, a[..q].iter().copied()));
                false
            })?;
            Ok(TupleSet::from_codes(p.w, q, codes))
        }
    }
}

type FamilyCache = Mutex<HashMap<Family, Arc<Vec<Assignment>>>>;

impl Family {
    /// Sorted members, memoized per family.
    pub(crate) fn enumerate_cached(&self, budget: u64) -> Result<Arc<Vec<Assignment>>> {
        static CACHE: OnceLock<FamilyCache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(self) {
            if hit.len() as u64 <= budget {
                return Ok(hit.clone());
            }
        }
        let words = Arc::new(self.enumerate(budget)?);
        cache.lock().unwrap().insert(self.clone(), words.clone());
        Ok(words)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        let p = Params::new(2, 3, 2).unwrap();
        assert_eq!(project_admissible(&AdmissibleSet::All, &p, 2).unwrap().len(), 4);

        let p = Params::new(3, 3, 2).unwrap();
        let proj = project_admissible(&AdmissibleSet::Permutations, &p, 2).unwrap();
        assert_eq!(proj.len(), 6);
        assert!(proj.tuples().iter().all(|t| t[0] != t[1]));

        let p = Params::new(2, 3, 1).unwrap();
        let single = AdmissibleSet::list(vec![vec![0, 0, 0]]);
        assert_eq!(project_admissible(&single, &p, 1).unwrap().tuples(), vec![vec![0]]);
    }

    #[test]
    fn projection_matches_enumeration() {
        for (set, w, ell) in [
            (AdmissibleSet::Permutations, 4, 3),
            (AdmissibleSet::MinWeight(2), 2, 4),
            (AdmissibleSet::MinWeight(0), 2, 3),
        ] {
            let p = Params::new(w, ell, 1).unwrap();
            for q in 0..=ell {
                let fast = project_admissible(&set, &p, q).unwrap();
                let mut codes = Vec::new();
                set.visit(&p, DEFAULT_BUDGET, &mut |a| {
                    codes.push(pack(w, a[..q].iter().copied()));
                    false
                })
                .unwrap();
                assert_eq!(fast, TupleSet::from_codes(w, q, codes), "{set:?} q={q}");
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let p = Params::new(3, 3, 1).unwrap();
        for set in [AdmissibleSet::All, AdmissibleSet::Permutations] {
            let words = set.enumerate(&p, DEFAULT_BUDGET).unwrap();
            assert!(words.windows(2).all(|w| w[0] < w[1]));
            assert!(words.iter().all(|a| set.contains(&p, a)));
        }
        assert_eq!(AdmissibleSet::Permutations.enumerate(&p, 100).unwrap().len(), 6);
    }

    #[test]
    fn budget_exceeded_is_resource_error() {
        let p = Params::new(2, 4, 1).unwrap();
        assert!(matches!(
            AdmissibleSet::All.enumerate(&p, 15),
            Err(CspError::Resource(_))
        ));
        assert_eq!(AdmissibleSet::All.enumerate(&p, 16).unwrap().len(), 16);
    }

    #[test]
    fn shipped_word_sets_are_symmetric() {
        let p = Params::new(3, 4, 1).unwrap();
        for set in [AdmissibleSet::All, AdmissibleSet::Permutations] {
            assert!(set.symmetry_spot_check(&p, 7, 200).unwrap());
        }
        let p = Params::new(2, 5, 1).unwrap();
        assert!(AdmissibleSet::MinWeight(3).symmetry_spot_check(&p, 7, 200).unwrap());
    }
}
