use std::fmt;

use crate::closures::{ExtendedRelation, UnionRelation};
use crate::error::{input_err, Result};

/// Largest `w^arity` for which a membership bitmap is kept.
const BITMAP_LIMIT: u64 = 1 << 16;

/// A finite set of equal-length tuples over the alphabet `[w] = {0, .., w-1}`.
///
/// Tuples are stored by their packed code `sum a_i * w^i` (first coordinate
/// least significant). Small universes also get a bitmap so that membership
/// is a single word lookup.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TupleSet {
    w: u32,
    arity: usize,
    codes: Vec<u64>,
    bitmap: Option<Vec<u64>>,
}

impl TupleSet {
    pub fn new<I, T>(w: u32, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u32]>,
    {
        if w == 0 {
            return Err(input_err!("alphabet size must be positive"));
        }
        universe_size(w, arity)?;
        let mut codes = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(input_err!(
                    "tuple {:?} has length {}, expected arity {}",
                    t,
                    t.len(),
                    arity
                ));
            }
            if let Some(&bad) = t.iter().find(|&&x| x >= w) {
                return Err(input_err!("letter {bad} outside alphabet of size {w}"));
            }
            codes.push(pack(w, t.iter().copied()));
        }
        Ok(Self::from_codes(w, arity, codes))
    }

    pub fn empty(w: u32, arity: usize) -> Self {
        Self::from_codes(w, arity, Vec::new())
    }

    /// Every tuple of `[w]^arity`.
    pub fn full(w: u32, arity: usize) -> Result<Self> {
        let size = universe_size(w, arity)?;
        Ok(Self::from_codes(w, arity, (0..size).collect()))
    }

    pub(crate) fn from_codes(w: u32, arity: usize, mut codes: Vec<u64>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        let size = universe_size(w, arity).unwrap_or(u64::MAX);
        let bitmap = (size <= BITMAP_LIMIT).then(|| {
            let mut bits = vec![0u64; (size as usize).div_ceil(64).max(1)];
            for &c in &codes {
                bits[(c / 64) as usize] |= 1 << (c % 64);
            }
            bits
        });
        Self {
            w,
            arity,
            codes,
            bitmap,
        }
    }

    pub fn alphabet(&self) -> u32 {
        self.w
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    #[inline]
    pub fn contains_code(&self, code: u64) -> bool {
        match &self.bitmap {
            Some(bits) => bits
                .get((code / 64) as usize)
                .is_some_and(|word| word >> (code % 64) & 1 == 1),
            None => self.codes.binary_search(&code).is_ok(),
        }
    }

    /// Membership of a tuple. Letters outside the alphabet are never members.
    pub fn contains(&self, tuple: &[u32]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&x| x < self.w)
            && self.contains_code(pack(self.w, tuple.iter().copied()))
    }

    /// Membership of the projection `(a_{v_1}, .., a_{v_q})`, with 1-based `vars`.
    #[inline]
    pub fn contains_at(&self, a: &[u32], vars: &[usize]) -> bool {
        debug_assert_eq!(vars.len(), self.arity);
        let mut code = 0u64;
        let mut scale = 1u64;
        for &v in vars {
            let x = a[v - 1];
            if x >= self.w {
                return false;
            }
            code += x as u64 * scale;
            scale = scale.wrapping_mul(self.w as u64);
        }
        self.contains_code(code)
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = self
            .codes
            .iter()
            .map(|&c| unpack(self.w, self.arity, c))
            .collect();
        out.sort();
        out
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        debug_assert_eq!((self.w, self.arity), (other.w, other.arity));
        let mut codes = self.codes.clone();
        codes.extend_from_slice(&other.codes);
        Self::from_codes(self.w, self.arity, codes)
    }

    pub fn intersection(&self, other: &TupleSet) -> TupleSet {
        let codes = self
            .codes
            .iter()
            .copied()
            .filter(|&c| other.contains_code(c))
            .collect();
        Self::from_codes(self.w, self.arity, codes)
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.codes.iter().all(|&c| other.contains_code(c))
    }

    pub fn is_disjoint(&self, other: &TupleSet) -> bool {
        self.codes.iter().all(|&c| !other.contains_code(c))
    }
}

impl fmt::Debug for TupleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.tuples()).finish()
    }
}

/// `w^arity`, or a resource error if it does not fit in 64 bits.
pub fn universe_size(w: u32, arity: usize) -> Result<u64> {
    let mut size: u64 = 1;
    for _ in 0..arity {
        size = size.checked_mul(w as u64).ok_or_else(|| {
            crate::error::CspError::Resource(format!("{w}^{arity} tuples do not fit in 64 bits"))
        })?;
    }
    Ok(size)
}

#[inline]
pub(crate) fn pack(w: u32, tuple: impl Iterator<Item = u32>) -> u64 {
    let mut code = 0u64;
    let mut scale = 1u64;
    for x in tuple {
        code += x as u64 * scale;
        scale = scale.wrapping_mul(w as u64);
    }
    code
}

pub(crate) fn unpack(w: u32, arity: usize, mut code: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(arity);
    for _ in 0..arity {
        out.push((code % w as u64) as u32);
        code /= w as u64;
    }
    out
}

/// How a relation's tuples are given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationBody {
    /// An explicit tuple set; these make up the type of a problem.
    Explicit(TupleSet),
    /// The union of explicit relations of the same arity (a member of the union closure).
    Union(UnionRelation),
    /// A union of coordinate extensions of explicit relations; has arity `ell`.
    Extended(ExtendedRelation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub body: RelationBody,
}

impl Relation {
    pub fn explicit<I, T>(name: impl Into<String>, w: u32, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u32]>,
    {
        Ok(Self {
            name: name.into(),
            body: RelationBody::Explicit(TupleSet::new(w, arity, tuples)?),
        })
    }

    pub fn from_set(name: impl Into<String>, set: TupleSet) -> Self {
        Self {
            name: name.into(),
            body: RelationBody::Explicit(set),
        }
    }

    pub fn union(name: impl Into<String>, members: UnionRelation) -> Self {
        Self {
            name: name.into(),
            body: RelationBody::Union(members),
        }
    }

    pub fn extended(name: impl Into<String>, ext: ExtendedRelation) -> Self {
        Self {
            name: name.into(),
            body: RelationBody::Extended(ext),
        }
    }

    pub fn as_explicit(&self) -> Option<&TupleSet> {
        match &self.body {
            RelationBody::Explicit(t) => Some(t),
            _ => None,
        }
    }
}

/// Evaluates an explicit relation at a point of matching arity.
pub fn eval_relation(rel: &Relation, point: &[u32]) -> Result<bool> {
    let set = rel
        .as_explicit()
        .ok_or_else(|| input_err!("relation {} is not explicit", rel.name))?;
    if point.len() != set.arity() {
        return Err(input_err!(
            "point of length {} given to relation {} of arity {}",
            point.len(),
            rel.name,
            set.arity()
        ));
    }
    if let Some(&bad) = point.iter().find(|&&x| x >= set.alphabet()) {
        return Err(input_err!("letter {bad} outside alphabet of size {}", set.alphabet()));
    }
    Ok(set.contains(point))
}
