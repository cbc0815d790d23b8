use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, small_primes};

/// A choice of residue class `a_p (mod p)` for some or all primes `p <= x`.
///
/// Partial maps are allowed: adding a class can only enlarge the covered set,
/// so a partial assignment covers `[y]` exactly when any completion of it does.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AssignmentFile", into = "AssignmentFile")]
pub struct ResidueAssignment {
    x: u64,
    classes: BTreeMap<u64, u64>,
}

impl ResidueAssignment {
    pub fn new(x: u64) -> Self {
        Self {
            x,
            classes: BTreeMap::new(),
        }
    }

    pub fn from_pairs(x: u64, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut out = Self::new(x);
        for (p, a) in pairs {
            out.insert(p, a)?;
        }
        Ok(out)
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// Sets `a_p`, replacing any earlier choice for `p`.
    pub fn insert(&mut self, p: u64, a: u64) -> Result<()> {
        if p > self.x || !is_prime_u64(p) {
            return Err(Error::InvalidAssignment(format!("{p} is not a prime <= {}", self.x)));
        }
        if a >= p {
            return Err(Error::InvalidAssignment(format!("residue {a} is not in [0, {p})")));
        }
        self.classes.insert(p, a);
        Ok(())
    }

    pub fn get(&self, p: u64) -> Option<u64> {
        self.classes.get(&p).copied()
    }

    /// `(p, a_p)` pairs in increasing order of `p`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.classes.iter().map(|(&p, &a)| (p, a))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// True when every prime `<= x` has a class.
    pub fn is_total(&self) -> bool {
        small_primes(self.x).iter().all(|p| self.classes.contains_key(p))
    }

    /// Gives class `0` to every prime `<= x` that has none.
    pub fn complete_with_zero(&mut self) {
        for p in small_primes(self.x) {
            self.classes.entry(p).or_insert(0);
        }
    }

    /// Copies every class of `other` into `self`.
    pub fn merge(&mut self, other: &ResidueAssignment) -> Result<()> {
        for (p, a) in other.iter() {
            self.insert(p, a)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassEntry {
    p: u64,
    a: u64,
}

/// On-disk shape: `{"x": int, "classes": [{"p": int, "a": int}, ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentFile {
    x: u64,
    classes: Vec<ClassEntry>,
}

impl TryFrom<AssignmentFile> for ResidueAssignment {
    type Error = Error;

    fn try_from(file: AssignmentFile) -> Result<Self> {
        let mut out = Self::new(file.x);
        for ClassEntry { p, a } in file.classes {
            if out.classes.contains_key(&p) {
                return Err(Error::InvalidAssignment(format!("prime {p} listed twice")));
            }
            out.insert(p, a)?;
        }
        Ok(out)
    }
}

impl From<ResidueAssignment> for AssignmentFile {
    fn from(a: ResidueAssignment) -> Self {
        Self {
            x: a.x,
            classes: a.iter().map(|(p, a)| ClassEntry { p, a }).collect(),
        }
    }
}

/// Coverage of `[1, y]` by an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveInterval {
    y: u64,
    // bit t - 1 describes position t
    covered: Vec<u64>,
    survivors: Vec<u64>,
}

impl SieveInterval {
    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn is_covered(&self, t: u64) -> bool {
        assert!((1..=self.y).contains(&t), "position {t} outside [1, {}]", self.y);
        let i = t - 1;
        self.covered[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn survivors(&self) -> &[u64] {
        &self.survivors
    }

    pub fn first_survivor(&self) -> Option<u64> {
        self.survivors.first().copied()
    }

    /// Largest `y'` such that `[1, y']` is fully covered.
    pub fn covered_prefix(&self) -> u64 {
        self.first_survivor().map_or(self.y, |t| t - 1)
    }
}

/// Marks every `t` in `[1, y]` lying in some class of `assignment`.
pub fn apply_classes(y: u64, assignment: &ResidueAssignment) -> SieveInterval {
    let mut covered = vec![0u64; y.div_ceil(64) as usize];
    for (p, a) in assignment.iter() {
        let mut t = if a == 0 { p } else { a };
        while t <= y {
            let i = t - 1;
            covered[(i / 64) as usize] |= 1 << (i % 64);
            t += p;
        }
    }
    let survivors = (1..=y)
        .filter(|&t| {
            let i = t - 1;
            covered[(i / 64) as usize] >> (i % 64) & 1 == 0
        })
        .collect();
    SieveInterval { y, covered, survivors }
}

/// True iff `assignment` covers all of `[1, y]`; vacuously true for `y = 0`.
pub fn verify_cover(y: u64, assignment: &ResidueAssignment) -> bool {
    apply_classes(y, assignment).survivors.is_empty()
}
