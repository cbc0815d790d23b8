use rayon::prelude::*;

use super::bits::Bits;
use super::params::ConstructionParams;
use super::partition::PrimePartition;
use super::relation::RefinedRelation;
use crate::covering::ResidueAssignment;
use crate::error::{Error, Result};
use crate::primes::is_prime_u64;
use crate::rng::{keyed_below, DOMAIN_STAGE3};
use crate::statistics::draw_stage2;

/// Survivors of `[1, y]`, one bit per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survivors {
    bits: Bits,
    y: u64,
}

impl Survivors {
    fn full(y: u64) -> Self {
        let mut bits = Bits::ones(y + 1);
        bits.clear(0);
        Self { bits, y }
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && self.bits.get(n)
    }

    pub fn count(&self) -> u64 {
        self.bits.count()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.bits.iter_ones().collect()
    }

    /// Removes the class `a (mod s)`, returning how many survivors it held.
    fn remove_class(&mut self, s: u64, a: u64) -> u64 {
        let mut removed = 0;
        let mut t = if a == 0 { s } else { a };
        while t <= self.y {
            if self.bits.get(t) {
                self.bits.clear(t);
                removed += 1;
            }
            t += s;
        }
        removed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage1 {
    pub survivors: Survivors,
    /// Surviving primes in `(x/4, y]`.
    pub q_primes: Vec<u64>,
    /// Surviving z-smooth integers, including 1.
    pub smooth: Vec<u64>,
    /// Survivors in neither class: a prime factor above `x/4` times a
    /// nontrivial z-smooth cofactor.
    pub other: Vec<u64>,
}

impl Stage1 {
    pub fn split_is_exhaustive(&self) -> bool {
        self.other.is_empty()
    }
}

/// `a_s = 0` for `s` in `S1`.
pub fn stage1(params: &ConstructionParams, partition: &PrimePartition) -> Result<(ResidueAssignment, Stage1)> {
    let mut assignment = ResidueAssignment::new(params.x);
    let mut survivors = Survivors::full(params.y);
    for &s in &partition.s1 {
        assignment.insert(s, 0)?;
        survivors.remove_class(s, 0);
    }
    let z = params.z;
    let list = survivors.to_vec();
    let kinds: Vec<u8> = list
        .par_iter()
        .map(|&n| {
            let mut m = n;
            for &s in &partition.s2 {
                if s * s > m {
                    break;
                }
                while m % s == 0 {
                    m /= s;
                }
            }
            if m <= z {
                1
            } else if m == n && is_prime_u64(n) {
                0
            } else {
                2
            }
        })
        .collect();
    let mut stage = Stage1 {
        survivors,
        q_primes: Vec::new(),
        smooth: Vec::new(),
        other: Vec::new(),
    };
    for (n, kind) in list.into_iter().zip(kinds) {
        match kind {
            0 => stage.q_primes.push(n),
            1 => stage.smooth.push(n),
            _ => stage.other.push(n),
        }
    }
    Ok((assignment, stage))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage2 {
    pub survivors: Survivors,
    /// `Q(a)`: primes of `(x/4, y]` outside every class.
    pub q_survivors: Vec<u64>,
}

/// Keyed uniform classes for `s` in `S2`.
pub fn stage2(
    params: &ConstructionParams,
    partition: &PrimePartition,
    stage1: &Stage1,
) -> Result<(ResidueAssignment, Stage2)> {
    let classes = draw_stage2(&partition.s2, params.seed);
    let mut assignment = ResidueAssignment::new(params.x);
    let mut survivors = stage1.survivors.clone();
    for (&s, &a) in partition.s2.iter().zip(&classes) {
        assignment.insert(s, a)?;
        survivors.remove_class(s, a);
    }
    let q_survivors = stage1
        .q_primes
        .iter()
        .copied()
        .filter(|&q| survivors.contains(q))
        .collect();
    Ok((assignment, Stage2 { survivors, q_survivors }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage3 {
    /// `(p, q_p)` for every `p` with nonempty `Q(a, p)`.
    pub choices: Vec<(u64, u64)>,
    /// Primes with empty `Q(a, p)`, handed to the fourth stage.
    pub deferred: Vec<u64>,
    pub survivors: Survivors,
    /// Size of the union of the chosen progressions.
    pub progression_removed: u64,
    /// Survivors removed by the full classes `q_p (mod p)`.
    pub class_removed: u64,
}

/// Picks `q_p` uniformly from `Q(a, p)` and removes the class `q_p (mod p)`.
pub fn stage3(
    params: &ConstructionParams,
    refined: &RefinedRelation,
    survivors: &Survivors,
) -> Result<(ResidueAssignment, Stage3)> {
    let picks: Vec<Option<u64>> = (0..refined.p_primes().len())
        .into_par_iter()
        .map(|k| {
            let c = refined.candidates(k);
            (!c.is_empty()).then(|| {
                let idx = keyed_below(params.seed, DOMAIN_STAGE3, refined.p_primes()[k], c.len() as u64);
                c[idx as usize]
            })
        })
        .collect();
    let mut assignment = ResidueAssignment::new(params.x);
    let mut out = Stage3 {
        choices: Vec::new(),
        deferred: Vec::new(),
        survivors: survivors.clone(),
        progression_removed: 0,
        class_removed: 0,
    };
    let mut progression: Vec<u64> = Vec::new();
    for (&p, pick) in refined.p_primes().iter().zip(picks) {
        match pick {
            Some(q) => {
                out.choices.push((p, q));
                assignment.insert(p, q % p)?;
                let step = refined.r_factorial() * p;
                progression.extend((0..refined.r() as u64).map(|i| q + i * step));
                out.class_removed += out.survivors.remove_class(p, q % p);
            }
            None => out.deferred.push(p),
        }
    }
    progression.sort_unstable();
    progression.dedup();
    out.progression_removed = progression.len() as u64;
    Ok((assignment, out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage4 {
    /// `(s, v)`: survivor `v` eliminated by `a_s = v mod s`.
    pub matched: Vec<(u64, u64)>,
    /// Survivors left after the pool ran out.
    pub remainder: Vec<u64>,
    pub pool_size: usize,
}

/// Walks the survivors in increasing order, giving each one still uncovered
/// the next prime of `pool` with `a_s = v mod s`. Unused pool primes get
/// `a_s = 0`.
pub fn stage4(x: u64, survivors: &[u64], pool: &[u64]) -> Result<(ResidueAssignment, Stage4)> {
    if survivors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("survivors must be strictly increasing".into()));
    }
    let mut pool_sorted = pool.to_vec();
    pool_sorted.sort_unstable();
    pool_sorted.dedup();
    let mut alive = vec![true; survivors.len()];
    let max = survivors.last().copied().unwrap_or(0);
    let mut assignment = ResidueAssignment::new(x);
    let mut next = pool_sorted.iter();
    let mut out = Stage4 {
        matched: Vec::new(),
        remainder: Vec::new(),
        pool_size: pool_sorted.len(),
    };
    for (k, &v) in survivors.iter().enumerate() {
        if !alive[k] {
            continue;
        }
        let Some(&s) = next.next() else {
            out.remainder.push(v);
            continue;
        };
        assignment.insert(s, v % s)?;
        out.matched.push((s, v));
        let mut t = v;
        while t <= max {
            if let Ok(j) = survivors.binary_search(&t) {
                alive[j] = false;
            }
            t += s;
        }
    }
    for &s in next {
        assignment.insert(s, 0)?;
    }
    Ok((assignment, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::params::ConstructionInput;
    use crate::construction::partition::partition_primes;

    #[test]
    fn stage1_toy() {
        let params = ConstructionInput::new(2, 30, 0).with_y(20).with_z(4).resolve().unwrap();
        let part = partition_primes(&params);
        let (a, s1) = stage1(&params, &part).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(s1.survivors.to_vec(), vec![1, 11, 13, 17, 19]);
        assert_eq!(s1.q_primes, vec![11, 13, 17, 19]);
        assert_eq!(s1.smooth, vec![1]);
        assert!(s1.split_is_exhaustive());
    }

    #[test]
    fn stage1_small_y() {
        // y below the smallest prime above log x: only 1 and S2 primes remain
        let params = ConstructionInput::new(2, 1000, 0)
            .with_y(300)
            .with_z(30)
            .resolve()
            .unwrap();
        let part = partition_primes(&params);
        let (_, s1) = stage1(&params, &part).unwrap();
        for n in s1.survivors.to_vec() {
            assert!(part.s1.iter().all(|&s| n % s != 0));
        }
        assert!(s1.other.iter().all(|&n| !is_prime_u64(n)));
    }

    #[test]
    fn stage4_counting() {
        let pool = [101u64, 103, 107, 109, 113];
        let (a, s) = stage4(200, &[], &pool).unwrap();
        assert!(s.remainder.is_empty() && s.matched.is_empty());
        assert!(a.iter().all(|(_, c)| c == 0));
        let survivors: Vec<u64> = (1..=5).collect();
        let (_, s) = stage4(200, &survivors, &pool).unwrap();
        assert!(s.remainder.is_empty());
        assert_eq!(s.matched.len(), 5);
        let survivors: Vec<u64> = (1..=8).collect();
        let (_, s) = stage4(200, &survivors, &pool).unwrap();
        assert_eq!(s.remainder, vec![6, 7, 8]);
    }

    #[test]
    fn stage4_incidental_cover() {
        // 2 and 13 share the class 2 mod 11
        let (_, s) = stage4(40, &[2, 13], &[11]).unwrap();
        assert_eq!(s.matched, vec![(11, 2)]);
        assert!(s.remainder.is_empty());
    }
}
