use serde::{Deserialize, Serialize};

use super::assignment::ResidueAssignment;
use crate::error::{Error, Result};
use crate::primes::small_primes;

/// Order in which the greedy heuristic visits the primes `<= x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeOrder {
    #[default]
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyY {
    pub y: u64,
    pub witness: ResidueAssignment,
}

/// Runs the greedy heuristic on `[1, y]`: each prime takes the class holding
/// the most current survivors, smallest residue on ties. Returns the
/// assignment and the survivors left at the end.
pub fn greedy_cover(x: u64, y: u64, order: PrimeOrder) -> (ResidueAssignment, Vec<u64>) {
    let mut primes = small_primes(x);
    if order == PrimeOrder::Decreasing {
        primes.reverse();
    }
    let mut survivors: Vec<u64> = (1..=y).collect();
    let mut assignment = ResidueAssignment::new(x);
    let mut counts = Vec::new();
    for p in primes {
        counts.clear();
        counts.resize(p as usize, 0u64);
        for &t in &survivors {
            counts[(t % p) as usize] += 1;
        }
        // max_by_key keeps the last maximum, so scan in reverse to keep the smallest a
        let (a, _) = counts
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|&(_, c)| *c)
            .expect("p >= 2");
        let a = a as u64;
        assignment.insert(p, a).expect("a < p and p prime");
        survivors.retain(|&t| t % p != a);
    }
    (assignment, survivors)
}

/// Largest `y` found by binary search such that [`greedy_cover`] leaves no
/// survivors in `[1, y]`.
///
/// Greedy success is not monotone in `y`, so the answer is a point where the
/// heuristic succeeds at `y` and fails at `y + 1`, found by doubling then
/// bisecting.
pub fn greedy_y(x: u64, order: PrimeOrder) -> Result<GreedyY> {
    if x < 2 {
        return Err(Error::InvalidParameter(format!("x = {x} must be at least 2")));
    }
    let covers = |y: u64| -> Option<ResidueAssignment> {
        let (a, rest) = greedy_cover(x, y, order);
        rest.is_empty().then_some(a)
    };
    let mut lo = 1u64;
    let mut best = covers(1).expect("a single class of 2 covers [1, 1]");
    let mut hi = 2u64;
    loop {
        match covers(hi) {
            Some(a) => {
                lo = hi;
                best = a;
                hi *= 2;
            }
            None => break,
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match covers(mid) {
            Some(a) => {
                lo = mid;
                best = a;
            }
            None => hi = mid,
        }
    }
    Ok(GreedyY { y: lo, witness: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::verify_cover;

    #[test]
    fn x2_covers_one() {
        let g = greedy_y(2, PrimeOrder::Increasing).unwrap();
        assert_eq!(g.y, 1);
        assert_eq!(g.witness.get(2), Some(1));
    }

    #[test]
    fn witnesses_verify() {
        for x in [2, 3, 5, 7, 11, 13, 17, 23, 31] {
            for order in [PrimeOrder::Increasing, PrimeOrder::Decreasing] {
                let g = greedy_y(x, order).unwrap();
                assert!(verify_cover(g.y, &g.witness), "x = {x} {order:?}");
                assert!(g.witness.is_total());
            }
        }
    }

    #[test]
    fn ties_take_smallest_residue() {
        // y = 4: classes 0 and 1 mod 2 both hold two survivors
        let (a, _) = greedy_cover(2, 4, PrimeOrder::Increasing);
        assert_eq!(a.get(2), Some(0));
    }

    #[test]
    fn rejects_small_x() {
        assert!(greedy_y(1, PrimeOrder::Increasing).is_err());
    }
}
