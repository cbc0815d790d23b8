use serde::{Deserialize, Serialize};

use super::params::ConstructionParams;
use crate::primes::small_primes;

/// The four classes of primes `<= x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePartition {
    /// `p <= log x` or `z < p <= x/4`
    pub s1: Vec<u64>,
    /// `log x < p <= z`
    pub s2: Vec<u64>,
    /// `x/2 < p <= x`
    pub s3: Vec<u64>,
    /// `x/4 < p <= x/2`
    pub s4: Vec<u64>,
}

pub fn partition_primes(params: &ConstructionParams) -> PrimePartition {
    partition_with(params.x, params.z)
}

pub(crate) fn partition_with(x: u64, z: u64) -> PrimePartition {
    let log_x = (x as f64).ln();
    let mut part = PrimePartition {
        s1: Vec::new(),
        s2: Vec::new(),
        s3: Vec::new(),
        s4: Vec::new(),
    };
    for p in small_primes(x) {
        let class = if 2 * p > x {
            &mut part.s3
        } else if 4 * p > x {
            &mut part.s4
        } else if (p as f64) <= log_x || p > z {
            &mut part.s1
        } else {
            &mut part.s2
        };
        class.push(p);
    }
    part
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x100_z2() {
        let part = partition_with(100, 2);
        assert!(part.s2.is_empty());
        assert_eq!(part.s3, vec![53, 59, 61, 67, 71, 73, 79, 83, 89, 97]);
        assert_eq!(part.s4, vec![29, 31, 37, 41, 43, 47]);
    }

    #[test]
    fn toy_instance() {
        let part = partition_with(30, 4);
        assert_eq!(part.s1, vec![2, 3, 5, 7]);
        assert!(part.s2.is_empty());
        assert_eq!(part.s3, vec![17, 19, 23, 29]);
        assert_eq!(part.s4, vec![11, 13]);
    }

    #[test]
    fn s2_window() {
        // log 1000 = 6.9
        let part = partition_with(1000, 30);
        assert_eq!(part.s2, vec![7, 11, 13, 17, 19, 23, 29]);
        assert!(part.s1.contains(&5) && part.s1.contains(&31) && part.s1.contains(&241));
        assert_eq!(part.s4.first(), Some(&251));
    }
}
