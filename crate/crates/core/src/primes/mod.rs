//! Prime generation, primality, primorials and prime-gap records.

mod gaps;
mod primality;
mod sieve;

pub use gaps::{gap_records, max_gap, merit_report, merit_rows, GapRecord, MeritRow};
pub use primality::{distinct_prime_factors, is_prime_big, is_prime_u64};
pub use sieve::{
    sieve_range, small_primes, PrimeStream, PrimeTable, SieveConfig, DEFAULT_MEM_BUDGET, DEFAULT_SEGMENT_LEN,
};

use num_bigint::BigUint;
use num_traits::One;

/// Product of a slice of integers, split recursively so that the big
/// multiplications happen between operands of similar size.
pub fn product_tree(values: &[u64]) -> BigUint {
    match values.len() {
        0 => BigUint::one(),
        1 => BigUint::from(values[0]),
        n if n <= 16 => values.iter().fold(BigUint::one(), |acc, &v| acc * v),
        n => {
            let (left, right) = values.split_at(n / 2);
            product_tree(left) * product_tree(right)
        }
    }
}

/// Product of all primes `<= x` (1 for `x < 2`).
pub fn primorial(x: u64) -> BigUint {
    product_tree(&small_primes(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primorial_small() {
        assert_eq!(primorial(2), BigUint::from(2u32));
        assert_eq!(primorial(10), BigUint::from(210u32));
        assert_eq!(primorial(13), BigUint::from(30030u32));
    }

    #[test]
    fn primorial_97_matches_reverse_fold() {
        let p = primorial(97);
        let reverse = small_primes(97).iter().rev().fold(BigUint::one(), |acc, &q| acc * q);
        assert_eq!(p, reverse);
        assert_eq!(p.to_string().len(), 37);
    }

    #[test]
    fn primorial_ratio_is_product_of_primes_between() {
        let (a, b) = (50u64, 120u64);
        let between: BigUint = small_primes(b)
            .into_iter()
            .filter(|&p| p > a)
            .fold(BigUint::one(), |acc, p| acc * p);
        assert_eq!(primorial(b), primorial(a) * between);
    }
}
