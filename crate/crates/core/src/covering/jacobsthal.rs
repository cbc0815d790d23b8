use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::primes::{distinct_prime_factors, is_prime_u64};

/// Largest `n` we factor by trial division.
pub const MAX_FACTOR_N: u64 = 1_000_000_000_000;

/// Longest period (product of distinct prime factors) we are willing to scan.
pub const MAX_PERIOD: u64 = 1_000_000_000;

const SCAN_SEGMENT: u64 = 1 << 20;

/// Jacobsthal's function `j(n)`: the largest gap between consecutive
/// integers coprime to `n`, with `j(1) = 1`.
pub fn jacobsthal(n: &BigUint) -> Result<u64> {
    let small = n
        .to_u64()
        .filter(|&v| v <= MAX_FACTOR_N)
        .ok_or_else(|| Error::FactorizationUnavailable(n.to_string()))?;
    if small == 0 {
        return Err(Error::InvalidParameter("j(n) needs n >= 1".into()));
    }
    jacobsthal_of_primes(&distinct_prime_factors(small))
}

/// `j(n)` for `n` given by its distinct prime factors.
///
/// The coprime indicator has period `prod(primes)`, so one period starting
/// at 1 (itself coprime) contains every gap.
pub fn jacobsthal_of_primes(primes: &[u64]) -> Result<u64> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if let Some(&bad) = primes.iter().find(|&&p| !is_prime_u64(p)) {
        return Err(Error::InvalidParameter(format!("{bad} is not prime")));
    }
    let mut period: u64 = 1;
    for &p in &primes {
        period = period
            .checked_mul(p)
            .filter(|&v| v <= MAX_PERIOD)
            .ok_or_else(|| Error::PeriodTooLarge(format!("product of {primes:?}")))?;
    }

    let mut best = 1u64;
    let mut last_coprime = 1u64;
    let mut divisible = Vec::new();
    let end = period + 1; // inclusive; period + 1 is coprime again
    let mut lo = 2u64;
    while lo <= end {
        let hi = (lo + SCAN_SEGMENT - 1).min(end);
        divisible.clear();
        divisible.resize((hi - lo + 1) as usize, false);
        for &p in &primes {
            let mut t = lo.div_ceil(p) * p;
            while t <= hi {
                divisible[(t - lo) as usize] = true;
                t += p;
            }
        }
        for (i, &d) in divisible.iter().enumerate() {
            if !d {
                let t = lo + i as u64;
                best = best.max(t - last_coprime);
                last_coprime = t;
            }
        }
        lo = hi + 1;
    }
    Ok(best)
}
