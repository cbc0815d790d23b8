use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::small_primes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothCount {
    pub y: u64,
    pub z: u64,
    /// z-smooth integers in `[1, y]`, counting 1.
    pub count: u64,
    pub u: f64,
    /// `y * exp(-u log u)` with `u = log y / log z`; reported, not asserted.
    pub de_bruijn_prediction: f64,
}

/// Exact count of z-smooth integers in `[1, y]` by a largest-prime-factor
/// sieve. Uses `4 * y` bytes, checked against `mem_budget_bytes`.
pub fn smooth_count(y: u64, z: u64, mem_budget_bytes: u64) -> Result<SmoothCount> {
    if y == 0 || z < 2 {
        return Err(Error::InvalidParameter(format!(
            "need y >= 1 and z >= 2, got y = {y}, z = {z}"
        )));
    }
    if y > u32::MAX as u64 || y.saturating_mul(4) > mem_budget_bytes {
        return Err(Error::MemoryBudget {
            requested: y.saturating_mul(4),
            budget: mem_budget_bytes,
        });
    }
    let count = if z >= y {
        y
    } else {
        // largest[n] ends up as the largest prime factor of n
        let mut largest = vec![0u32; y as usize + 1];
        for p in small_primes(y) {
            let mut k = p;
            while k <= y {
                largest[k as usize] = p as u32;
                k += p;
            }
        }
        1 + largest[2..].iter().filter(|&&l| l as u64 <= z).count() as u64
    };
    let u = (y as f64).ln() / (z as f64).ln();
    let de_bruijn_prediction = if u > 0.0 {
        y as f64 * (-u * u.ln()).exp()
    } else {
        y as f64
    };
    Ok(SmoothCount {
        y,
        z,
        count,
        u,
        de_bruijn_prediction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 1 << 30;

    fn by_factoring(y: u64, z: u64) -> u64 {
        (1..=y)
            .filter(|&n| {
                let mut m = n;
                let mut d = 2;
                while d * d <= m {
                    while m % d == 0 {
                        if d > z {
                            return false;
                        }
                        m /= d;
                    }
                    d += 1;
                }
                m <= z || m == 1
            })
            .count() as u64
    }

    #[test]
    fn examples() {
        assert_eq!(smooth_count(10, 2, BUDGET).unwrap().count, 4);
        assert_eq!(smooth_count(100, 5, BUDGET).unwrap().count, 34);
        assert_eq!(by_factoring(100, 5), 34);
        assert_eq!(smooth_count(50, 50, BUDGET).unwrap().count, 50);
        assert_eq!(smooth_count(50, 80, BUDGET).unwrap().count, 50);
        assert_eq!(smooth_count(1, 2, BUDGET).unwrap().count, 1);
    }

    #[test]
    fn agrees_with_factoring() {
        for (y, z) in [(1000, 7), (2000, 30), (999, 31), (500, 2)] {
            assert_eq!(
                smooth_count(y, z, BUDGET).unwrap().count,
                by_factoring(y, z),
                "y={y} z={z}"
            );
        }
    }

    #[test]
    fn errors() {
        assert!(smooth_count(0, 5, BUDGET).is_err());
        assert!(smooth_count(10, 1, BUDGET).is_err());
        assert!(matches!(
            smooth_count(1_000_000, 5, 1000),
            Err(Error::MemoryBudget { .. })
        ));
    }
}
