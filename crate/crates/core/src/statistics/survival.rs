//! Survival under a uniformly random residue class for each prime of a set
//! `S`: the exact products `gamma_i = prod (1 - i/s)`, an exhaustive
//! enumeration oracle, and seeded Monte Carlo estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{keyed_below, trial_seed, DOMAIN_STAGE2};

/// Largest number of assignments the exhaustive oracle enumerates.
pub const MAX_EXHAUSTIVE: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFactors {
    /// `gamma_1, ..., gamma_{i_max}` as exact fractions.
    #[serde(skip)]
    pub exact: Vec<BigRational>,
    pub values: Vec<f64>,
    pub gamma: f64,
    /// `max_i |gamma_i / gamma^i - 1|`
    pub max_relative_deviation: f64,
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `gamma_i = prod_{s in primes} (1 - i/s)` for `1 <= i <= i_max`.
pub fn gamma_factors(primes: &[u64], i_max: u32) -> Result<GammaFactors> {
    if let Some(&min) = primes.iter().min() {
        if i_max as u64 >= min {
            return Err(Error::InvalidParameter(format!(
                "i_max = {i_max} must be below the smallest prime {min}"
            )));
        }
    }
    let exact: Vec<BigRational> = (1..=i_max as u64)
        .map(|i| {
            primes.iter().fold(BigRational::one(), |acc, &s| {
                acc * BigRational::new(BigInt::from(s - i), BigInt::from(s))
            })
        })
        .collect();
    let values: Vec<f64> = exact.iter().map(rational_to_f64).collect();
    let gamma = values
        .first()
        .copied()
        .unwrap_or_else(|| primes.iter().map(|&s| 1.0 - 1.0 / s as f64).product());
    let max_relative_deviation = values
        .iter()
        .enumerate()
        .map(|(k, &g)| (g / gamma.powi(k as i32 + 1) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(GammaFactors {
        exact,
        values,
        gamma,
        max_relative_deviation,
    })
}

/// Fraction of all `prod s` assignments `(a_s)` under which every element of
/// `elements` avoids every class `a_s (mod s)`, by listing the assignments.
pub fn exhaustive_survival(primes: &[u64], elements: &[u64]) -> Result<BigRational> {
    let total = primes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s))
        .filter(|&t| t <= MAX_EXHAUSTIVE)
        .ok_or_else(|| Error::EnumerationTooLarge(primes.iter().map(|&s| s as u128).product()))?;
    let residues: Vec<Vec<u64>> = primes
        .iter()
        .map(|&s| elements.iter().map(|&n| n % s).collect())
        .collect();
    let mut digits = vec![0u64; primes.len()];
    let mut survived = 0u64;
    for _ in 0..total {
        if digits.iter().zip(&residues).all(|(&a, rs)| rs.iter().all(|&r| r != a)) {
            survived += 1;
        }
        // mixed-radix increment
        for (d, &s) in digits.iter_mut().zip(primes) {
            *d += 1;
            if *d < s {
                break;
            }
            *d = 0;
        }
    }
    Ok(BigRational::new(BigInt::from(survived), BigInt::from(total)))
}

/// Exact survival probability by independence: `prod_s (1 - k_s / s)` with
/// `k_s` the number of distinct residues of `elements` mod `s`.
pub fn survival_probability(primes: &[u64], elements: &[u64]) -> BigRational {
    primes.iter().fold(BigRational::one(), |acc, &s| {
        let mut rs: Vec<u64> = elements.iter().map(|&n| n % s).collect();
        rs.sort_unstable();
        rs.dedup();
        acc * BigRational::new(BigInt::from(s - rs.len() as u64), BigInt::from(s))
    })
}

/// Residue `a_s` for every `s` in `primes`, keyed by `(seed, s)`.
pub fn draw_stage2(primes: &[u64], seed: u64) -> Vec<u64> {
    primes.iter().map(|&s| keyed_below(seed, DOMAIN_STAGE2, s, s)).collect()
}

/// What a Monte Carlo run measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McTarget {
    /// Number of survivors of a fixed set.
    SurvivorCount(Vec<u64>),
    /// Indicator that both values survive.
    PairSurvival(u64, u64),
    /// Indicator that `start, start + step, ..., start + (len - 1) step` all survive.
    ApSurvival { start: u64, step: u64, len: u32 },
}

impl McTarget {
    fn elements(&self) -> Vec<u64> {
        match self {
            McTarget::SurvivorCount(v) => v.clone(),
            McTarget::PairSurvival(a, b) => vec![*a, *b],
            McTarget::ApSurvival { start, step, len } => (0..*len as u64).map(|k| start + k * step).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub trials: u64,
    pub seed: u64,
    pub empirical_mean: f64,
    /// `gamma * #set`, `gamma_2` or `gamma_len`.
    pub predicted: f64,
    /// Exact expectation computed from the residues of the target.
    pub exact: f64,
    pub std_error: f64,
    pub z_score: f64,
}

fn survivors_in_trial(primes: &[u64], elements: &[u64], seed: u64) -> u64 {
    let classes = draw_stage2(primes, seed);
    let Some(&max) = elements.iter().max() else {
        return 0;
    };
    if elements.len() < 64 {
        return elements
            .iter()
            .filter(|&&n| primes.iter().zip(&classes).all(|(&s, &a)| n % s != a))
            .count() as u64;
    }
    let mut removed = vec![false; max as usize + 1];
    for (&s, &a) in primes.iter().zip(&classes) {
        let mut k = a;
        while k <= max {
            removed[k as usize] = true;
            k += s;
        }
    }
    elements.iter().filter(|&&n| !removed[n as usize]).count() as u64
}

/// Seeded Monte Carlo over uniformly random classes `a_s`, one per prime.
/// Trial `k` uses the stream keyed by `(seed, k)`.
pub fn montecarlo_stage2(primes: &[u64], target: &McTarget, trials: u64, seed: u64) -> Result<McResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let elements = target.elements();
    let k = elements.len() as u32;
    let samples: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| survivors_in_trial(primes, &elements, trial_seed(seed, t)))
        .collect();
    let exact_single = survival_probability(primes, &elements);
    let (mean, predicted, exact, variance) = match target {
        McTarget::SurvivorCount(set) => {
            let gamma: f64 = primes.iter().map(|&s| 1.0 - 1.0 / s as f64).product();
            let mean = samples.iter().sum::<u64>() as f64 / trials as f64;
            let n = set.len() as f64;
            (mean, gamma * n, gamma * n, n * gamma * (1.0 - gamma))
        }
        _ => {
            let full = samples.iter().filter(|&&c| c == k as u64).count() as f64;
            let mean = full / trials as f64;
            let predicted = if k as u64 >= primes.iter().copied().min().unwrap_or(u64::MAX) {
                0.0
            } else {
                rational_to_f64(
                    &gamma_factors(primes, k)?
                        .exact
                        .last()
                        .cloned()
                        .unwrap_or_else(BigRational::one),
                )
            };
            (
                mean,
                predicted,
                rational_to_f64(&exact_single),
                predicted * (1.0 - predicted),
            )
        }
    };
    let std_error = (variance / trials as f64).sqrt();
    let z_score = if std_error > 0.0 {
        (mean - predicted) / std_error
    } else if mean == predicted {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McResult {
        trials,
        seed,
        empirical_mean: mean,
        predicted,
        exact,
        std_error,
        z_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_factors(&[5, 7], 2).unwrap();
        assert_eq!(g.exact, vec![q(24, 35), q(3, 7)]);
        let empty = gamma_factors(&[], 4).unwrap();
        assert!(empty.exact.iter().all(|v| *v == q(1, 1)));
        assert_eq!(empty.gamma, 1.0);
        assert!(gamma_factors(&[5, 7], 5).is_err());
    }

    #[test]
    fn gamma_bounds() {
        let primes = [11u64, 13, 17, 19, 23];
        let g = gamma_factors(&primes, 5).unwrap();
        for (i, v) in g.values.iter().enumerate() {
            assert!(*v > 0.0 && *v <= g.gamma.powi(i as i32 + 1) + 1e-15);
        }
    }

    #[test]
    fn exhaustive_mean_of_ten_element_set() {
        // mean survivor count = sum of single-element survival fractions
        let set: Vec<u64> = (100..110).collect();
        let total: BigRational = set.iter().map(|&n| exhaustive_survival(&[5, 7], &[n]).unwrap()).sum();
        assert_eq!(total, q(240, 35));
    }

    #[test]
    fn exhaustive_matches_independence() {
        let primes = [5u64, 7, 11];
        for elements in [vec![1u64], vec![1, 2], vec![3, 8], vec![0, 35, 77], vec![4, 6, 8, 10]] {
            assert_eq!(
                exhaustive_survival(&primes, &elements).unwrap(),
                survival_probability(&primes, &elements),
                "{elements:?}"
            );
        }
        assert!(exhaustive_survival(&[101, 103, 107, 109], &[1]).is_err());
    }

    #[test]
    fn empty_prime_set_is_exact() {
        let r = montecarlo_stage2(&[], &McTarget::SurvivorCount(vec![1, 2, 3]), 10, 0).unwrap();
        assert_eq!(r.empirical_mean, r.predicted);
        assert_eq!(r.z_score, 0.0);
        let r = montecarlo_stage2(&[], &McTarget::PairSurvival(1, 2), 10, 0).unwrap();
        assert_eq!(r.empirical_mean, 1.0);
        assert_eq!(r.predicted, 1.0);
    }

    #[test]
    fn montecarlo_is_reproducible() {
        let target = McTarget::ApSurvival {
            start: 3,
            step: 4,
            len: 2,
        };
        let a = montecarlo_stage2(&[5, 7, 11], &target, 500, 9).unwrap();
        let b = montecarlo_stage2(&[5, 7, 11], &target, 500, 9).unwrap();
        assert_eq!(a, b);
        assert!(montecarlo_stage2(&[5], &target, 0, 9).is_err());
    }

    #[test]
    fn large_set_path_agrees_with_small_set_path() {
        let primes = [13u64, 17, 19];
        let set: Vec<u64> = (1000..1100).collect();
        for t in 0..20 {
            let seed = trial_seed(3, t);
            let classes = draw_stage2(&primes, seed);
            let direct = set
                .iter()
                .filter(|&&n| primes.iter().zip(&classes).all(|(&s, &a)| n % s != a))
                .count() as u64;
            assert_eq!(survivors_in_trial(&primes, &set, seed), direct);
        }
    }
}
