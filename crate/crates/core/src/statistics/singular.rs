//! Partial products of the prime-progression singular series
//!
//! ```text
//! alpha_r = prod_{p <= r} (p/(p-1))^(r-1) * prod_{p > r} (p-r) p^(r-1) / (p-1)^r
//! ```
//!
//! evaluated in 256-bit fixed point. Each factor with `p > r` equals
//! `exp(-sum_{k>=2} (r^k - r)/(k p^k))`, so `|log f_p| <= (r/p)^2` once
//! `p >= 2r`, and the omitted tail beyond a cutoff `c >= 2r` changes the log
//! of the product by at most `r^2 / c`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::small_primes;

const FRACTION_BITS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSeriesApprox {
    pub r: u32,
    pub cutoff: u64,
    pub value: f64,
    /// The partial product to 40 decimal places.
    pub value_decimal: String,
    /// Bound on `|ln(alpha_r / value)|`; infinite when `cutoff < 2r`.
    pub tail_bound: f64,
    pub low_precision: bool,
}

fn pow(base: u64, exp: u32) -> BigUint {
    BigUint::from(base).pow(exp)
}

fn fixed_to_f64(v: &BigUint) -> f64 {
    let hi = v >> (FRACTION_BITS - 64);
    hi.to_f64().expect("finite") / 2f64.powi(64)
}

fn fixed_to_decimal(v: &BigUint, digits: u32) -> String {
    let scaled = (v * BigUint::from(10u32).pow(digits)) >> FRACTION_BITS;
    let s = scaled.to_str_radix(10);
    let digits = digits as usize;
    let padded = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = padded.split_at(padded.len() - digits);
    format!("{int}.{frac}")
}

/// Partial product of `alpha_r` over primes `<= cutoff`.
pub fn singular_series(r: u32, cutoff: u64) -> Result<SingularSeriesApprox> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if cutoff < 2 {
        return Err(Error::InvalidParameter("cutoff must be at least 2".into()));
    }
    let mut value = BigUint::one() << FRACTION_BITS;
    for p in small_primes(cutoff) {
        if p <= r as u64 {
            value = value * pow(p, r - 1) / pow(p - 1, r - 1);
        } else {
            value = value * BigUint::from(p - r as u64) * pow(p, r - 1) / pow(p - 1, r);
        }
    }
    let tail_bound = match r {
        1 => 0.0,
        _ if cutoff >= 2 * r as u64 => (r as f64).powi(2) / cutoff as f64,
        _ => f64::INFINITY,
    };
    Ok(SingularSeriesApprox {
        r,
        cutoff,
        value: fixed_to_f64(&value),
        value_decimal: fixed_to_decimal(&value, 40),
        tail_bound,
        low_precision: r > 1 && cutoff <= r as u64,
    })
}

/// Result of comparing two cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub coarse: SingularSeriesApprox,
    pub fine: SingularSeriesApprox,
    pub difference: f64,
    /// `fine` lies within the tail bound of `coarse`, and for `r >= 2` the
    /// product did not increase.
    pub consistent: bool,
}

pub fn convergence_check(r: u32, coarse_cutoff: u64, fine_cutoff: u64) -> Result<Convergence> {
    if fine_cutoff < coarse_cutoff {
        return Err(Error::InvalidParameter(
            "fine cutoff must not be below coarse cutoff".into(),
        ));
    }
    let coarse = singular_series(r, coarse_cutoff)?;
    let fine = singular_series(r, fine_cutoff)?;
    let difference = coarse.value - fine.value;
    let allowed = coarse.value * coarse.tail_bound.exp_m1();
    let monotone = r < 2 || coarse_cutoff < r as u64 || difference >= 0.0;
    Ok(Convergence {
        consistent: monotone && difference.abs() <= allowed,
        coarse,
        fine,
        difference,
    })
}
