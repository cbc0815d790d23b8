use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::assignment::{apply_classes, ResidueAssignment};
use crate::error::{Error, Result};

/// An integer `m` with, for every `1 <= t <= y`, a divisor `p` of `m + t`
/// smaller than `m + t`. Such a certificate proves `m+1, ..., m+y` composite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateFile", into = "CertificateFile")]
pub struct CompositeRunCertificate {
    pub m: BigUint,
    pub y: u64,
    /// `(t, p)` pairs
    pub witnesses: Vec<(u64, u64)>,
}

/// `{"m": decimal string, "y": int, "witnesses": [[t, p], ...]}`
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    m: String,
    y: u64,
    witnesses: Vec<[u64; 2]>,
}

impl TryFrom<CertificateFile> for CompositeRunCertificate {
    type Error = Error;

    fn try_from(f: CertificateFile) -> Result<Self> {
        let m =
            f.m.parse::<BigUint>()
                .map_err(|e| Error::InvalidParameter(format!("m is not a decimal integer: {e}")))?;
        Ok(Self {
            m,
            y: f.y,
            witnesses: f.witnesses.into_iter().map(|[t, p]| (t, p)).collect(),
        })
    }
}

impl From<CompositeRunCertificate> for CertificateFile {
    fn from(c: CompositeRunCertificate) -> Self {
        Self {
            m: c.m.to_str_radix(10),
            y: c.y,
            witnesses: c.witnesses.into_iter().map(|(t, p)| [t, p]).collect(),
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on i128 to stay clear of overflow
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "{a} not invertible mod {p}");
    old_s.rem_euclid(p as i128) as u64
}

/// Solves `m = -a_p (mod p)` for every class of `assignment` and returns the
/// solution in `[0, prod p)`.
pub fn crt_residue(assignment: &ResidueAssignment) -> (BigUint, BigUint) {
    let mut m = BigUint::zero();
    let mut modulus = BigUint::from(1u32);
    for (p, a) in assignment.iter() {
        let target = (p - a) % p;
        let current = (&m % p).to_u64().expect("residue below p");
        let step = (&modulus % p).to_u64().expect("residue below p");
        let k = ((target + p - current) % p) as u128 * mod_inverse(step, p) as u128 % p as u128;
        m += &modulus * (k as u64);
        modulus *= p;
    }
    (m, modulus)
}

/// Certificate from a covering assignment: the least `m` with
/// `x < m <= x + P(x)` and `m = -a_p (mod p)`, plus the smallest dividing
/// prime for every offset `t`.
///
/// Primes `<= x` without a class are given class 0 first.
pub fn crt_assemble(assignment: &ResidueAssignment, y: u64) -> Result<CompositeRunCertificate> {
    let coverage = apply_classes(y, assignment);
    if let Some(t) = coverage.first_survivor() {
        return Err(Error::NotCovering { y, first_survivor: t });
    }
    let mut full = assignment.clone();
    full.complete_with_zero();

    let (m0, modulus) = crt_residue(&full);
    let x = BigUint::from(full.x());
    let m = if m0 > x { m0 } else { m0 + modulus };

    let mut smallest = vec![0u64; y as usize + 1];
    for (p, a) in full.iter() {
        let mut t = if a == 0 { p } else { a };
        while t <= y {
            if smallest[t as usize] == 0 {
                smallest[t as usize] = p;
            }
            t += p;
        }
    }
    let witnesses = (1..=y).map(|t| (t, smallest[t as usize])).collect();
    Ok(CompositeRunCertificate { m, y, witnesses })
}

/// Independent check: every `t` in `[1, y]` appears exactly once, its prime
/// `p >= 2` divides `m + t`, and `m + t > p`.
pub fn check_certificate(cert: &CompositeRunCertificate) -> bool {
    let Ok(y) = usize::try_from(cert.y) else {
        return false;
    };
    if cert.witnesses.len() != y {
        return false;
    }
    let mut seen = vec![false; y + 1];
    let mut m_mod: HashMap<u64, u64> = HashMap::new();
    for &(t, p) in &cert.witnesses {
        if t == 0 || t > cert.y || p < 2 || seen[t as usize] {
            return false;
        }
        seen[t as usize] = true;
        let r = *m_mod
            .entry(p)
            .or_insert_with(|| (&cert.m % p).to_u64().expect("residue below p"));
        if (r as u128 + t as u128) % p as u128 != 0 {
            return false;
        }
        if &cert.m + t <= BigUint::from(p) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x3_example() {
        let a = ResidueAssignment::from_pairs(3, [(2, 1), (3, 2)]).unwrap();
        let cert = crt_assemble(&a, 3).unwrap();
        assert_eq!(cert.m, BigUint::from(7u32));
        assert_eq!(cert.witnesses, vec![(1, 2), (2, 3), (3, 2)]);
        assert!(check_certificate(&cert));
        assert_eq!(crt_assemble(&a, 3).unwrap(), cert);
    }

    #[test]
    fn x2_example() {
        let a = ResidueAssignment::from_pairs(2, [(2, 1)]).unwrap();
        let cert = crt_assemble(&a, 1).unwrap();
        assert_eq!(cert.m, BigUint::from(3u32));
        assert_eq!(cert.witnesses, vec![(1, 2)]);
        assert!(check_certificate(&cert));
    }

    #[test]
    fn rejects_non_covering() {
        let a = ResidueAssignment::from_pairs(3, [(2, 1), (3, 2)]).unwrap();
        assert_eq!(
            crt_assemble(&a, 4),
            Err(Error::NotCovering {
                y: 4,
                first_survivor: 4
            })
        );
    }

    #[test]
    fn tampered_certificates_fail() {
        let a = ResidueAssignment::from_pairs(3, [(2, 1), (3, 2)]).unwrap();
        let good = crt_assemble(&a, 3).unwrap();

        let mut bad = good.clone();
        bad.witnesses[1] = (2, 2); // 9 is odd
        assert!(!check_certificate(&bad));

        let mut bad = good.clone();
        bad.witnesses.clear();
        assert!(!check_certificate(&bad));

        let mut bad = good.clone();
        bad.witnesses[2] = (1, 2); // t = 1 twice, t = 3 missing
        assert!(!check_certificate(&bad));

        let mut bad = good.clone();
        bad.witnesses[0] = (1, 1); // 1 divides everything
        assert!(!check_certificate(&bad));

        // m + t must exceed p: 2 + 1 = 3 is prime
        let tiny = CompositeRunCertificate {
            m: BigUint::from(0u32),
            y: 1,
            witnesses: vec![(1, 1)],
        };
        assert!(!check_certificate(&tiny));
        let equal = CompositeRunCertificate {
            m: BigUint::from(1u32),
            y: 1,
            witnesses: vec![(1, 2)],
        };
        assert!(!check_certificate(&equal));
    }

    #[test]
    fn empty_run_is_vacuous() {
        let cert = CompositeRunCertificate {
            m: BigUint::from(10u32),
            y: 0,
            witnesses: vec![],
        };
        assert!(check_certificate(&cert));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let a = ResidueAssignment::from_pairs(3, [(2, 1), (3, 2)]).unwrap();
        let cert = crt_assemble(&a, 3).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        assert_eq!(json, r#"{"m":"7","y":3,"witnesses":[[1,2],[2,3],[3,2]]}"#);
        assert_eq!(serde_json::from_str::<CompositeRunCertificate>(&json).unwrap(), cert);
        assert!(serde_json::from_str::<CompositeRunCertificate>(r#"{"m":"x","y":0,"witnesses":[]}"#).is_err());
    }
}
