//! Affine-linear form systems, their local factors `beta_p`, and the size
//! norms `||Psi||_{N,B}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `p^d` that [`local_factor`] enumerates.
pub const MAX_ENUMERATION: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineForm {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl AffineForm {
    pub fn new(coeffs: Vec<i64>, constant: i64) -> Self {
        Self { coeffs, constant }
    }

    fn eval_mod(&self, n: &[u64], p: u64) -> u64 {
        let p = p as i128;
        let mut acc = (self.constant as i128).rem_euclid(p);
        for (&c, &v) in self.coeffs.iter().zip(n) {
            acc = (acc + (c as i128).rem_euclid(p) * v as i128) % p;
        }
        acc as u64
    }
}

/// `t` affine-linear forms in `d` integer variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineLinearSystem {
    d: usize,
    forms: Vec<AffineForm>,
}

impl AffineLinearSystem {
    pub fn new(d: usize, forms: Vec<AffineForm>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if let Some(f) = forms.iter().find(|f| f.coeffs.len() != d) {
            return Err(Error::InvalidParameter(format!(
                "form has {} coefficients, expected {d}",
                f.coeffs.len()
            )));
        }
        Ok(Self { d, forms })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[AffineForm] {
        &self.forms
    }

    /// No homogeneous part is a rational multiple of another. A zero
    /// homogeneous part counts as a multiple of anything.
    pub fn finite_complexity(&self) -> bool {
        let parallel = |u: &[i64], v: &[i64]| {
            (0..u.len()).all(|j| (j + 1..u.len()).all(|k| u[j] as i128 * v[k] as i128 == u[k] as i128 * v[j] as i128))
        };
        self.forms
            .iter()
            .enumerate()
            .all(|(i, f)| self.forms[i + 1..].iter().all(|g| !parallel(&f.coeffs, &g.coeffs)))
    }
}

/// The form systems used to count prime progressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `(n1, (n_l + j r! n1 + mx)_{0<=j<r, l=2,3})`, d = 3, t = 2r + 1
    ProgressionPairD3,
    /// `(n1, (n2 + j r! n1 + mx)_{0<=j<r})`, d = 2, t = r + 1
    ProgressionD2,
    /// `(n1 + mx, n2, n3, (n1 + j r! n_l + mx)_{-i<=j<r-i, j!=0, l=2,3})`, d = 3, t = 2r + 1
    ShiftedD3,
    /// `(n2, (n1 + j r! n2 + mx)_{-i<=j<r-i})`, d = 2, t = r + 1
    ShiftedD2,
}

impl SystemKind {
    pub const ALL: [SystemKind; 4] = [
        SystemKind::ProgressionPairD3,
        SystemKind::ProgressionD2,
        SystemKind::ShiftedD3,
        SystemKind::ShiftedD2,
    ];

    /// True for the three-variable (pair) systems.
    pub fn is_pair(self) -> bool {
        matches!(self, SystemKind::ProgressionPairD3 | SystemKind::ShiftedD3)
    }

    pub fn is_shifted(self) -> bool {
        matches!(self, SystemKind::ShiftedD3 | SystemKind::ShiftedD2)
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "progression_pair_d3" => Ok(Self::ProgressionPairD3),
            "progression_d2" => Ok(Self::ProgressionD2),
            "shifted_d3" => Ok(Self::ShiftedD3),
            "shifted_d2" => Ok(Self::ShiftedD2),
            other => Err(Error::InvalidParameter(format!("unknown system kind {other:?}"))),
        }
    }
}

pub(crate) fn factorial(r: u32) -> Result<i64> {
    (1..=r as i64)
        .try_fold(1i64, |acc, k| acc.checked_mul(k))
        .ok_or_else(|| Error::InvalidParameter(format!("{r}! overflows 64 bits")))
}

/// Builds one of the [`SystemKind`] systems. `i` (the shift, `0 <= i < r`)
/// only matters for the shifted kinds.
pub fn make_form_system(kind: SystemKind, r: u32, m: i64, x: i64, i: u32) -> Result<AffineLinearSystem> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if i >= r {
        return Err(Error::InvalidParameter(format!("shift i = {i} must be below r = {r}")));
    }
    let rf = factorial(r)?;
    let mx = m
        .checked_mul(x)
        .ok_or_else(|| Error::InvalidParameter("m * x overflows".into()))?;
    let r = r as i64;
    let i = i as i64;
    let form = |coeffs: Vec<i64>, constant: i64| AffineForm::new(coeffs, constant);
    let (d, forms) = match kind {
        SystemKind::ProgressionPairD3 => {
            let mut forms = vec![form(vec![1, 0, 0], 0)];
            for l in 1..=2 {
                for j in 0..r {
                    let mut c = vec![j * rf, 0, 0];
                    c[l] = 1;
                    forms.push(form(c, mx));
                }
            }
            (3, forms)
        }
        SystemKind::ProgressionD2 => {
            let mut forms = vec![form(vec![1, 0], 0)];
            forms.extend((0..r).map(|j| form(vec![j * rf, 1], mx)));
            (2, forms)
        }
        SystemKind::ShiftedD3 => {
            let mut forms = vec![form(vec![1, 0, 0], mx), form(vec![0, 1, 0], 0), form(vec![0, 0, 1], 0)];
            for l in 1..=2 {
                for j in (-i..r - i).filter(|&j| j != 0) {
                    let mut c = vec![1, 0, 0];
                    c[l] = j * rf;
                    forms.push(form(c, mx));
                }
            }
            (3, forms)
        }
        SystemKind::ShiftedD2 => {
            let mut forms = vec![form(vec![0, 1], 0)];
            forms.extend((-i..r - i).map(|j| form(vec![1, j * rf], mx)));
            (2, forms)
        }
    };
    AffineLinearSystem::new(d, forms)
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `p/(p-1)` when `p` does not divide `b`, else 0.
pub fn local_von_mangoldt(p: u64, b: i64) -> BigRational {
    if b.rem_euclid(p as i64) == 0 {
        BigRational::zero()
    } else {
        ratio(p, p - 1)
    }
}

/// `E_{n in (Z/pZ)^d} prod_i Lambda_p(psi_i(n))` by full enumeration.
pub fn local_factor(system: &AffineLinearSystem, p: u64) -> Result<BigRational> {
    let size = (p as u128).checked_pow(system.d as u32).unwrap_or(u128::MAX);
    if size > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge(size));
    }
    let d = system.d;
    let rest = (size / p as u128) as u64;
    // column j: coefficients of n_j in every form, reduced mod p
    let columns: Vec<Vec<u64>> = (0..d)
        .map(|j| {
            system
                .forms
                .iter()
                .map(|f| f.coeffs[j].rem_euclid(p as i64) as u64)
                .collect()
        })
        .collect();
    // number of points where every form is a unit mod p; the odometer over
    // n_1.. n_{d-1} adds column j to the form values whenever digit j moves
    let good: u64 = (0..p)
        .into_par_iter()
        .map(|first| {
            let mut n = vec![0u64; d];
            n[0] = first;
            let mut values: Vec<u64> = system.forms.iter().map(|f| f.eval_mod(&n, p)).collect();
            let mut count = 0u64;
            for _ in 0..rest {
                if values.iter().all(|&v| v != 0) {
                    count += 1;
                }
                for j in 1..d {
                    for (v, &c) in values.iter_mut().zip(&columns[j]) {
                        *v += c;
                        if *v >= p {
                            *v -= p;
                        }
                    }
                    n[j] += 1;
                    if n[j] < p {
                        break;
                    }
                    n[j] = 0;
                }
            }
            count
        })
        .sum();
    let t = system.t() as u32;
    let num = BigInt::from(good) * BigInt::from(p).pow(t);
    let den = BigInt::from(p - 1).pow(t) * BigInt::from(p).pow(d as u32);
    Ok(BigRational::new(num, den))
}

/// `(p - r) p^(r-1) / (p - 1)^r` for `p > r`, `(p/(p-1))^(r-1)` otherwise.
pub fn progression_local_density(r: u32, p: u64) -> BigRational {
    if p <= r as u64 {
        ratio(p, p - 1).pow(r as i32 - 1)
    } else {
        BigRational::new(
            BigInt::from(p - r as u64) * BigInt::from(p).pow(r - 1),
            BigInt::from(p - 1).pow(r),
        )
    }
}

/// Closed-form `beta_p` for the systems of [`SystemKind`]: the
/// progression density for the two-variable kinds, its square for the
/// three-variable kinds.
pub fn closed_form_beta(kind: SystemKind, r: u32, p: u64) -> BigRational {
    let single = progression_local_density(r, p);
    if kind.is_pair() {
        &single * &single
    } else {
        single
    }
}

/// `sum_i sum_j |psi_i(e_j)| + sum_i |psi_i(0)| / (N log^B N)`.
pub fn psi_norm(system: &AffineLinearSystem, n: u64, b: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("N = {n} must be at least 3")));
    }
    let n = n as f64;
    let scale = n * n.ln().powf(b);
    let linear: f64 = system
        .forms
        .iter()
        .flat_map(|f| f.coeffs.iter())
        .map(|c| c.unsigned_abs() as f64)
        .sum();
    let constant: f64 = system
        .forms
        .iter()
        .map(|f| f.constant.unsigned_abs() as f64 / scale)
        .sum();
    Ok(linear + constant)
}

/// Exact product of the enumerated `beta_p` over the primes in `primes`.
pub fn local_factor_product(system: &AffineLinearSystem, primes: &[u64]) -> Result<BigRational> {
    primes
        .iter()
        .try_fold(BigRational::one(), |acc, &p| Ok(acc * local_factor(system, p)?))
}
