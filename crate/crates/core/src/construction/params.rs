use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistics::factorial;

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_BAND: f64 = 1.0;

/// Requested parameters; `None` selects the default formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionInput {
    pub r: u32,
    pub x: u64,
    pub y: Option<u64>,
    pub z: Option<u64>,
    pub epsilon: Option<f64>,
    pub seed: u64,
}

impl ConstructionInput {
    pub fn new(r: u32, x: u64, seed: u64) -> Self {
        Self {
            r,
            x,
            y: None,
            z: None,
            epsilon: None,
            seed,
        }
    }

    pub fn with_y(mut self, y: u64) -> Self {
        self.y = Some(y);
        self
    }

    pub fn with_z(mut self, z: u64) -> Self {
        self.z = Some(z);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn resolve(&self) -> Result<ConstructionParams> {
        ConstructionParams::resolve(self)
    }
}

/// Validated parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub r: u32,
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// Natural `log`, `log_2 = log log` and `log_3 = log log log` of `x`; `None`
/// where undefined.
pub fn iterated_logs(x: u64) -> (f64, Option<f64>, Option<f64>) {
    let l1 = (x as f64).ln();
    let l2 = (l1 > 0.0).then(|| l1.ln());
    let l3 = l2.filter(|&v| v > 0.0).map(f64::ln);
    (l1, l2, l3)
}

/// `floor(r / (6 log r) * x log x log_3 x / (log_2 x)^2)`, when positive.
pub fn default_y(r: u32, x: u64) -> Option<u64> {
    let (l1, l2, l3) = iterated_logs(x);
    let (l2, l3) = (l2?, l3?);
    let rf = r as f64;
    let y = rf / (6.0 * rf.ln()) * x as f64 * l1 * l3 / (l2 * l2);
    (y.is_finite() && y >= 1.0).then_some(y.floor() as u64)
}

/// `floor(x^(log_3 x / (3 log_2 x)))`, or `None` where `log_3 x` is undefined.
pub fn default_z(x: u64) -> Option<u64> {
    let (l1, l2, l3) = iterated_logs(x);
    let (l2, l3) = (l2?, l3?);
    Some((l1 * l3 / (3.0 * l2)).exp().floor() as u64)
}

impl ConstructionParams {
    pub fn resolve(input: &ConstructionInput) -> Result<Self> {
        let ConstructionInput { r, x, seed, .. } = *input;
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if r < 2 {
            return invalid(format!("r must be at least 2, got {r}"));
        }
        let rr = factorial(r)?;
        if (rr as u64)
            .checked_mul(r as u64)
            .and_then(|v| v.checked_mul(x))
            .is_none()
        {
            return invalid(format!("r * r! * x overflows for r = {r}, x = {x}"));
        }
        if x < 2 {
            return invalid(format!("x must be at least 2, got {x}"));
        }
        let mut warnings = Vec::new();
        let z = match input.z {
            Some(z) => z,
            None => match default_z(x) {
                Some(z) if z >= 2 => z,
                computed => {
                    warnings.push(format!(
                        "default z = {} is below 2; using z = 2",
                        computed.map_or("undefined".to_string(), |z| z.to_string())
                    ));
                    2
                }
            },
        };
        if z < 2 || 4 * z >= x {
            return invalid(format!("z must satisfy 2 <= z < x/4, got z = {z}, x = {x}"));
        }
        let y = match input.y.or_else(|| default_y(r, x)) {
            Some(y) => y,
            None => return invalid(format!("default y is undefined for x = {x}; pass y explicitly")),
        };
        if 4 * y <= x {
            return invalid(format!("y must exceed x/4, got y = {y}, x = {x}"));
        }
        if y > u32::MAX as u64 {
            return invalid(format!("y = {y} exceeds the supported maximum {}", u32::MAX));
        }
        let epsilon = input.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return invalid(format!("epsilon must lie in (0, 1), got {epsilon}"));
        }
        Ok(Self {
            r,
            x,
            y,
            z,
            epsilon,
            seed,
            warnings,
        })
    }

    pub fn r_factorial(&self) -> u64 {
        factorial(self.r).expect("checked in resolve") as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_at_desk_scale() {
        let p = ConstructionInput::new(2, 100_000, 0).resolve().unwrap();
        // x^(log_3 x / (3 log_2 x)) = 4.07 at x = 10^5
        assert_eq!(p.z, 4);
        assert!(p.warnings.is_empty());
        let expect = 2.0 / (6.0 * 2f64.ln()) * 1e5 * 1e5f64.ln() * 1e5f64.ln().ln().ln() / 1e5f64.ln().ln().powi(2);
        assert_eq!(p.y, expect.floor() as u64);
        // x = 100: z formula gives about 1.5
        let z = (100f64.ln() * 100f64.ln().ln().ln() / (3.0 * 100f64.ln().ln())).exp();
        assert!(z > 1.0 && z < 2.0);
        let p = ConstructionInput::new(2, 100, 0).resolve().unwrap();
        assert_eq!(p.z, 2);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn overrides_are_validated() {
        let ok = ConstructionInput::new(2, 30, 7).with_y(20).with_z(4).resolve().unwrap();
        assert_eq!((ok.x, ok.y, ok.z, ok.epsilon), (30, 20, 4, DEFAULT_EPSILON));
        assert!(ok.warnings.is_empty());
        assert!(ConstructionInput::new(2, 30, 0).with_y(20).with_z(8).resolve().is_err());
        assert!(ConstructionInput::new(2, 30, 0).with_y(7).with_z(4).resolve().is_err());
        assert!(ConstructionInput::new(2, 30, 0).with_y(20).with_z(1).resolve().is_err());
        assert!(ConstructionInput::new(1, 30, 0).with_y(20).with_z(4).resolve().is_err());
        assert!(ConstructionInput::new(2, 30, 0)
            .with_y(20)
            .with_z(4)
            .with_epsilon(1.0)
            .resolve()
            .is_err());
        // log_3 x undefined and no y given
        assert!(ConstructionInput::new(2, 12, 0).with_z(2).resolve().is_err());
    }
}
