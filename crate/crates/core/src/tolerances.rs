//! Default tolerances shared by the verification suite and the CLI.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Algebraic identities (Yang-Baxter, reflection, base case).
pub const ALGEBRAIC: f64 = 1e-12;
/// Equality between two independent evaluations of the same quantity.
pub const ORACLE: f64 = 1e-9;
/// Predicted values at the root-of-unity point versus the brute-force sum.
pub const BRIDGE: f64 = 1e-8;
/// Interpolation, asymptotic limits and quadrature.
pub const LIMIT: f64 = 1e-6;
/// Homogeneous limit of the determinant formula.
pub const HOMOGENEOUS: f64 = 1e-5;
/// Minimum mismatch required of a deliberately under-fitted interpolant.
pub const NEGATIVE_CONTROL: f64 = 1e-3;
/// Minimum decay rate `ln(d(5) / d(10)) / 5` of the limit-step difference,
/// which behaves like `e^{-2 Re mu}`.
pub const LIMIT_RATE: f64 = 1.8;
/// Real part of `mu` at which the limit step is compared.
pub const LIMIT_R: f64 = 20.0;
/// Starting point of the doubling used to measure the decay rate.
pub const LIMIT_RATE_R: f64 = 5.0;
/// A denominator below this modulus is treated as a pole.
pub const POLE: f64 = 1e-14;
/// Genericity margin used by the random parameter sampler.
pub const GENERIC_EPS: f64 = 0.05;
/// Condition estimate above which a determinant evaluation logs a warning.
pub const CONDITION_WARN: f64 = 1e12;

/// Per-check tolerance table with overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let table = [
            ("ybe", ALGEBRAIC),
            ("reflection", ALGEBRAIC),
            ("base", ALGEBRAIC),
            ("symmetry", ORACLE),
            ("recursion", ORACLE),
            ("det-brute", ORACLE),
            ("appendix-det", ORACLE),
            ("polynomiality", LIMIT),
            ("limit", LIMIT),
            ("orthogonality", LIMIT),
            ("specialization", BRIDGE),
            ("homogeneous", HOMOGENEOUS),
            ("count-enum", 0.0),
            ("hypersum", 0.0),
            ("integrality", 0.0),
            ("bijection", 0.0),
        ];
        Self(table.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(ORACLE)
    }

    /// Applies a `NAME=VALUE` override. Values must be positive and the name
    /// must be a known check.
    pub fn apply(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec.split_once('=').ok_or_else(|| {
            Error::Domain(format!("tolerance override {spec:?} is not NAME=VALUE"))
        })?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("tolerance value {value:?} is not a number")))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance for {name} must be positive"
            )));
        }
        let name = name.trim();
        if !self.0.contains_key(name) {
            return Err(Error::Domain(format!(
                "unknown check {name:?} in tolerance override"
            )));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        assert_eq!(t.get("ybe"), 1e-12);
        t.apply("ybe=1e-10").unwrap();
        assert_eq!(t.get("ybe"), 1e-10);
        assert!(t.apply("ybe=-1").is_err());
        assert!(t.apply("ybe=0").is_err());
        assert!(t.apply("nonsense=1").is_err());
        assert!(t.apply("ybe").is_err());
    }
}
