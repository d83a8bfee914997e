use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly convex effort cost with `c(0) = c'(0) = 0`.
///
/// Serialized as a string: `quadratic[:a]` or `power:q[:a]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CostFunction {
    /// `c(e) = a e² / 2`
    Quadratic { a: f64 },
    /// `c(e) = a e^q`, `q > 1`
    Power { q: f64, a: f64 },
}

impl Default for CostFunction {
    fn default() -> Self {
        CostFunction::Quadratic { a: 1.0 }
    }
}

impl CostFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CostFunction::Quadratic { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidArgument(format!("cost scale must be positive, got {a}")));
                }
            }
            CostFunction::Power { q, a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidArgument(format!("cost scale must be positive, got {a}")));
                }
                if !(q > 1.0 && q.is_finite()) {
                    return Err(Error::InvalidArgument(format!("cost exponent must exceed 1, got {q}")));
                }
            }
        }
        Ok(())
    }

    pub fn c(&self, e: f64) -> f64 {
        match *self {
            CostFunction::Quadratic { a } => 0.5 * a * e * e,
            CostFunction::Power { q, a } => a * e.max(0.0).powf(q),
        }
    }

    pub fn c1(&self, e: f64) -> f64 {
        match *self {
            CostFunction::Quadratic { a } => a * e,
            CostFunction::Power { q, a } => a * q * e.max(0.0).powf(q - 1.0),
        }
    }

    pub fn c2(&self, e: f64) -> f64 {
        match *self {
            CostFunction::Quadratic { a } => a,
            CostFunction::Power { q, a } => a * q * (q - 1.0) * e.max(0.0).powf(q - 2.0),
        }
    }

    /// Effort solving `c'(e) = 1`.
    pub fn first_best(&self) -> f64 {
        match *self {
            CostFunction::Quadratic { a } => 1.0 / a,
            CostFunction::Power { q, a } => (1.0 / (a * q)).powf(1.0 / (q - 1.0)),
        }
    }
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CostFunction::Quadratic { a } => write!(f, "quadratic:{a}"),
            CostFunction::Power { q, a } => write!(f, "power:{q}:{a}"),
        }
    }
}

impl FromStr for CostFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number {t:?} in cost spec {s:?}")))
        };
        let cost = match parts.as_slice() {
            ["quadratic"] => CostFunction::Quadratic { a: 1.0 },
            ["quadratic", a] => CostFunction::Quadratic { a: num(a)? },
            ["power", q] => CostFunction::Power { q: num(q)?, a: 1.0 },
            ["power", q, a] => CostFunction::Power { q: num(q)?, a: num(a)? },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "cost spec {s:?} is not quadratic[:a] or power:q[:a]"
                )))
            }
        };
        cost.validate()?;
        Ok(cost)
    }
}

impl TryFrom<String> for CostFunction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CostFunction> for String {
    fn from(c: CostFunction) -> String {
        c.to_string()
    }
}
