//! The order parameter `p` shared by every metric family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of the p-norm used to combine the two asymmetric differences.
///
/// Must be at least 1. `Infinity` is a distinguished value so that the
/// max-norm special case (bag distance on sets) is computed exactly rather
/// than approximated by a large finite order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PParam {
    Finite(f64),
    Infinity,
}

impl PParam {
    pub const ONE: PParam = PParam::Finite(1.0);
    pub const TWO: PParam = PParam::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Parameter(format!("p must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            Ok(PParam::Infinity)
        } else {
            Ok(PParam::Finite(p))
        }
    }

    /// Re-checks the `p >= 1` invariant for values built directly from the
    /// enum variant.
    pub fn validate(self) -> Result<Self> {
        match self {
            PParam::Finite(p) => PParam::new(p),
            PParam::Infinity => Ok(self),
        }
    }

    /// `(x^p + y^p)^(1/p)` for non-negative `x`, `y`; `max(x, y)` at infinity.
    pub fn combine(self, x: f64, y: f64) -> f64 {
        match self {
            PParam::Infinity => x.max(y),
            PParam::Finite(1.0) => x + y,
            PParam::Finite(2.0) => x.hypot(y),
            PParam::Finite(p) => {
                let m = x.max(y);
                if m == 0.0 || m.is_infinite() {
                    return m;
                }
                // scale by the larger term so large p cannot overflow
                m * ((x / m).powf(p) + (y / m).powf(p)).powf(1.0 / p)
            }
        }
    }
}

impl Default for PParam {
    fn default() -> Self {
        PParam::ONE
    }
}

impl fmt::Display for PParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PParam::Finite(p) => write!(f, "{p}"),
            PParam::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(PParam::Infinity),
            _ => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::Parameter(format!("cannot parse p from {s:?}")))?;
                PParam::new(p)
            }
        }
    }
}
