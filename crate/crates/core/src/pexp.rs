use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::specfun::gamma;
use crate::{Error, Result};

/// The `l_p` exponent: a finite value `p >= 1` or `p = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    /// Accepts `p >= 1`; `f64::INFINITY` maps to [`PExponent::Infinity`].
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(PExponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::domain("PExponent::new", p, "1 <= p <= inf"))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PExponent::Infinity)
    }

    /// `p` as a float (`f64::INFINITY` for the polydisc).
    pub fn value(self) -> f64 {
        match self {
            PExponent::Finite(p) => p,
            PExponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, zero at infinity.
    pub fn recip(self) -> f64 {
        match self {
            PExponent::Finite(p) => 1.0 / p,
            PExponent::Infinity => 0.0,
        }
    }

    /// `Γ(1 + 2/p)`, the normalization shared by both integral representations.
    pub fn gamma_factor(self) -> f64 {
        match self {
            PExponent::Finite(p) => gamma(1.0 + 2.0 / p),
            PExponent::Infinity => 1.0,
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" => Ok(PExponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("cannot parse p from {t:?}")))?;
                if !p.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "spell infinity as `inf`, got {t:?}"
                    )));
                }
                PExponent::new(p)
            }
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => s.serialize_f64(*p),
            PExponent::Infinity => s.serialize_str("inf"),
        }
    }
}
