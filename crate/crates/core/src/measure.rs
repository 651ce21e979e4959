//! A numeric result that may be undefined for a stated reason.

use serde::{Serialize, Serializer};
use std::fmt;

/// A metric value, or the reason it could not be computed.
///
/// Undefined metrics (a single-period volatility, a Sharpe ratio with zero
/// volatility) are reported as `Absent` instead of NaN or infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Value(f64),
    Absent(String),
}

impl Measure {
    pub fn absent(reason: impl Into<String>) -> Self {
        Measure::Absent(reason.into())
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Measure::Value(v) => Some(*v),
            Measure::Absent(_) => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Measure::Absent(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Measure::Value(_) => None,
            Measure::Absent(r) => Some(r),
        }
    }

    /// Apply `f` to a present value; absent values pass through.
    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Self {
        match self {
            Measure::Value(v) => Measure::Value(f(v)),
            a => a,
        }
    }

    /// Value if finite, otherwise absent with `reason`.
    pub fn finite_or(v: f64, reason: &str) -> Self {
        if v.is_finite() {
            Measure::Value(v)
        } else {
            Measure::absent(reason)
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Value(v) => write!(f, "{v}"),
            Measure::Absent(r) => write!(f, "NA ({r})"),
        }
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Measure::Value(v) => s.serialize_f64(*v),
            Measure::Absent(r) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("value", &Option::<f64>::None)?;
                m.serialize_entry("absent", r)?;
                m.end()
            }
        }
    }
}

impl From<f64> for Measure {
    fn from(v: f64) -> Self {
        Measure::Value(v)
    }
}
