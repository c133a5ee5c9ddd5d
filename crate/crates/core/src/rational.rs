//! Exact rationals and the extended half-line `[0, ∞]` used for charge values.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Renders `p/q`, or `p` for integers.
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        s.parse::<i64>().ok().map(Q::from_integer)
    }
}

/// A rational number or `+∞`.
///
/// The derived ordering puts every finite value below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(Q),
    Infinite,
}

impl ExtRational {
    pub const INF: ExtRational = ExtRational::Infinite;

    pub fn zero() -> Self {
        ExtRational::Finite(Q::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtRational::Finite(q(n))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(v) if v.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        match self {
            ExtRational::Finite(v) => v.is_positive(),
            ExtRational::Infinite => true,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    pub fn finite(&self) -> Option<Q> {
        match self {
            ExtRational::Finite(v) => Some(*v),
            ExtRational::Infinite => None,
        }
    }

    /// `self - rhs`; `∞ - finite = ∞`, `finite - ∞` and `∞ - ∞` are errors.
    pub fn checked_sub(self, rhs: ExtRational) -> Result<ExtRational> {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => Ok(ExtRational::Finite(a - b)),
            (ExtRational::Infinite, ExtRational::Finite(_)) => Ok(ExtRational::Infinite),
            (ExtRational::Infinite, ExtRational::Infinite) => Err(Error::InfMinusInf),
            (ExtRational::Finite(_), ExtRational::Infinite) => Err(Error::InfMinusInf),
        }
    }

    pub fn sum<I: IntoIterator<Item = ExtRational>>(it: I) -> ExtRational {
        it.into_iter().fold(ExtRational::zero(), |a, b| a + b)
    }
}

impl Default for ExtRational {
    fn default() -> Self {
        ExtRational::zero()
    }
}

impl From<Q> for ExtRational {
    fn from(v: Q) -> Self {
        ExtRational::Finite(v)
    }
}

impl Add for ExtRational {
    type Output = ExtRational;
    fn add(self, rhs: ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinite,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(v) => f.write_str(&fmt_q(v)),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(ExtRational::Infinite);
        }
        parse_q(t)
            .map(ExtRational::Finite)
            .ok_or_else(|| format!("not a rational or 'inf': '{t}'"))
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Q` as a `"p/q"` string.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational '{s}'")))
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational '{s}'"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_rules() {
        let one = ExtRational::from_int(1);
        assert_eq!(one + ExtRational::INF, ExtRational::INF);
        assert_eq!(ExtRational::INF.checked_sub(one), Ok(ExtRational::INF));
        assert_eq!(
            ExtRational::INF.checked_sub(ExtRational::INF),
            Err(Error::InfMinusInf)
        );
        assert!(one < ExtRational::INF);
        assert_eq!(one.min(ExtRational::INF), one);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6"), Some(qf(1, 2)));
        assert_eq!(parse_q("-4"), Some(q(-4)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!("inf".parse::<ExtRational>(), Ok(ExtRational::INF));
        assert_eq!(fmt_q(&qf(6, 4)), "3/2");
        assert_eq!(ExtRational::from_int(2).to_string(), "2");
    }
}
