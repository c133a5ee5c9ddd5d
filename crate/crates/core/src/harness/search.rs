//! Searches for instances separating notions whose converse implications fail.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate_instances, InstanceParams};
use super::oracle::{Oracle, OracleOptions};
use super::replay::replay;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::measurability::{decide, Property};
use crate::rational::ExtRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Claim {
    C1,
    C2,
    C3,
}

impl Claim {
    pub const ALL: [Claim; 3] = [Claim::C1, Claim::C2, Claim::C3];

    pub fn describe(self) -> &'static str {
        match self {
            Claim::C1 => "T2-measurable but not conventionally measurable on an incomplete space",
            Claim::C2 => "ray and base measurable but neither smooth nor T2-measurable",
            Claim::C3 => "not base measurable, with a preimage at infinite distance from the field",
        }
    }

    /// Properties read by the claim, with the value each must take.
    fn pattern(self) -> &'static [(Property, bool)] {
        match self {
            Claim::C1 => &[(Property::T2, true), (Property::Conventional, false)],
            Claim::C2 => &[
                (Property::Ray, true),
                (Property::Base, true),
                (Property::Smooth, false),
                (Property::T2, false),
            ],
            Claim::C3 => &[(Property::Base, false)],
        }
    }

    /// The pinned first witness in the default enumeration.
    pub fn expected(self) -> &'static str {
        match self {
            Claim::C1 => "FIX3",
            Claim::C2 => "FIX4",
            Claim::C3 => "FIX5",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Claim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Claim> {
        Claim::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Unknown {
                kind: "claim",
                name: s.to_string(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimVerdict {
    pub property: Property,
    pub decider: bool,
    pub oracle: bool,
    pub replayed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub claim: Claim,
    /// Position in the enumeration.
    pub index: usize,
    /// Fixture name when the witness is a built-in instance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixture: Option<String>,
    pub instance: String,
    pub verdicts: Vec<ClaimVerdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub complete: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub infimum: Option<ExtRational>,
}

impl Witness {
    /// Whether decider, oracle and replay all confirm the claim.
    pub fn confirmed(&self) -> bool {
        self.verdicts.iter().all(|v| v.decider == v.oracle && v.replayed)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim      {} ({})", self.claim, self.claim.describe())?;
        writeln!(
            f,
            "witness    #{} {}",
            self.index,
            self.fixture.as_deref().unwrap_or("(enumerated)")
        )?;
        for v in &self.verdicts {
            writeln!(
                f,
                "  {:<12} decider {:<5} oracle {:<5} replay {}",
                v.property.name(),
                v.decider,
                v.oracle,
                if v.replayed { "ok" } else { "FAILED" }
            )?;
        }
        if let Some(c) = self.complete {
            writeln!(f, "  complete     {c}")?;
        }
        if let Some(i) = &self.infimum {
            writeln!(f, "  gap          {i}")?;
        }
        write!(f, "{}", self.instance)
    }
}

fn fixture_name(inst: &Instance) -> Option<String> {
    (1..=6)
        .find(|&n| Instance::fixture(n).is_some_and(|f| f == *inst))
        .map(|n| format!("FIX{n}"))
}

/// Whether `inst` satisfies the claim's pattern by the deciders alone.
fn matches(claim: Claim, inst: &Instance) -> bool {
    let ok = claim
        .pattern()
        .iter()
        .all(|(p, want)| decide(*p, inst).is_ok_and(|v| v.holds == *want));
    ok && match claim {
        Claim::C1 => inst.space.completeness_check() == Ok(false),
        Claim::C3 => decide(Property::Base, inst)
            .ok()
            .and_then(|v| v.obstruction)
            .is_some_and(|o| o.infimum.is_infinite()),
        Claim::C2 => true,
    }
}

fn confirm(claim: Claim, index: usize, inst: &Instance, opts: OracleOptions) -> Result<Witness> {
    let oracle = Oracle::new(inst, opts)?;
    let mut verdicts = Vec::new();
    let mut infimum = None;
    for (p, _) in claim.pattern() {
        let d = decide(*p, inst)?;
        let o = oracle.decide(*p)?;
        if claim == Claim::C3 {
            infimum = d.obstruction.as_ref().map(|ob| ob.infimum);
        }
        verdicts.push(ClaimVerdict {
            property: *p,
            decider: d.holds,
            oracle: o.holds,
            replayed: replay(&oracle, &d).is_ok(),
        });
    }
    Ok(Witness {
        claim,
        index,
        fixture: fixture_name(inst),
        instance: inst.to_text(),
        verdicts,
        complete: inst.space.completeness_check().ok(),
        infimum,
    })
}

/// The first of `instances` satisfying the claim, confirmed by the oracle and by
/// replaying the deciders' evidence.
pub fn search_on(claim: Claim, instances: &[Instance], opts: OracleOptions) -> Result<Option<Witness>> {
    match instances.iter().position(|i| matches(claim, i)) {
        Some(k) => confirm(claim, k, &instances[k], opts).map(Some),
        None => Ok(None),
    }
}

/// [`search_on`] over the enumeration; `None` when the bounds are exhausted.
pub fn search_counterexample(claim: Claim, params: &InstanceParams, opts: OracleOptions) -> Result<Option<Witness>> {
    search_on(claim, &enumerate_instances(params)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_witnesses() {
        for c in Claim::ALL {
            let w = search_counterexample(c, &InstanceParams::default(), OracleOptions::default())
                .unwrap()
                .unwrap();
            assert_eq!(w.fixture.as_deref(), Some(c.expected()), "{c}");
            assert!(w.confirmed(), "{c}");
        }
    }

    #[test]
    fn exhausted_search_reports_none() {
        let p = InstanceParams::line_only(1, vec![crate::rational::q(1)], vec![crate::rational::q(0)]);
        assert_eq!(search_counterexample(Claim::C2, &p, OracleOptions::default()).unwrap(), None);
    }
}
