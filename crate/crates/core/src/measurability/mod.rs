//! Deciders for the measurability notions, with certificates and obstructions.
//!
//! Every "for all entourages" quantifier is reduced to the finite base returned
//! by [`UniformCodomain::entourage_base`]; every "for all ε" is decided as an
//! exact infimum being zero.

mod base;
mod eta_zeta;
mod greco;
mod phi;
mod ray;
mod regular;
mod smooth;
mod t1;
mod t2;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cset::CSet;
use crate::error::{Error, Result};
use crate::func::Tail;
use crate::instance::Instance;
use crate::rational::{ExtRational, Q};
use crate::space::PJSandwich;
use crate::uniform::{Entourage, Point};

pub use base::{decide_base, decide_conventional, decide_ubm};
pub use eta_zeta::{build_eta_zeta, EtaZeta, PulledRay};
pub use greco::decide_greco;
pub use phi::{phi, phi_profile, PhiProfile, Progression};
pub use ray::{decide_ray, RaySide};
pub use regular::{
    build_regular_sequence, decide_regular, find_regular_delta, DepthError, Piece, RegularSequence,
    REGULAR_DEPTH,
};
pub use smooth::decide_smooth;
pub use t1::decide_t1;
pub use t2::decide_t2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    T1,
    T2,
    Smooth,
    Base,
    Ubm,
    Conventional,
    RayLeft,
    RayRight,
    Ray,
    Greco,
    Regular,
}

impl Property {
    pub const ALL: [Property; 11] = [
        Property::T1,
        Property::T2,
        Property::Smooth,
        Property::Base,
        Property::Ubm,
        Property::Conventional,
        Property::RayLeft,
        Property::RayRight,
        Property::Ray,
        Property::Greco,
        Property::Regular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::T1 => "t1",
            Property::T2 => "t2",
            Property::Smooth => "smooth",
            Property::Base => "base",
            Property::Ubm => "ubm",
            Property::Conventional => "conventional",
            Property::RayLeft => "ray-left",
            Property::RayRight => "ray-right",
            Property::Ray => "ray",
            Property::Greco => "greco",
            Property::Regular => "regular",
        }
    }

    /// Whether the notion is only defined for real-valued functions.
    pub fn needs_real(self) -> bool {
        matches!(
            self,
            Property::RayLeft | Property::RayRight | Property::Ray | Property::Greco | Property::Regular
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Property> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Unknown {
                kind: "property",
                name: s.to_string(),
            })
    }
}

/// A decided property with its evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: Property,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub obstruction: Option<Obstruction>,
}

impl Verdict {
    pub(crate) fn holds(property: Property, certificate: Certificate) -> Verdict {
        Verdict {
            property,
            holds: true,
            certificate: Some(certificate),
            obstruction: None,
        }
    }

    pub(crate) fn fails(property: Property, obstruction: Obstruction) -> Verdict {
        Verdict {
            property,
            holds: false,
            certificate: None,
            obstruction: Some(obstruction),
        }
    }
}

/// Failing entourage or threshold with the positive infimum that witnesses failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entourage: Option<Entourage>,
    /// Ray: endpoints of an open interval of bad thresholds. Greco: `[a, b]`.
    #[serde(with = "crate::rational::serde_q_vec", default, skip_serializing_if = "Vec::is_empty")]
    pub threshold: Vec<Q>,
    pub infimum: ExtRational,
    /// The set responsible, when there is a single one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<CSet>,
    pub reason: String,
}

impl Obstruction {
    pub(crate) fn at(entourage: &Entourage, infimum: ExtRational, reason: impl Into<String>) -> Obstruction {
        Obstruction {
            entourage: Some(entourage.clone()),
            threshold: vec![],
            infimum,
            witness: None,
            reason: reason.into(),
        }
    }

    pub(crate) fn set(witness: CSet, infimum: ExtRational, reason: impl Into<String>) -> Obstruction {
        Obstruction {
            entourage: None,
            threshold: vec![],
            infimum,
            witness: Some(witness),
            reason: reason.into(),
        }
    }
}

/// `A_0, A_1, .., A_n` for one entourage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionLevel {
    pub entourage: Entourage,
    pub null_part: CSet,
    pub parts: Vec<CSet>,
}

/// A simple function `Σ center_i · I_{set_i}` for one entourage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleLevel {
    pub entourage: Entourage,
    pub pieces: Vec<(CSet, Point)>,
    /// Superset of `{x : (s(x), f(x)) ∉ E}`, of outer charge zero.
    pub exceptional: CSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreimageWitness {
    /// Values of `f` whose preimage is certified.
    pub values: Vec<Point>,
    pub set: CSet,
    pub sandwich: PJSandwich,
}

/// Ray preimage for thresholds in the open interval `(lo, hi)` (unbounded ends omitted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayCut {
    #[serde(with = "crate::rational::serde_q_vec")]
    pub interval: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub sample: Q,
    pub left: bool,
    pub set: CSet,
    pub sandwich: PJSandwich,
}

/// `f^{±}^{-1}(a, ∞) ⊆ h ⊆ f^{±}^{-1}(b, ∞)` with `h` in the completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrecoPair {
    pub negative_part: bool,
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
    pub h: CSet,
    pub sandwich: PJSandwich,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Partitions {
        levels: Vec<PartitionLevel>,
    },
    SimpleFunctions {
        levels: Vec<SimpleLevel>,
    },
    Cover {
        blocks: Vec<Vec<Point>>,
        uncovered: CSet,
        uncovered_outer: ExtRational,
    },
    Preimages {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        entourage: Option<Entourage>,
        sets: Vec<PreimageWitness>,
    },
    Rays {
        cuts: Vec<RayCut>,
    },
    Sandwiches {
        pairs: Vec<GrecoPair>,
    },
    Regular {
        #[serde(with = "crate::rational::serde_q")]
        delta: Q,
        depth: u32,
        pieces: usize,
        limit: ExtRational,
    },
    /// A closed-form rule that settles the property for every threshold or entourage.
    ClosedForm {
        rule: String,
    },
}

pub(crate) fn require_real(p: Property, inst: &Instance) -> Result<()> {
    if inst.is_real() {
        Ok(())
    } else {
        Err(Error::InvalidFunction(format!("{p} needs a real-valued function")))
    }
}

/// Runs the decider for `property`.
pub fn decide(property: Property, inst: &Instance) -> Result<Verdict> {
    if property.needs_real() {
        require_real(property, inst)?;
    }
    match property {
        Property::T1 => Ok(decide_t1(inst)),
        Property::T2 => Ok(decide_t2(inst)),
        Property::Smooth => Ok(decide_smooth(inst)),
        Property::Base => Ok(decide_base(inst)),
        Property::Ubm => Ok(decide_ubm(inst)),
        Property::Conventional => decide_conventional(inst),
        Property::RayLeft => decide_ray(inst, RaySide::Left),
        Property::RayRight => decide_ray(inst, RaySide::Right),
        Property::Ray => decide_ray(inst, RaySide::Both),
        Property::Greco => decide_greco(inst),
        Property::Regular => decide_regular(inst),
    }
}

/// Charge carried by the tail beyond any finite horizon; zero on finite ground sets.
pub(crate) fn tail_mass(inst: &Instance) -> ExtRational {
    inst.space
        .as_fincof()
        .map_or(ExtRational::zero(), |s| s.tail_mass())
}

/// First index from which both the function and the weights follow their tails.
pub(crate) fn tail_index(inst: &Instance) -> u64 {
    let space_len = inst.space.as_fincof().map_or(0, |s| s.prefix().len() as u64);
    inst.func.prefix_len().max(space_len)
}

pub(crate) fn is_affine(inst: &Instance) -> bool {
    matches!(inst.func.tail(), Some(Tail::Affine { .. }))
}

/// Entourage base adapted to the instance, finest first.
pub(crate) fn base_entourages(inst: &Instance) -> Vec<Entourage> {
    inst.codomain.entourage_base(&inst.func.relevant_points())
}

/// Classes of equal-distance points among the range of a finite-range function,
/// each with its preimage.
pub(crate) fn class_preimages(inst: &Instance) -> Vec<(Vec<Point>, CSet)> {
    let range = inst.func.range().expect("finite range");
    let mut classes: Vec<Vec<Point>> = Vec::new();
    for y in range {
        match classes
            .iter_mut()
            .find(|c| inst.codomain.same_class(&c[0], &y))
        {
            Some(c) => c.push(y),
            None => classes.push(vec![y]),
        }
    }
    classes
        .into_iter()
        .map(|c| {
            let set = inst.func.preimage(|p| c.contains(p));
            (c, set)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(json, format!("\"{}\"", p.name()));
        }
        assert!("t3".parse::<Property>().is_err());
    }
}
