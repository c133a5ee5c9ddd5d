//! Exact deciders for measurability notions of functions from finitely presented
//! charge spaces into uniform spaces.

pub mod cset;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod func;
pub mod instance;
pub mod measurability;
pub mod rational;
pub mod space;
pub mod uniform;

pub use cset::CSet;
pub use error::{Error, Result};
pub use func::{Func, Interval, Tail};
pub use instance::{parse_instance, Instance};
pub use measurability::{decide, Certificate, Obstruction, PhiProfile, Property, RegularSequence, Verdict};
pub use rational::{ExtRational, Q};
pub use space::{build_space, ChargeSpace, PJSandwich, SpaceDescriptor};
pub use uniform::{build_codomain, CodomainDescriptor, Entourage, Point, UniformCodomain};
