//! Built-in named instances `FIX1`..`FIX7`.

use crate::func::{Func, Tail};
use crate::rational::{q, ExtRational};
use crate::space::{build_space, ChargeSpace, SpaceDescriptor};
use crate::uniform::{build_codomain, CodomainDescriptor, Point, UniformCodomain};

/// Names of the fixtures that are complete instances.
pub const INSTANCE_FIXTURES: [&str; 6] = ["FIX1", "FIX2", "FIX3", "FIX4", "FIX5", "FIX6"];

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn reals(xs: &[i64]) -> Vec<Point> {
    xs.iter().map(|&x| Point::Real(q(x))).collect()
}

pub fn space_descriptor(n: usize) -> Option<SpaceDescriptor> {
    Some(match n {
        1 => SpaceDescriptor::Finite {
            points: names(&["0"]),
            generators: vec![],
            weights: vec![q(1)],
        },
        2 => SpaceDescriptor::Finite {
            points: names(&["a", "b", "c"]),
            generators: vec![vec![0]],
            weights: vec![q(1), q(1), q(1)],
        },
        3 => SpaceDescriptor::Finite {
            points: names(&["a", "b"]),
            generators: vec![],
            weights: vec![q(0), q(0)],
        },
        4 | 5 => SpaceDescriptor::FinCofNat {
            prefix: vec![],
            w_inf: q(1),
            m_inf: ExtRational::INF,
        },
        6 => SpaceDescriptor::FinCofNat {
            prefix: vec![q(1)],
            w_inf: q(0),
            m_inf: ExtRational::from_int(1),
        },
        _ => return None,
    })
}

pub fn codomain_descriptor(n: usize) -> Option<CodomainDescriptor> {
    match n {
        1..=6 => Some(CodomainDescriptor::RationalLine),
        7 => Some(CodomainDescriptor::FiniteMetric {
            points: names(&["p", "q", "r"]),
            distances: [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
                .iter()
                .map(|row| row.iter().map(|&d| q(d)).collect())
                .collect(),
        }),
        _ => None,
    }
}

pub fn function(n: usize) -> Option<Func> {
    let seq = |prefix: &[i64], tail| Func::sequence(reals(prefix), tail).expect("valid fixture");
    Some(match n {
        1 => Func::Table(reals(&[0])),
        2 => Func::Table(reals(&[0, 1, 2])),
        3 => Func::Table(reals(&[0, 1])),
        4 => seq(&[], Tail::Affine { a: q(1), b: q(0) }),
        5 => seq(&[], Tail::Periodic(reals(&[0, 1]))),
        6 => seq(&[5], Tail::Constant(Point::Real(q(0)))),
        _ => return None,
    })
}

/// Index of a fixture name such as `FIX3` (case-insensitive).
pub fn parse_name(s: &str) -> Option<usize> {
    let t = s.trim();
    let digits = t.strip_prefix("FIX").or_else(|| t.strip_prefix("fix"))?;
    let n: usize = digits.parse().ok()?;
    (1..=7).contains(&n).then_some(n)
}

/// Space of `FIXn`; panics for `n` outside `1..=6`.
pub fn space(n: usize) -> ChargeSpace {
    build_space(&space_descriptor(n).expect("space fixture")).expect("valid fixture")
}

/// The three-point metric `p, q, r` with `d(p,q) = d(q,r) = 1`, `d(p,r) = 2`.
pub fn fix7() -> UniformCodomain {
    build_codomain(&codomain_descriptor(7).unwrap()).expect("valid fixture")
}
