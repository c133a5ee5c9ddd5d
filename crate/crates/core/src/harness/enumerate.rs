//! Deterministic enumeration of small instances.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{Func, Tail};
use crate::instance::Instance;
use crate::rational::{q, ExtRational, Q};
use crate::space::SpaceDescriptor;
use crate::uniform::{CodomainDescriptor, Point};

/// Bounds of an enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceParams {
    /// Ground sets have `1..=max_points` points.
    pub max_points: usize,
    /// Masses available to each atom; placed on the atom's first point.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub weights: Vec<Q>,
    /// Fields are generated by at most this many sets.
    pub max_generators: usize,
    /// Values of real-valued tables.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub line_values: Vec<Q>,
    /// Finite metric codomains have up to this many points.
    pub metric_points: usize,
    /// Distances between distinct codomain points.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub distances: Vec<Q>,
    /// Line × two-point products and weak families, on ground sets up to this size.
    pub composite_points: usize,
    pub fincof: bool,
    /// FinCofNat prefix weights have at most this length.
    pub fincof_prefix: usize,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub fincof_weights: Vec<Q>,
    pub fixtures: bool,
    /// Largest number of instances produced before giving up.
    pub cap: usize,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            max_points: 3,
            weights: vec![q(0), q(1), q(2)],
            max_generators: 2,
            line_values: vec![q(-1), q(0), q(1), q(2)],
            metric_points: 3,
            distances: vec![q(1), q(2)],
            composite_points: 2,
            fincof: true,
            fincof_prefix: 1,
            fincof_weights: vec![q(0), q(1)],
            fixtures: true,
            cap: 100_000,
        }
    }
}

impl InstanceParams {
    /// Ground sets up to `n` points, other bounds at their defaults.
    pub fn with_max_points(n: usize) -> Self {
        InstanceParams {
            max_points: n,
            ..Default::default()
        }
    }

    /// Real-valued tables only: `|X| ≤ n` with the given weights and values.
    pub fn line_only(n: usize, weights: Vec<Q>, values: Vec<Q>) -> Self {
        InstanceParams {
            max_points: n,
            weights,
            line_values: values,
            metric_points: 0,
            composite_points: 0,
            fincof: false,
            fixtures: false,
            ..Default::default()
        }
    }
}

const POINT_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const LABELS: [&str; 3] = ["p", "q", "r"];

fn names(n: usize, pool: &[&str]) -> Vec<String> {
    pool[..n].iter().map(|s| s.to_string()).collect()
}

/// Set partitions of `0..n` as block lists, blocks ordered by first element.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn go(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == rgs.len() {
            let blocks = (0..max)
                .map(|b| (0..rgs.len()).filter(|&x| rgs[x] == b).collect())
                .collect();
            out.push(blocks);
            return;
        }
        for b in 0..=max {
            rgs[i] = b;
            go(i + 1, max.max(b + 1), rgs, out);
        }
    }
    if n > 0 {
        go(0, 0, &mut rgs, &mut out);
    }
    out
}

/// All tuples of length `n` over `alphabet`, lexicographically.
fn tuples<T: Clone>(alphabet: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|pre| {
                alphabet.iter().map(move |a| {
                    let mut t = pre.clone();
                    t.push(a.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn finite_spaces(p: &InstanceParams) -> Vec<SpaceDescriptor> {
    let mut out = Vec::new();
    for n in 1..=p.max_points.min(POINT_NAMES.len()) {
        for blocks in set_partitions(n) {
            if blocks.len() - 1 > p.max_generators {
                continue;
            }
            for masses in tuples(&p.weights, blocks.len()) {
                let mut weights = vec![Q::from_integer(0); n];
                for (b, m) in blocks.iter().zip(&masses) {
                    weights[b[0]] = *m;
                }
                out.push(SpaceDescriptor::Finite {
                    points: names(n, &POINT_NAMES),
                    generators: blocks[..blocks.len() - 1].to_vec(),
                    weights,
                });
            }
        }
    }
    out
}

fn metric(n: usize, d: &[Q]) -> CodomainDescriptor {
    let mut distances = vec![vec![Q::from_integer(0); n]; n];
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    for ((i, j), v) in pairs.zip(d) {
        distances[i][j] = *v;
        distances[j][i] = *v;
    }
    CodomainDescriptor::FiniteMetric {
        points: names(n, &LABELS),
        distances,
    }
}

/// Metric codomains with up to `metric_points` points, each with its point list.
fn metric_codomains(p: &InstanceParams) -> Vec<(CodomainDescriptor, usize)> {
    let mut out = Vec::new();
    for n in 1..=p.metric_points.min(LABELS.len()) {
        for d in tuples(&p.distances, n * (n - 1) / 2) {
            let ok = n < 3 || {
                let (a, b, c) = (d[0], d[1], d[2]);
                a <= b + c && b <= a + c && c <= a + b
            };
            if ok {
                out.push((metric(n, &d), n));
            }
        }
    }
    out
}

fn weak_families() -> Vec<CodomainDescriptor> {
    let family = |tables: &[&[i64]]| CodomainDescriptor::WeakFamily {
        points: names(3, &LABELS),
        tables: tables.iter().map(|t| t.iter().map(|&v| q(v)).collect()).collect(),
    };
    vec![family(&[&[0, 1, 2]]), family(&[&[0, 0, 1], &[0, 1, 1]])]
}

fn line_times_two() -> CodomainDescriptor {
    CodomainDescriptor::Product(vec![CodomainDescriptor::RationalLine, metric(2, &[q(1)])])
}

fn fincof_spaces(p: &InstanceParams) -> Vec<SpaceDescriptor> {
    let mut out = Vec::new();
    for len in 0..=p.fincof_prefix {
        for prefix in tuples(&p.fincof_weights, len) {
            for &w_inf in &p.fincof_weights {
                let tails: Vec<ExtRational> = if w_inf > Q::from_integer(0) {
                    vec![ExtRational::INF]
                } else {
                    p.fincof_weights
                        .iter()
                        .map(|w| ExtRational::Finite(*w))
                        .chain([ExtRational::INF])
                        .collect()
                };
                for m_inf in tails {
                    out.push(SpaceDescriptor::FinCofNat {
                        prefix: prefix.clone(),
                        w_inf,
                        m_inf,
                    });
                }
            }
        }
    }
    out
}

fn real(v: i64) -> Point {
    Point::Real(q(v))
}

fn fincof_real_funcs() -> Vec<Func> {
    let prefixes: Vec<Vec<Point>> = vec![vec![], vec![real(0)], vec![real(1)], vec![real(2)]];
    let tails = [Tail::Constant(real(0)),
        Tail::Constant(real(1)),
        Tail::Periodic(vec![real(0), real(1)]),
        Tail::Periodic(vec![real(1), real(0)]),
        Tail::Affine { a: q(1), b: q(0) },
        Tail::Affine { a: q(-1), b: q(0) }];
    prefixes
        .iter()
        .flat_map(|p| tails.iter().map(|t| Func::sequence(p.clone(), t.clone()).expect("valid sequence")))
        .collect()
}

fn fincof_label_funcs() -> Vec<Func> {
    let l = Point::Label;
    let prefixes: Vec<Vec<Point>> = vec![vec![], vec![l(2)]];
    let tails = [Tail::Constant(l(0)),
        Tail::Periodic(vec![l(0), l(1)]),
        Tail::Periodic(vec![l(0), l(2)]),
        Tail::Periodic(vec![l(0), l(1), l(2)])];
    prefixes
        .iter()
        .flat_map(|p| tails.iter().map(|t| Func::sequence(p.clone(), t.clone()).expect("valid sequence")))
        .collect()
}

struct Sink {
    cap: usize,
    seen: BTreeSet<String>,
    out: Vec<Instance>,
}

impl Sink {
    fn push(&mut self, inst: Instance) -> Result<()> {
        if self.seen.insert(inst.to_text()) {
            if self.out.len() == self.cap {
                return Err(Error::ResourceCap(format!("more than {} instances", self.cap)));
            }
            self.out.push(inst);
        }
        Ok(())
    }

    fn add(&mut self, space: &SpaceDescriptor, cod: &CodomainDescriptor, func: Func) -> Result<()> {
        let inst = Instance::new(space.clone(), cod.clone(), func)?;
        self.push(inst)
    }
}

/// Every instance within `params`: fixtures first, then finite ground sets by size,
/// field and masses, then ℕ. Instances with identical text appear once.
pub fn enumerate_instances(params: &InstanceParams) -> Result<Vec<Instance>> {
    let mut sink = Sink {
        cap: params.cap,
        seen: BTreeSet::new(),
        out: Vec::new(),
    };
    if params.fixtures {
        for n in 1..=6 {
            sink.push(Instance::fixture(n).expect("fixture"))?;
        }
    }
    let line_reals: Vec<Point> = params.line_values.iter().map(|v| Point::Real(*v)).collect();
    let metrics = metric_codomains(params);
    for space in finite_spaces(params) {
        let SpaceDescriptor::Finite { points, .. } = &space else {
            unreachable!()
        };
        let n = points.len();
        for t in tuples(&line_reals, n) {
            sink.add(&space, &CodomainDescriptor::RationalLine, Func::Table(t))?;
        }
        for (cod, k) in &metrics {
            let labels: Vec<Point> = (0..*k).map(Point::Label).collect();
            for t in tuples(&labels, n) {
                sink.add(&space, cod, Func::Table(t))?;
            }
        }
        if n <= params.composite_points {
            let pairs: Vec<Point> = [0, 1]
                .iter()
                .flat_map(|&v| (0..2).map(move |l| Point::Tuple(vec![real(v), Point::Label(l)])))
                .collect();
            for t in tuples(&pairs, n) {
                sink.add(&space, &line_times_two(), Func::Table(t))?;
            }
            let labels: Vec<Point> = (0..3).map(Point::Label).collect();
            for cod in weak_families() {
                for t in tuples(&labels, n) {
                    sink.add(&space, &cod, Func::Table(t))?;
                }
            }
        }
    }
    if params.fincof {
        let fix7 = crate::fixtures::codomain_descriptor(7).expect("FIX7");
        for space in fincof_spaces(params) {
            for f in fincof_real_funcs() {
                sink.add(&space, &CodomainDescriptor::RationalLine, f)?;
            }
            for f in fincof_label_funcs() {
                sink.add(&space, &fix7, f)?;
            }
        }
    }
    Ok(sink.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=4).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15]);
    }

    #[test]
    fn small_line_count_is_pinned() {
        let p = InstanceParams::line_only(2, vec![q(0), q(1)], vec![q(0), q(1)]);
        let all = enumerate_instances(&p).unwrap();
        // |X| = 1: 2 masses × 2 tables; |X| = 2: (2 + 4 masses) × 4 tables
        assert_eq!(all.len(), 28);
        assert!(all.iter().any(|i| i.to_text() == Instance::fixture(3).unwrap().to_text()));
    }

    #[test]
    fn defaults_contain_fixtures_and_are_stable() {
        let p = InstanceParams::default();
        let a = enumerate_instances(&p).unwrap();
        for n in 1..=6 {
            assert_eq!(a[n - 1], Instance::fixture(n).unwrap());
        }
        assert_eq!(a.len(), 18_945);
        let b = enumerate_instances(&p).unwrap();
        assert!(a == b);
    }

    #[test]
    fn cap_is_reported() {
        let p = InstanceParams {
            cap: 10,
            ..Default::default()
        };
        assert!(matches!(enumerate_instances(&p), Err(Error::ResourceCap(_))));
    }
}
