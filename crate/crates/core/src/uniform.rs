//! Uniform codomains presented by families of pseudometrics.
//!
//! Every backend exposes a finite list of pseudometrics; an [`Entourage`] is a
//! finite intersection of strict balls `{(y, y') : d_i(y, y') < r_i}`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, q, qf, Q};

/// Number of entries `1/1, 1/2, .., 1/GRID` in the canonical radius grid of the rational line.
pub const LINE_GRID: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Point {
    /// Index into the point list of a finite codomain.
    Label(usize),
    Real(#[serde(with = "crate::rational::serde_q")] Q),
    Tuple(Vec<Point>),
}

impl Point {
    pub fn real(&self) -> Option<Q> {
        match self {
            Point::Real(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodomainDescriptor {
    FiniteMetric {
        points: Vec<String>,
        distances: Vec<Vec<Q>>,
    },
    RationalLine,
    Product(Vec<CodomainDescriptor>),
    WeakFamily {
        points: Vec<String>,
        tables: Vec<Vec<Q>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetric {
    names: Vec<String>,
    dist: Vec<Vec<Q>>,
    radii: Vec<Q>,
}

impl FiniteMetric {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn distances(&self) -> &[Vec<Q>] {
        &self.dist
    }

    /// Sorted distinct positive distances.
    pub fn radii(&self) -> &[Q] {
        &self.radii
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakFamily {
    names: Vec<String>,
    tables: Vec<Vec<Q>>,
}

impl WeakFamily {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tables(&self) -> &[Vec<Q>] {
        &self.tables
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniformCodomain {
    FiniteMetric(FiniteMetric),
    RationalLine,
    /// Product uniformity; the pseudometrics are those of the factors, in order.
    Product(Vec<UniformCodomain>),
    /// Weak uniformity of real-valued tables `g_j` on a finite point set.
    WeakFamily(WeakFamily),
}

/// Finite intersection of strict pseudometric balls, one radius per pseudometric.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Entourage {
    radii: Vec<(usize, Radius)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Radius(#[serde(with = "crate::rational::serde_q")] pub Q);

impl Entourage {
    /// Normalizes to one radius per pseudometric id (the minimum).
    pub fn new<I: IntoIterator<Item = (usize, Q)>>(prims: I) -> Entourage {
        let mut radii: Vec<(usize, Radius)> = Vec::new();
        for (id, r) in prims {
            assert!(r.is_positive(), "entourage radii must be positive");
            match radii.iter_mut().find(|(i, _)| *i == id) {
                Some(slot) => slot.1 = Radius(slot.1 .0.min(r)),
                None => radii.push((id, Radius(r))),
            }
        }
        radii.sort();
        Entourage { radii }
    }

    pub fn uniform(pm_count: usize, r: Q) -> Entourage {
        Entourage::new((0..pm_count).map(|i| (i, r)))
    }

    pub fn primitives(&self) -> impl Iterator<Item = (usize, Q)> + '_ {
        self.radii.iter().map(|(i, r)| (*i, r.0))
    }

    pub fn radius(&self, pm: usize) -> Option<Q> {
        self.radii.iter().find(|(i, _)| *i == pm).map(|(_, r)| r.0)
    }

    pub fn intersect(&self, other: &Entourage) -> Entourage {
        Entourage::new(self.primitives().chain(other.primitives()))
    }

    /// Primitives on pseudometrics `offset..offset+len`, re-indexed from zero.
    pub fn restrict(&self, offset: usize, len: usize) -> Entourage {
        Entourage::new(
            self.primitives()
                .filter(|(i, _)| *i >= offset && *i < offset + len)
                .map(|(i, r)| (i - offset, r)),
        )
    }
}

impl fmt::Display for Entourage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radii.is_empty() {
            return f.write_str("Y×Y");
        }
        let parts: Vec<String> = self
            .radii
            .iter()
            .map(|(i, r)| format!("d{}<{}", i, fmt_q(&r.0)))
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

fn positive_distinct<I: IntoIterator<Item = Q>>(it: I) -> Vec<Q> {
    it.into_iter()
        .filter(|v| v.is_positive())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn check_names(names: &[String]) -> Result<()> {
    let distinct: BTreeSet<&String> = names.iter().collect();
    if names.is_empty() {
        return Err(Error::InvalidCodomain("empty point list".into()));
    }
    if distinct.len() != names.len() {
        return Err(Error::InvalidCodomain("duplicate point names".into()));
    }
    Ok(())
}

pub fn build_codomain(desc: &CodomainDescriptor) -> Result<UniformCodomain> {
    match desc {
        CodomainDescriptor::RationalLine => Ok(UniformCodomain::RationalLine),
        CodomainDescriptor::FiniteMetric { points, distances } => {
            check_names(points)?;
            let n = points.len();
            if distances.len() != n || distances.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidCodomain(format!(
                    "distance matrix must be {n}×{n}"
                )));
            }
            for i in 0..n {
                if !distances[i][i].is_zero() {
                    return Err(Error::InvalidCodomain(format!(
                        "nonzero diagonal at {}",
                        points[i]
                    )));
                }
                for j in 0..n {
                    if distances[i][j].is_negative() {
                        return Err(Error::InvalidCodomain("negative distance".into()));
                    }
                    if distances[i][j] != distances[j][i] {
                        return Err(Error::Asymmetric {
                            a: points[i].clone(),
                            b: points[j].clone(),
                        });
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if distances[a][c] > distances[a][b] + distances[b][c] {
                            return Err(Error::Triangle {
                                a: points[a].clone(),
                                b: points[b].clone(),
                                c: points[c].clone(),
                            });
                        }
                    }
                }
            }
            let radii = positive_distinct(distances.iter().flatten().copied());
            Ok(UniformCodomain::FiniteMetric(FiniteMetric {
                names: points.clone(),
                dist: distances.clone(),
                radii,
            }))
        }
        CodomainDescriptor::Product(factors) => {
            if factors.is_empty() {
                return Err(Error::InvalidCodomain("empty product".into()));
            }
            Ok(UniformCodomain::Product(
                factors.iter().map(build_codomain).collect::<Result<_>>()?,
            ))
        }
        CodomainDescriptor::WeakFamily { points, tables } => {
            check_names(points)?;
            if tables.iter().any(|t| t.len() != points.len()) {
                return Err(Error::InvalidCodomain(
                    "every table must assign a value to each point".into(),
                ));
            }
            Ok(UniformCodomain::WeakFamily(WeakFamily {
                names: points.clone(),
                tables: tables.clone(),
            }))
        }
    }
}

impl UniformCodomain {
    pub fn is_line(&self) -> bool {
        matches!(self, UniformCodomain::RationalLine)
    }

    pub fn pm_count(&self) -> usize {
        match self {
            UniformCodomain::FiniteMetric(_) | UniformCodomain::RationalLine => 1,
            UniformCodomain::Product(fs) => fs.iter().map(|f| f.pm_count()).sum(),
            UniformCodomain::WeakFamily(w) => w.tables.len(),
        }
    }

    /// `(factor index, offset)` of the factor owning pseudometric `pm`.
    fn owner(&self, pm: usize) -> (usize, usize) {
        let UniformCodomain::Product(fs) = self else {
            return (0, 0);
        };
        let mut off = 0;
        for (k, f) in fs.iter().enumerate() {
            if pm < off + f.pm_count() {
                return (k, off);
            }
            off += f.pm_count();
        }
        panic!("pseudometric {pm} out of range")
    }

    pub fn factor_offsets(&self) -> Vec<usize> {
        match self {
            UniformCodomain::Product(fs) => fs
                .iter()
                .scan(0, |off, f| {
                    let o = *off;
                    *off += f.pm_count();
                    Some(o)
                })
                .collect(),
            _ => vec![0],
        }
    }

    pub fn distance(&self, pm: usize, a: &Point, b: &Point) -> Q {
        match (self, a, b) {
            (UniformCodomain::FiniteMetric(m), Point::Label(i), Point::Label(j)) => m.dist[*i][*j],
            (UniformCodomain::RationalLine, Point::Real(x), Point::Real(y)) => (x - y).abs(),
            (UniformCodomain::WeakFamily(w), Point::Label(i), Point::Label(j)) => {
                (w.tables[pm][*i] - w.tables[pm][*j]).abs()
            }
            (UniformCodomain::Product(fs), Point::Tuple(xs), Point::Tuple(ys)) => {
                let (k, off) = self.owner(pm);
                fs[k].distance(pm - off, &xs[k], &ys[k])
            }
            _ => panic!("point does not belong to codomain"),
        }
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        let ok = match (self, p) {
            (UniformCodomain::FiniteMetric(m), Point::Label(i)) => *i < m.names.len(),
            (UniformCodomain::WeakFamily(w), Point::Label(i)) => *i < w.names.len(),
            (UniformCodomain::RationalLine, Point::Real(_)) => true,
            (UniformCodomain::Product(fs), Point::Tuple(xs)) => {
                xs.len() == fs.len() && fs.iter().zip(xs).all(|(f, x)| f.validate_point(x).is_ok())
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ForeignPoint(format!("{p:?}")))
        }
    }

    pub fn fmt_point(&self, p: &Point) -> String {
        match (self, p) {
            (UniformCodomain::FiniteMetric(m), Point::Label(i)) => m.names[*i].clone(),
            (UniformCodomain::WeakFamily(w), Point::Label(i)) => w.names[*i].clone(),
            (_, Point::Real(v)) => fmt_q(v),
            (UniformCodomain::Product(fs), Point::Tuple(xs)) => {
                let parts: Vec<String> = fs.iter().zip(xs).map(|(f, x)| f.fmt_point(x)).collect();
                format!("({})", parts.join(", "))
            }
            _ => format!("{p:?}"),
        }
    }

    pub fn parse_point(&self, s: &str) -> Result<Point> {
        let s = s.trim();
        let foreign = || Error::ForeignPoint(s.to_string());
        match self {
            UniformCodomain::FiniteMetric(FiniteMetric { names, .. })
            | UniformCodomain::WeakFamily(WeakFamily { names, .. }) => names
                .iter()
                .position(|n| n == s)
                .map(Point::Label)
                .ok_or_else(foreign),
            UniformCodomain::RationalLine => parse_q(s).map(Point::Real).ok_or_else(foreign),
            UniformCodomain::Product(fs) => {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(foreign)?;
                let parts = split_top_level(inner, ',');
                if parts.len() != fs.len() {
                    return Err(foreign());
                }
                Ok(Point::Tuple(
                    fs.iter()
                        .zip(parts)
                        .map(|(f, part)| f.parse_point(part))
                        .collect::<Result<_>>()?,
                ))
            }
        }
    }

    /// All points, when the codomain is finite.
    pub fn finite_points(&self) -> Option<Vec<Point>> {
        match self {
            UniformCodomain::FiniteMetric(m) => Some((0..m.names.len()).map(Point::Label).collect()),
            UniformCodomain::WeakFamily(w) => Some((0..w.names.len()).map(Point::Label).collect()),
            UniformCodomain::RationalLine => None,
            UniformCodomain::Product(fs) => {
                let mut acc: Vec<Vec<Point>> = vec![vec![]];
                for f in fs {
                    let pts = f.finite_points()?;
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            pts.iter().map(move |p| {
                                let mut t = prefix.clone();
                                t.push(p.clone());
                                t
                            })
                        })
                        .collect();
                }
                Some(acc.into_iter().map(Point::Tuple).collect())
            }
        }
    }

    pub fn project(&self, p: &Point, k: usize) -> Point {
        match p {
            Point::Tuple(xs) => xs[k].clone(),
            _ => p.clone(),
        }
    }

    /// Zero distance in every pseudometric.
    pub fn same_class(&self, a: &Point, b: &Point) -> bool {
        (0..self.pm_count()).all(|pm| self.distance(pm, a, b).is_zero())
    }

    pub fn in_entourage(&self, e: &Entourage, a: &Point, b: &Point) -> bool {
        e.primitives().all(|(pm, r)| self.distance(pm, a, b) < r)
    }

    /// Membership of `z` in the ball `E[y]`.
    pub fn ball(&self, e: &Entourage, y: &Point, z: &Point) -> bool {
        self.in_entourage(e, y, z)
    }

    /// Points of `E[y]`, for finite codomains.
    pub fn ball_points(&self, e: &Entourage, y: &Point) -> Option<Vec<Point>> {
        Some(
            self.finite_points()?
                .into_iter()
                .filter(|z| self.ball(e, y, z))
                .collect(),
        )
    }

    pub fn diameter(&self, pm: usize, s: &[Point]) -> Q {
        let mut d = Q::zero();
        for (i, a) in s.iter().enumerate() {
            for b in &s[i + 1..] {
                d = d.max(self.distance(pm, a, b));
            }
        }
        d
    }

    /// `S × S ⊆ E`.
    pub fn is_small(&self, s: &[Point], e: &Entourage) -> bool {
        e.primitives().all(|(pm, r)| self.diameter(pm, s) < r)
    }

    /// A point `v` with `values ⊆ E[v]`, if one exists.
    pub fn find_center(&self, values: &[Point], e: &Entourage) -> Option<Point> {
        if values.is_empty() {
            return None;
        }
        match self {
            UniformCodomain::RationalLine => {
                let xs: Vec<Q> = values.iter().filter_map(Point::real).collect();
                let lo = *xs.iter().min()?;
                let hi = *xs.iter().max()?;
                match e.radius(0) {
                    Some(r) if hi - lo >= r * q(2) => None,
                    _ => Some(Point::Real((lo + hi) / q(2))),
                }
            }
            UniformCodomain::Product(fs) => {
                let offs = self.factor_offsets();
                let mut parts = Vec::with_capacity(fs.len());
                for (k, f) in fs.iter().enumerate() {
                    let proj: Vec<Point> = values.iter().map(|v| self.project(v, k)).collect();
                    let sub = e.restrict(offs[k], f.pm_count());
                    parts.push(f.find_center(&proj, &sub)?);
                }
                Some(Point::Tuple(parts))
            }
            _ => self
                .finite_points()?
                .into_iter()
                .find(|v| values.iter().all(|y| self.ball(e, v, y))),
        }
    }

    /// Distinct traces `{i : relevant[i] ∈ E[y]}` as `y` ranges over the codomain.
    pub fn ball_patterns(&self, relevant: &[Point], e: &Entourage) -> BTreeSet<Vec<usize>> {
        match self {
            UniformCodomain::RationalLine => line_patterns(relevant, e.radius(0)),
            UniformCodomain::Product(fs) => {
                let offs = self.factor_offsets();
                let mut acc: BTreeSet<Vec<usize>> =
                    [(0..relevant.len()).collect()].into_iter().collect();
                for (k, f) in fs.iter().enumerate() {
                    let proj: Vec<Point> = relevant.iter().map(|v| self.project(v, k)).collect();
                    let sub = e.restrict(offs[k], f.pm_count());
                    let pats = f.ball_patterns(&proj, &sub);
                    acc = acc
                        .iter()
                        .flat_map(|a| {
                            pats.iter().map(move |p| {
                                a.iter().filter(|i| p.contains(i)).copied().collect()
                            })
                        })
                        .collect();
                }
                acc
            }
            _ => self
                .finite_points()
                .expect("finite codomain")
                .iter()
                .map(|y| {
                    (0..relevant.len())
                        .filter(|&i| self.ball(e, y, &relevant[i]))
                        .collect()
                })
                .collect(),
        }
    }

    /// Sorted radius thresholds for pseudometric `pm` at which some ball or
    /// smallness pattern over `relevant` changes.
    pub fn radius_criticals(&self, pm: usize, relevant: &[Point]) -> Vec<Q> {
        match self {
            UniformCodomain::FiniteMetric(m) => m.radii.clone(),
            UniformCodomain::WeakFamily(w) => {
                let t = &w.tables[pm];
                positive_distinct(t.iter().flat_map(|a| t.iter().map(move |b| (a - b).abs())))
            }
            UniformCodomain::RationalLine => {
                let xs: Vec<Q> = relevant.iter().filter_map(Point::real).collect();
                positive_distinct(xs.iter().flat_map(|a| {
                    xs.iter()
                        .flat_map(move |b| [(a - b).abs(), (a - b).abs() / q(2)])
                }))
            }
            UniformCodomain::Product(fs) => {
                let (k, off) = self.owner(pm);
                let proj: Vec<Point> = relevant.iter().map(|v| self.project(v, k)).collect();
                fs[k].radius_criticals(pm - off, &proj)
            }
        }
    }

    /// Radius list of pseudometric `pm` used by the deciders, ascending.
    pub fn pm_radii(&self, pm: usize, relevant: &[Point]) -> Vec<Q> {
        match self {
            UniformCodomain::RationalLine => {
                line_radii(&self.radius_criticals(pm, relevant))
            }
            UniformCodomain::Product(fs) => {
                let (k, off) = self.owner(pm);
                let proj: Vec<Point> = relevant.iter().map(|v| self.project(v, k)).collect();
                fs[k].pm_radii(pm - off, &proj)
            }
            _ => {
                let r = self.radius_criticals(pm, relevant);
                if r.is_empty() {
                    vec![q(1)]
                } else {
                    r
                }
            }
        }
    }

    /// Cofinal base of strict-ball entourages, finest first.
    ///
    /// On the rational line the radii are the canonical grid together with the
    /// critical radii of `relevant`; grid radii below the finest critical radius
    /// are dropped since no pattern over `relevant` changes there.
    pub fn entourage_base(&self, relevant: &[Point]) -> Vec<Entourage> {
        let lists: Vec<Vec<Q>> = (0..self.pm_count())
            .map(|pm| self.pm_radii(pm, relevant))
            .collect();
        let mut acc: Vec<Vec<Q>> = vec![vec![]];
        for list in &lists {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    list.iter().map(move |r| {
                        let mut t = prefix.clone();
                        t.push(*r);
                        t
                    })
                })
                .collect();
        }
        let mut base: Vec<Entourage> = acc
            .into_iter()
            .map(|radii| Entourage::new(radii.into_iter().enumerate()))
            .collect();
        base.sort_by(|a, b| {
            let ka: Vec<Q> = a.primitives().map(|(_, r)| r).collect();
            let kb: Vec<Q> = b.primitives().map(|(_, r)| r).collect();
            let sa: Q = ka.iter().sum();
            let sb: Q = kb.iter().sum();
            sa.cmp(&sb).then(ka.cmp(&kb))
        });
        base
    }

    /// Thresholds at which ball membership over `relevant` changes: pairwise
    /// distances, plus (rational line) half-distances, the values and midpoints.
    pub fn critical_thresholds(&self, relevant: &[Point]) -> Vec<Q> {
        let mut out: BTreeSet<Q> = BTreeSet::new();
        match self {
            UniformCodomain::RationalLine => {
                let xs: Vec<Q> = relevant.iter().filter_map(Point::real).collect();
                for a in &xs {
                    out.insert(*a);
                    for b in &xs {
                        let d = (a - b).abs();
                        if d.is_positive() {
                            out.insert(d);
                            out.insert(d / q(2));
                        }
                        out.insert((a + b) / q(2));
                    }
                }
            }
            UniformCodomain::Product(fs) => {
                for (k, f) in fs.iter().enumerate() {
                    let proj: Vec<Point> = relevant.iter().map(|v| self.project(v, k)).collect();
                    out.extend(f.critical_thresholds(&proj));
                }
            }
            _ => {
                for pm in 0..self.pm_count() {
                    for a in relevant {
                        for b in relevant {
                            let d = self.distance(pm, a, b);
                            if d.is_positive() {
                                out.insert(d);
                            }
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Grid `{1, 1/2, .., 1/LINE_GRID}` together with `criticals`, dropping grid
/// entries below the smallest critical radius.
pub fn line_radii(criticals: &[Q]) -> Vec<Q> {
    let floor = criticals.iter().copied().filter(|c| c.is_positive()).min();
    let grid = (1..=LINE_GRID).map(|k| qf(1, k));
    let mut out: BTreeSet<Q> = grid.filter(|g| floor.is_none_or(|f| *g >= f)).collect();
    out.extend(criticals.iter().copied().filter(|c| c.is_positive()));
    out.into_iter().collect()
}

/// `(D ∘ D ⊆ E)` via the sufficient triangle bound: every primitive `(d, r)` of
/// `E` has a primitive `(d, s)` in `D` with `2s ≤ r`.
pub fn compose_contains(e: &Entourage, d: &Entourage) -> bool {
    e.primitives()
        .all(|(pm, r)| d.radius(pm).is_some_and(|s| s * q(2) <= r))
}

/// Exact `D ∘ D ⊆ E` on a finite codomain.
pub fn compose_contains_exact(y: &UniformCodomain, e: &Entourage, d: &Entourage) -> Option<bool> {
    let pts = y.finite_points()?;
    for a in &pts {
        for b in &pts {
            if !y.in_entourage(d, a, b) {
                continue;
            }
            for c in &pts {
                if y.in_entourage(d, b, c) && !y.in_entourage(e, a, c) {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

/// Ball traces on the rational line: contiguous runs of sorted values that fit
/// in some open interval of radius `r` excluding both neighbours, plus `∅`.
fn line_patterns(relevant: &[Point], r: Option<Q>) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    let Some(r) = r else {
        out.insert((0..relevant.len()).collect());
        return out;
    };
    let mut vals: Vec<Q> = relevant.iter().filter_map(Point::real).collect();
    vals.sort();
    vals.dedup();
    out.insert(vec![]);
    let two_r = r * q(2);
    for i in 0..vals.len() {
        for j in i..vals.len() {
            if vals[j] - vals[i] >= two_r {
                break;
            }
            let left_ok = i == 0 || j + 1 == vals.len() || vals[j + 1] - vals[i - 1] >= two_r;
            if left_ok {
                let run = &vals[i..=j];
                out.insert(
                    (0..relevant.len())
                        .filter(|&k| relevant[k].real().is_some_and(|v| run.contains(&v)))
                        .collect(),
                );
            }
        }
    }
    out
}

/// Splits on `sep` outside parentheses and brackets.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[last..i].trim());
                last = i + c.len_utf8();
            }
            _ => {}
        }
    }
    let tail = s[last..].trim();
    if !tail.is_empty() || !out.is_empty() {
        out.push(tail);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn reals(xs: &[i64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::Real(q(x))).collect()
    }

    fn metric(d: [[i64; 3]; 3]) -> Result<UniformCodomain> {
        build_codomain(&CodomainDescriptor::FiniteMetric {
            points: vec!["p".into(), "q".into(), "r".into()],
            distances: d.iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect(),
        })
    }

    #[test]
    fn fix7_validates_and_variant_fails() {
        assert!(metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]]).is_ok());
        assert!(matches!(
            metric([[0, 1, 3], [1, 0, 1], [3, 1, 0]]),
            Err(Error::Triangle { .. })
        ));
        assert!(matches!(
            metric([[0, 1, 2], [2, 0, 1], [2, 1, 0]]),
            Err(Error::Asymmetric { .. })
        ));
        let one = build_codomain(&CodomainDescriptor::FiniteMetric {
            points: vec!["o".into()],
            distances: vec![vec![q(0)]],
        })
        .unwrap();
        assert_eq!(one.entourage_base(&[]).len(), 1);
    }

    #[test]
    fn fix7_base_and_balls() {
        let y = fixtures::fix7();
        let base = y.entourage_base(&[]);
        let radii: Vec<Q> = base.iter().map(|e| e.radius(0).unwrap()).collect();
        assert_eq!(radii, vec![q(1), q(2)]);
        let ball = y.ball_points(&Entourage::uniform(1, q(2)), &Point::Label(1)).unwrap();
        assert_eq!(ball.len(), 3);
        let all = y.finite_points().unwrap();
        assert_eq!(y.critical_thresholds(&all), vec![q(1), q(2)]);
    }

    #[test]
    fn line_thresholds_and_radii() {
        let y = UniformCodomain::RationalLine;
        assert_eq!(
            y.critical_thresholds(&reals(&[0, 1, 2])),
            vec![q(0), qf(1, 2), q(1), qf(3, 2), q(2)]
        );
        assert_eq!(y.critical_thresholds(&reals(&[5])), vec![q(5)]);
        let radii = line_radii(&[qf(1, 2), q(1)]);
        assert!(radii.contains(&qf(1, 2)) && radii.contains(&q(1)));
        assert!(radii.iter().all(|r| *r >= qf(1, 2)));
        assert_eq!(line_radii(&[]).len(), LINE_GRID as usize);
    }

    #[test]
    fn smallness_and_composition() {
        let y = UniformCodomain::RationalLine;
        assert!(!y.is_small(&reals(&[0, 1, 2]), &Entourage::uniform(1, qf(1, 2))));
        assert!(compose_contains(
            &Entourage::uniform(1, q(1)),
            &Entourage::uniform(1, qf(1, 2))
        ));
        assert!(!compose_contains(
            &Entourage::uniform(1, q(1)),
            &Entourage::uniform(1, qf(2, 3))
        ));
    }

    #[test]
    fn product_base_is_pairs_of_radii() {
        let y = UniformCodomain::Product(vec![fixtures::fix7(), fixtures::fix7()]);
        let base = y.entourage_base(&[]);
        assert_eq!(base.len(), 4);
        assert_eq!(base[0], Entourage::new([(0, q(1)), (1, q(1))]));
    }

    #[test]
    fn line_patterns_respect_neighbours() {
        // {1/2} alone is not a ball trace at radius 3/5 over {0, 1/2, 1}
        let pts = vec![Point::Real(q(0)), Point::Real(qf(1, 2)), Point::Real(q(1))];
        let pats = line_patterns(&pts, Some(qf(3, 5)));
        assert!(!pats.contains(&vec![1]));
        assert!(pats.contains(&vec![0, 1]));
        assert!(pats.contains(&vec![]));
    }

    #[test]
    fn line_patterns_match_scan() {
        // scan centres on a fine grid and compare
        let vals = [0i64, 1, 3, 4];
        let pts = reals(&vals);
        for r in [qf(1, 3), qf(1, 2), q(1), qf(3, 2), q(2)] {
            let pats = line_patterns(&pts, Some(r));
            let mut scanned = BTreeSet::new();
            for step in -40..=100 {
                let y = qf(step, 12);
                scanned.insert(
                    (0..pts.len())
                        .filter(|&i| (q(vals[i]) - y).abs() < r)
                        .collect::<Vec<_>>(),
                );
            }
            assert_eq!(pats, scanned, "radius {r}");
        }
    }

    #[test]
    fn compose_bound_is_sound_on_fix7() {
        let y = fixtures::fix7();
        for e in [qf(1, 2), q(1), qf(3, 2), q(2), q(3)] {
            for d in [qf(1, 4), qf(1, 2), q(1), qf(3, 2)] {
                let ee = Entourage::uniform(1, e);
                let dd = Entourage::uniform(1, d);
                if compose_contains(&ee, &dd) {
                    assert_eq!(compose_contains_exact(&y, &ee, &dd), Some(true));
                }
            }
        }
    }

    #[test]
    fn parse_product_points() {
        let y = UniformCodomain::Product(vec![fixtures::fix7(), UniformCodomain::RationalLine]);
        let p = y.parse_point("(q, 1/2)").unwrap();
        assert_eq!(p, Point::Tuple(vec![Point::Label(1), Point::Real(qf(1, 2))]));
        assert_eq!(y.fmt_point(&p), "(q, 1/2)");
        assert!(y.parse_point("(z, 1)").is_err());
    }
}
