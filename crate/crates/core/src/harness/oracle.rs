//! Brute-force definitional oracles.
//!
//! Every notion is evaluated on a [`Model`] by reading its definition directly:
//! field partitions and simple functions are enumerated over the atoms, balls are
//! tried at every centre realizing a distinct trace, and "for every ε > 0" is read
//! on the grid `1, 1/2, .., 2^{-g}`. The entourages are strict balls whose radii
//! are drawn from the distances between the values, their halves, the midpoints
//! between those and a few fixed radii, independently of the deciders' bases.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::model::{cells, grid_epsilon, negligible, reals, CellValue, Mask, Model};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::measurability::{find_regular_delta, PhiProfile, Property, REGULAR_DEPTH};
use crate::rational::{q, qf, ExtRational, Q};
use crate::uniform::{Entourage, Point, UniformCodomain};

/// Grid depth and ℕ truncation used by the oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub grid: u32,
    pub cutoff: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { grid: 10, cutoff: 16 }
    }
}

/// Atom counts up to which field partitions are enumerated one by one.
const PARTITION_ATOMS: usize = 7;

/// Depth to which the oracle builds level pieces and hazy errors.
const REGULAR_ORACLE_DEPTH: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub property: Property,
    pub holds: bool,
    /// Zero when the property holds; otherwise the offending infimum.
    pub infimum: ExtRational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entourage: Option<Entourage>,
    #[serde(with = "crate::rational::serde_q_vec", default, skip_serializing_if = "Vec::is_empty")]
    pub threshold: Vec<Q>,
    /// False when the model truncates ℕ.
    pub exact: bool,
}

pub struct Oracle<'a> {
    pub inst: &'a Instance,
    pub model: Model,
    pub opts: OracleOptions,
    entourages: Vec<Entourage>,
    /// `finer[d][e]`: every radius of `d` is at most the matching radius of `e`.
    finer: Vec<Vec<bool>>,
}

/// Partitions of `items` into nonempty blocks, by restricted growth strings.
pub fn partitions(items: &[Mask]) -> Vec<Vec<Mask>> {
    fn go(items: &[Mask], i: usize, blocks: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        if i == items.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= items[i];
            go(items, i + 1, blocks, out);
            blocks[b] &= !items[i];
        }
        blocks.push(items[i]);
        go(items, i + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(items, 0, &mut Vec::new(), &mut out);
    out
}

fn line_interest(vs: &[Q]) -> Vec<Q> {
    let mut out: BTreeSet<Q> = vs.iter().copied().collect();
    for w in vs.windows(2) {
        out.insert((w[0] + w[1]) / q(2));
    }
    if let (Some(lo), Some(hi)) = (vs.first(), vs.last()) {
        out.insert(lo - q(1));
        out.insert(hi + q(1));
    }
    if out.is_empty() {
        out.insert(Q::zero());
    }
    out.into_iter().collect()
}

fn tuples(parts: Vec<Vec<Point>>) -> Vec<Point> {
    let mut acc: Vec<Vec<Point>> = vec![vec![]];
    for sub in parts {
        acc = acc
            .into_iter()
            .flat_map(|pre| {
                sub.iter().map(move |c| {
                    let mut t = pre.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    acc.into_iter().map(Point::Tuple).collect()
}

/// Points `y` whose small balls realize every neighbourhood trace on `pts`.
fn interest_points(cod: &UniformCodomain, pts: &[Point]) -> Vec<Point> {
    match cod {
        UniformCodomain::RationalLine => line_interest(&reals(pts)).into_iter().map(Point::Real).collect(),
        UniformCodomain::Product(fs) => tuples(
            fs.iter()
                .enumerate()
                .map(|(k, f)| {
                    let proj: Vec<Point> = pts.iter().map(|p| cod.project(p, k)).collect();
                    interest_points(f, &proj)
                })
                .collect(),
        ),
        _ => cod.finite_points().expect("finite codomain"),
    }
}

/// Centres realizing every trace `E[c] ∩ pts`: on the line the trace only changes
/// at the ends of the intervals `(v - r, v + r)`.
fn centers(cod: &UniformCodomain, pts: &[Point], e: &Entourage) -> Vec<Point> {
    match cod {
        UniformCodomain::RationalLine => {
            let vs = reals(pts);
            let mut ends: BTreeSet<Q> = vs.iter().copied().collect();
            if let Some(r) = e.radius(0) {
                for v in &vs {
                    ends.insert(v - r);
                    ends.insert(v + r);
                }
            }
            let ends: Vec<Q> = ends.into_iter().collect();
            line_interest(&ends).into_iter().map(Point::Real).collect()
        }
        UniformCodomain::Product(fs) => {
            let offs = cod.factor_offsets();
            tuples(
                fs.iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let proj: Vec<Point> = pts.iter().map(|p| cod.project(p, k)).collect();
                        centers(f, &proj, &e.restrict(offs[k], f.pm_count()))
                    })
                    .collect(),
            )
        }
        _ => cod.finite_points().expect("finite codomain"),
    }
}

fn is_finer(d: &Entourage, e: &Entourage) -> bool {
    e.primitives()
        .all(|(pm, r)| d.radius(pm).is_some_and(|s| s <= r))
}

impl<'a> Oracle<'a> {
    pub fn new(inst: &'a Instance, opts: OracleOptions) -> Result<Oracle<'a>> {
        let model = Model::new(inst, opts.cutoff)?;
        let mut refs = model.query_points();
        if let Some(all) = inst.codomain.finite_points() {
            refs.extend(all);
        }
        let cod = &inst.codomain;
        let lists: Vec<Vec<Q>> = (0..cod.pm_count())
            .map(|pm| {
                let mut base: BTreeSet<Q> = BTreeSet::new();
                for a in &refs {
                    for b in &refs {
                        let d = cod.distance(pm, a, b);
                        if d.is_positive() {
                            base.insert(d);
                            base.insert(d / q(2));
                        }
                    }
                }
                let sorted: Vec<Q> = base.iter().copied().collect();
                let mut out = base;
                for w in sorted.windows(2) {
                    out.insert((w[0] + w[1]) / q(2));
                }
                if let (Some(lo), Some(hi)) = (sorted.first(), sorted.last()) {
                    out.insert(lo / q(2));
                    out.insert(hi + q(1));
                }
                out.extend([q(1), qf(1, 2), qf(1, 4)]);
                out.into_iter().collect()
            })
            .collect();
        let mut combos: Vec<Vec<Q>> = vec![vec![]];
        for list in &lists {
            combos = combos
                .into_iter()
                .flat_map(|pre| {
                    list.iter().map(move |r| {
                        let mut t = pre.clone();
                        t.push(*r);
                        t
                    })
                })
                .collect();
        }
        combos.sort_by(|a, b| {
            let (sa, sb): (Q, Q) = (a.iter().sum(), b.iter().sum());
            sa.cmp(&sb).then(a.cmp(b))
        });
        let entourages: Vec<Entourage> = combos
            .into_iter()
            .map(|rs| Entourage::new(rs.into_iter().enumerate()))
            .collect();
        let finer = entourages
            .iter()
            .map(|d| entourages.iter().map(|e| is_finer(d, e)).collect())
            .collect();
        Ok(Oracle {
            inst,
            model,
            opts,
            entourages,
            finer,
        })
    }

    pub fn entourages(&self) -> &[Entourage] {
        &self.entourages
    }

    fn eps(&self) -> Q {
        grid_epsilon(self.opts.grid)
    }

    fn negligible(&self, v: &ExtRational) -> bool {
        negligible(v, self.opts.grid)
    }

    /// Membership in the completion: a gap below every grid tolerance.
    pub fn member(&self, m: Mask) -> bool {
        self.negligible(&self.model.gap(m))
    }

    fn verdict(&self, property: Property, infimum: Option<ExtRational>) -> OracleVerdict {
        OracleVerdict {
            property,
            holds: infimum.is_none(),
            infimum: infimum.unwrap_or_else(ExtRational::zero),
            entourage: None,
            threshold: vec![],
            exact: self.model.is_literal(),
        }
    }

    /// `S × S ⊆ E` for the values on the cells of `m`.
    pub fn small(&self, m: Mask, e: &Entourage) -> bool {
        let mut pts: Vec<Point> = Vec::new();
        for c in cells(m) {
            match &self.model.values[c] {
                CellValue::At(p) => pts.push(p.clone()),
                CellValue::Far(_) => return false,
            }
        }
        self.inst.codomain.is_small(&pts, e)
    }

    /// Cells mapped into `E[c]`.
    pub fn covered(&self, c: &Point, e: &Entourage) -> Mask {
        self.model
            .where_value(|v| matches!(v, CellValue::At(p) if self.inst.codomain.ball(e, c, p)))
    }

    fn literal_partitions(&self) -> Option<Vec<Vec<Mask>>> {
        (self.model.is_literal() && self.model.atoms.len() <= PARTITION_ATOMS)
            .then(|| partitions(&self.model.atoms))
    }

    /// `inf μ(A_0)` over field partitions `A_0, .., A_n` with `E`-small `f(A_i)`, `i ≥ 1`.
    pub fn t2_infimum(&self, e: &Entourage) -> ExtRational {
        let Some(parts) = self.literal_partitions() else {
            // every atom whose image is not small has to sit in A_0
            return ExtRational::sum(
                self.model
                    .atoms
                    .iter()
                    .zip(&self.model.mass)
                    .filter(|(a, _)| !self.small(**a, e))
                    .map(|(_, w)| *w),
            );
        };
        let mut best = ExtRational::INF;
        for blocks in parts {
            let small: Vec<bool> = blocks.iter().map(|b| self.small(*b, e)).collect();
            if small.iter().all(|s| *s) {
                return ExtRational::zero();
            }
            for (z, b) in blocks.iter().enumerate() {
                if small.iter().enumerate().all(|(i, s)| *s || i == z) {
                    best = best.min(self.model.charge(*b));
                }
            }
        }
        best
    }

    /// `inf μ*({x : (s(x), f(x)) ∉ E})` over field-simple functions `s`.
    pub fn t1_infimum(&self, e: &Entourage) -> ExtRational {
        let cs = centers(&self.inst.codomain, &self.model.query_points(), e);
        let cover: Vec<Mask> = cs.iter().map(|c| self.covered(c, e)).collect();
        let block_cost = |b: Mask| {
            cover
                .iter()
                .map(|m| self.model.outer(b & !m))
                .min()
                .unwrap_or_else(|| self.model.outer(b))
        };
        match self.literal_partitions() {
            Some(parts) => parts
                .into_iter()
                .map(|blocks| ExtRational::sum(blocks.into_iter().map(block_cost)))
                .min()
                .unwrap_or_else(ExtRational::zero),
            None => ExtRational::sum(self.model.atoms.iter().map(|a| block_cost(*a))),
        }
    }

    /// `inf μ*(f^{-1}(Y \ ∪ B_i))` over finite families of `E`-small sets: singletons
    /// are small for every `E`, so every bounded value can be covered and only
    /// unbounded runs escape.
    pub fn smooth_infimum(&self, _e: &Entourage) -> ExtRational {
        self.model
            .outer(self.model.where_value(|v| matches!(v, CellValue::Far(_))))
    }

    fn every_entourage(&self, property: Property, inf: impl Fn(&Entourage) -> ExtRational) -> OracleVerdict {
        for e in &self.entourages {
            let v = inf(e);
            if !self.negligible(&v) {
                let mut out = self.verdict(property, Some(v));
                out.entourage = Some(e.clone());
                return out;
            }
        }
        self.verdict(property, None)
    }

    /// Fails at the first entourage with no finer entourage in `good`, reporting
    /// the least of `cost` over the finer ones.
    fn cofinal(&self, property: Property, good: &[bool], cost: &[ExtRational]) -> Option<OracleVerdict> {
        for (j, e) in self.entourages.iter().enumerate() {
            let finer: Vec<usize> = (0..self.entourages.len()).filter(|&d| self.finer[d][j]).collect();
            if !finer.iter().any(|&d| good[d]) {
                let inf = finer.iter().map(|&d| cost[d]).min().unwrap_or(ExtRational::INF);
                let mut out = self.verdict(property, Some(inf));
                out.entourage = Some(e.clone());
                return Some(out);
            }
        }
        None
    }

    /// Every `y` has arbitrarily small balls whose preimages lie in the completion.
    fn base(&self) -> OracleVerdict {
        for y in interest_points(&self.inst.codomain, &self.model.query_points()) {
            let gaps: Vec<ExtRational> = self
                .entourages
                .iter()
                .map(|e| self.model.gap(self.covered(&y, e)))
                .collect();
            let good: Vec<bool> = gaps.iter().map(|g| self.negligible(g)).collect();
            if let Some(v) = self.cofinal(Property::Base, &good, &gaps) {
                return v;
            }
        }
        self.verdict(Property::Base, None)
    }

    /// Arbitrarily small entourages all of whose balls pull back into the completion.
    fn ubm(&self) -> OracleVerdict {
        let pts = self.model.query_points();
        let gaps: Vec<ExtRational> = self
            .entourages
            .iter()
            .map(|e| {
                centers(&self.inst.codomain, &pts, e)
                    .iter()
                    .map(|c| self.model.gap(self.covered(c, e)))
                    .max()
                    .unwrap_or_else(ExtRational::zero)
            })
            .collect();
        let good: Vec<bool> = gaps.iter().map(|g| self.negligible(g)).collect();
        self.cofinal(Property::Ubm, &good, &gaps)
            .unwrap_or_else(|| self.verdict(Property::Ubm, None))
    }

    /// Preimages of open sets lie in the field; on a finite range the open sets
    /// trace every union of zero-distance classes.
    fn conventional(&self) -> Result<OracleVerdict> {
        if !self.model.is_literal() {
            return Err(Error::WrongBackend("a finite ground set"));
        }
        let mut classes: Vec<Vec<Point>> = Vec::new();
        for p in self.model.points() {
            match classes.iter_mut().find(|c| self.inst.codomain.same_class(&c[0], &p)) {
                Some(c) => c.push(p),
                None => classes.push(vec![p]),
            }
        }
        if classes.len() > 16 {
            return Err(Error::ResourceCap(format!("{} classes", classes.len())));
        }
        for pick in 0u32..(1 << classes.len()) {
            let chosen: Vec<&Point> = (0..classes.len())
                .filter(|i| pick & (1 << i) != 0)
                .flat_map(|i| classes[i].iter())
                .collect();
            let m = self
                .model
                .where_value(|v| matches!(v, CellValue::At(p) if chosen.contains(&p)));
            if !self.model.in_field(m) {
                return Ok(self.verdict(Property::Conventional, Some(self.model.gap(m))));
            }
        }
        Ok(self.verdict(Property::Conventional, None))
    }

    fn real_values(&self) -> Result<Vec<Q>> {
        if !self.inst.is_real() {
            return Err(Error::InvalidFunction("the oracle needs a real-valued function".into()));
        }
        Ok(reals(&self.model.query_points()))
    }

    /// Good thresholds are dense iff every gap between consecutive values holds one;
    /// each gap is sampled at its quarter points.
    fn ray(&self, property: Property) -> Result<OracleVerdict> {
        let vs = self.real_values()?;
        let (left, right) = match property {
            Property::RayLeft => (true, false),
            Property::RayRight => (false, true),
            _ => (true, true),
        };
        let cost = |y: Q| {
            let mut worst = ExtRational::zero();
            if right {
                worst = worst.max(self.model.gap(self.model.where_value(|v| v.above(y))));
            }
            if left {
                worst = worst.max(self.model.gap(self.model.where_value(|v| v.below(y))));
            }
            worst
        };
        let mut gaps: Vec<(Q, Q)> = vs.windows(2).map(|w| (w[0], w[1])).collect();
        if let (Some(&lo), Some(&hi)) = (vs.first(), vs.last()) {
            gaps.push((lo - q(2), lo));
            gaps.push((hi, hi + q(2)));
        }
        for (lo, hi) in gaps {
            let samples = [qf(1, 4), qf(1, 2), qf(3, 4)].map(|t| lo + (hi - lo) * t);
            let costs: Vec<ExtRational> = samples.iter().map(|&y| cost(y)).collect();
            if costs.iter().all(|c| !self.negligible(c)) {
                let mut out = self.verdict(property, costs.into_iter().min());
                out.threshold = vec![lo, hi];
                return Ok(out);
            }
        }
        Ok(self.verdict(property, None))
    }

    /// Values of `f⁺` (or `f⁻`) cell by cell.
    fn part(&self, negative: bool) -> Vec<CellValue> {
        self.model
            .values
            .iter()
            .map(|v| match v {
                CellValue::At(p) => {
                    let x = p.real().expect("real value");
                    let x = if negative { -x } else { x };
                    CellValue::At(Point::Real(x.max(Q::zero())))
                }
                CellValue::Far(up) if *up != negative => CellValue::Far(true),
                CellValue::Far(_) => CellValue::At(Point::Real(Q::zero())),
            })
            .collect()
    }

    /// `inf` of the gap over `L ⊆ H ⊆ U`.
    pub fn sandwich_infimum(&self, lower: Mask, upper: Mask) -> ExtRational {
        if self.model.is_literal() {
            let free: Vec<usize> = cells(upper & !lower).collect();
            return (0u32..(1 << free.len()))
                .map(|pick| {
                    let h = free
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| pick & (1 << i) != 0)
                        .fold(lower, |h, (_, c)| h | (1 << c));
                    self.model.gap(h)
                })
                .min()
                .expect("at least the lower set");
        }
        // an atom can be left out when it misses L and taken whole when it lies in U
        ExtRational::sum(
            self.model
                .atoms
                .iter()
                .zip(&self.model.mass)
                .filter(|(a, _)| **a & lower != 0 && **a & !upper != 0)
                .map(|(_, w)| *w),
        )
    }

    fn greco(&self) -> Result<OracleVerdict> {
        self.real_values()?;
        for negative in [false, true] {
            let g = self.part(negative);
            let query = reals(
                &self
                    .model
                    .query_points()
                    .iter()
                    .map(|p| {
                        let x = p.real().expect("real value");
                        Point::Real(if negative { -x } else { x }.max(Q::zero()))
                    })
                    .collect::<Vec<_>>(),
            );
            let pos: Vec<Q> = query.into_iter().filter(|v| v.is_positive()).collect();
            let mut samples: BTreeSet<Q> = BTreeSet::new();
            let mut ends = vec![Q::zero()];
            ends.extend(pos.iter().copied());
            for w in ends.windows(2) {
                for t in [qf(1, 4), qf(1, 2), qf(3, 4)] {
                    samples.insert(w[0] + (w[1] - w[0]) * t);
                }
            }
            samples.extend(pos.iter().copied());
            let top = pos.last().copied().unwrap_or(Q::zero());
            samples.extend([top + qf(1, 2), top + q(1)]);
            let samples: Vec<Q> = samples.into_iter().collect();
            let above = |t: Q| {
                g.iter()
                    .enumerate()
                    .filter(|(_, v)| v.above(t))
                    .fold(0, |m, (i, _)| m | (1 << i))
            };
            for (j, &b) in samples.iter().enumerate() {
                for &a in &samples[j + 1..] {
                    let inf = self.sandwich_infimum(above(a), above(b));
                    if !self.negligible(&inf) {
                        let mut out = self.verdict(Property::Greco, Some(inf));
                        out.threshold = vec![a, b];
                        return Ok(out);
                    }
                }
            }
        }
        Ok(self.verdict(Property::Greco, None))
    }

    /// Checks the level pieces and the hazy errors of `s_1, .., s_16` for step `δ`;
    /// `None` when every piece lies in the completion and every grid error vanishes.
    pub fn regular_failure(&self, delta: Q) -> Option<ExtRational> {
        let eps: Vec<Q> = (0..=self.opts.grid).map(grid_epsilon).collect();
        let mut settled: Vec<Option<u32>> = vec![None; eps.len()];
        let mut last = vec![ExtRational::zero(); eps.len()];
        for i in 1..=REGULAR_ORACLE_DEPTH {
            let step = delta / q(1i64 << i);
            let top = i as i64 * (1i64 << i) - 1;
            let mut pieces: Vec<((bool, i64), Mask)> = Vec::new();
            let mut approx: Vec<Option<Q>> = Vec::with_capacity(self.model.len());
            for (c, v) in self.model.values.iter().enumerate() {
                let Some(x) = v.real() else {
                    approx.push(None);
                    continue;
                };
                let k = (x.abs() / step).ceil().to_integer() - 1;
                if !x.is_zero() && (1..=top).contains(&k) {
                    let key = (x.is_negative(), k);
                    match pieces.iter_mut().find(|(kk, _)| *kk == key) {
                        Some((_, m)) => *m |= 1 << c,
                        None => pieces.push((key, 1 << c)),
                    }
                    let y = step * q(k);
                    approx.push(Some(if x.is_negative() { -y } else { y }));
                } else {
                    approx.push(Some(Q::zero()));
                }
            }
            for (_, m) in &pieces {
                let g = self.model.gap(*m);
                if !self.negligible(&g) {
                    return Some(g);
                }
            }
            for (j, e) in eps.iter().enumerate() {
                let bad = self
                    .model
                    .values
                    .iter()
                    .zip(&approx)
                    .enumerate()
                    .filter(|(_, (v, s))| match (v.real(), s) {
                        (Some(x), Some(s)) => (s - x).abs() > *e,
                        _ => true,
                    })
                    .fold(0, |m, (c, _)| m | (1 << c));
                let err = self.model.outer(bad);
                if self.negligible(&err) {
                    settled[j].get_or_insert(i);
                } else {
                    settled[j] = None;
                }
                last[j] = err;
            }
        }
        settled
            .iter()
            .zip(last)
            .find(|(s, _)| s.is_none())
            .map(|(_, err)| err)
    }

    /// Regular T₁-measurability, trying the decider's step and a fixed list of steps.
    fn regular(&self) -> Result<OracleVerdict> {
        let vs = self.real_values()?;
        let mut scale = q(1);
        while vs.iter().any(|v| v.abs() > scale) {
            scale *= q(2);
        }
        let mut deltas: Vec<Q> = find_regular_delta(self.inst, REGULAR_DEPTH).into_iter().collect();
        deltas.extend([qf(2, 3), qf(5, 9), qf(7, 9), qf(13, 27), qf(25, 27)].map(|d| d * scale));
        let mut worst = ExtRational::INF;
        for d in deltas {
            match self.regular_failure(d) {
                None => return Ok(self.verdict(Property::Regular, None)),
                Some(inf) => worst = worst.min(inf),
            }
        }
        Ok(self.verdict(Property::Regular, Some(worst)))
    }

    pub fn decide(&self, property: Property) -> Result<OracleVerdict> {
        if property.needs_real() && !self.inst.is_real() {
            return Err(Error::InvalidFunction(format!("{property} needs a real-valued function")));
        }
        match property {
            Property::T1 => Ok(self.every_entourage(property, |e| self.t1_infimum(e))),
            Property::T2 => Ok(self.every_entourage(property, |e| self.t2_infimum(e))),
            Property::Smooth => Ok(self.every_entourage(property, |e| self.smooth_infimum(e))),
            Property::Base => Ok(self.base()),
            Property::Ubm => Ok(self.ubm()),
            Property::Conventional => self.conventional(),
            Property::RayLeft | Property::RayRight | Property::Ray => self.ray(property),
            Property::Greco => self.greco(),
            Property::Regular => self.regular(),
        }
    }

    /// Infimum of the definition of `property` at one entourage (T₁, T₂, smooth).
    pub fn infimum_at(&self, property: Property, e: &Entourage) -> Option<ExtRational> {
        match property {
            Property::T1 => Some(self.t1_infimum(e)),
            Property::T2 => Some(self.t2_infimum(e)),
            Property::Smooth => Some(self.smooth_infimum(e)),
            _ => None,
        }
    }

    /// Points where a closed-form profile disagrees with the literal boundary mass
    /// at `δ = 2^{-g}`.
    pub fn phi_disagreements(&self, profile: &PhiProfile) -> Result<Vec<Q>> {
        let vs = self.real_values()?;
        let delta = self.eps();
        let mut zs: BTreeSet<Q> = line_interest(&vs).into_iter().collect();
        for v in &vs {
            zs.insert(v + qf(1, 3));
        }
        Ok(zs
            .into_iter()
            .filter(|z| profile.value(z) != self.model.phi(*z, delta))
            .collect())
    }
}

/// Evaluates `property` on `inst` by its definition.
pub fn oracle_decide(property: Property, inst: &Instance, opts: OracleOptions) -> Result<OracleVerdict> {
    Oracle::new(inst, opts)?.decide(property)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: usize, p: Property) -> OracleVerdict {
        oracle_decide(p, &Instance::fixture(n).unwrap(), OracleOptions::default()).unwrap()
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        let counts: Vec<usize> = (0..=5).map(|n| partitions(&(0..n).map(|i| 1 << i).collect::<Vec<_>>()).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn fix2_t2_fails_with_two() {
        let inst = Instance::fixture(2).unwrap();
        let o = Oracle::new(&inst, OracleOptions::default()).unwrap();
        assert_eq!(o.t2_infimum(&Entourage::new([(0, qf(1, 2))])), ExtRational::from_int(2));
        assert!(!o.decide(Property::T2).unwrap().holds);
    }

    #[test]
    fn fix1_everything_holds() {
        for p in Property::ALL {
            assert!(run(1, p).holds, "{p}");
        }
    }

    #[test]
    fn fix3_conventional_fails_t2_holds() {
        assert!(!run(3, Property::Conventional).holds);
        assert!(run(3, Property::T2).holds);
    }

    #[test]
    fn fincof_fixtures_match_closed_forms() {
        assert!(!run(4, Property::T2).holds);
        assert!(run(4, Property::Base).holds);
        assert!(run(4, Property::RayRight).holds);
        assert!(!run(4, Property::Smooth).holds);
        let v = run(5, Property::Base);
        assert!(!v.holds);
        assert_eq!(v.infimum, ExtRational::INF);
        assert!(run(6, Property::Regular).holds);
        assert!(!run(4, Property::Regular).holds);
    }
}
