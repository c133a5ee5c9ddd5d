//! Verification suites: each checks a family of implications on every enumerated
//! instance in scope, replaying all evidence it relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate_instances, InstanceParams};
use super::oracle::{Oracle, OracleOptions};
use super::replay::replay;
use crate::error::{Error, Result};
use crate::func::{Func, Interval};
use crate::instance::Instance;
use crate::measurability::{
    build_eta_zeta, build_regular_sequence, decide, find_regular_delta, phi_profile, PhiProfile, Property,
    REGULAR_DEPTH,
};
use crate::rational::{q, qf, ExtRational, Q};
use crate::uniform::{CodomainDescriptor, Point, UniformCodomain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Suite {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    S8,
    S9,
    S10,
    S11,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::S1,
        Suite::S2,
        Suite::S3,
        Suite::S4,
        Suite::S5,
        Suite::S6,
        Suite::S7,
        Suite::S8,
        Suite::S9,
        Suite::S10,
        Suite::S11,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Suite::S1 => "T1 iff T2, and T2 implies smooth",
            Suite::S2 => "conventional measurability on finite fields",
            Suite::S3 => "uniform base measurability, base measurability and T2",
            Suite::S4 => "ray subbases of a T2-measurable function",
            Suite::S5 => "preimages of sets bounded by zero boundary mass",
            Suite::S6 => "shape of the boundary mass limit",
            Suite::S7 => "ray, Greco and base measurability of real functions",
            Suite::S8 => "equivalence of the ray-type notions under density",
            Suite::S9 => "equivalence of the T1-type notions under density",
            Suite::S10 => "inheritance along coarser uniformities, weak families and products",
            Suite::S11 => "deciders agree with the definitional oracles",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Unknown {
                kind: "suite",
                name: s.to_string(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// The instance in the text format, ready for `parse_instance`.
    pub instance: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Instances in scope.
    pub instances: usize,
    /// Implications and equalities evaluated.
    pub checks: usize,
    /// Enumerated instances outside the suite's hypotheses.
    pub skipped: usize,
    /// Decider verdicts whose evidence was replayed on an oracle model.
    pub replayed: usize,
    /// Replays that were rejected; each is also a violation.
    #[serde(default)]
    pub replay_failures: usize,
    /// Named counts of the constructions a suite exercised.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tallies: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub wall: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite       {} ({})", self.suite, self.suite.describe())?;
        writeln!(f, "instances   {}", self.instances)?;
        writeln!(f, "skipped     {}", self.skipped)?;
        writeln!(f, "checks      {}", self.checks)?;
        writeln!(f, "replayed    {}", self.replayed)?;
        for (k, n) in &self.tallies {
            writeln!(f, "  {k:<10}{n}")?;
        }
        writeln!(f, "violations  {}", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "--- {}", v.detail)?;
            write!(f, "{}", v.instance)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Outcome {
    in_scope: bool,
    checks: usize,
    replayed: usize,
    replay_failures: usize,
    tallies: BTreeMap<&'static str, usize>,
    violations: Vec<Violation>,
}

impl Outcome {
    fn tally(&mut self, key: &'static str) {
        *self.tallies.entry(key).or_default() += 1;
    }

    fn violate(&mut self, inst: &Instance, detail: impl Into<String>) {
        self.violations.push(Violation {
            instance: inst.to_text(),
            detail: detail.into(),
        });
    }
}

/// Verdicts for one instance and the instances derived from it.
struct Ctx<'a> {
    inst: &'a Instance,
    opts: OracleOptions,
    cache: BTreeMap<Property, Option<bool>>,
    out: Outcome,
}

fn show(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "n/a",
    }
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a Instance, opts: OracleOptions) -> Self {
        Ctx {
            inst,
            opts,
            cache: BTreeMap::new(),
            out: Outcome {
                in_scope: true,
                ..Default::default()
            },
        }
    }

    /// Decides `p` on `inst` and replays the evidence; `None` when `p` does not apply.
    fn judge(&mut self, inst: &Instance, p: Property) -> Option<bool> {
        let v = decide(p, inst).ok()?;
        match Oracle::new(inst, self.opts) {
            Ok(o) => {
                self.out.replayed += 1;
                if let Err(e) = replay(&o, &v) {
                    self.out.replay_failures += 1;
                    self.out.violate(inst, format!("{p} evidence does not replay: {e}"));
                }
            }
            Err(e) => self.out.violate(inst, format!("{p} evidence cannot be modelled: {e}")),
        }
        Some(v.holds)
    }

    fn get(&mut self, p: Property) -> Option<bool> {
        if let Some(v) = self.cache.get(&p) {
            return *v;
        }
        let v = self.judge(self.inst, p);
        self.cache.insert(p, v);
        v
    }

    fn implies_on(&mut self, inst: &Instance, what: &str, a: Option<bool>, b: Option<bool>) {
        if let (Some(a), Some(b)) = (a, b) {
            self.out.checks += 1;
            if a && !b {
                self.out.violate(inst, format!("{what}: premise holds, conclusion fails"));
            }
        }
    }

    fn implies(&mut self, what: &str, a: Option<bool>, b: Option<bool>) {
        let inst = self.inst;
        self.implies_on(inst, what, a, b);
    }

    fn all_equal(&mut self, what: &str, named: &[(&str, Option<bool>)]) {
        let known: Vec<bool> = named.iter().filter_map(|(_, v)| *v).collect();
        if known.len() < 2 {
            return;
        }
        self.out.checks += 1;
        if known.iter().any(|v| *v != known[0]) {
            let parts: Vec<String> = named.iter().map(|(n, v)| format!("{n} {}", show(*v))).collect();
            let inst = self.inst;
            self.out.violate(inst, format!("{what}: {}", parts.join(", ")));
        }
    }

    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.out.checks += 1;
        if !ok {
            let inst = self.inst;
            self.out.violate(inst, detail());
        }
    }

    fn skip(&mut self) {
        self.out.in_scope = false;
    }
}

fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    Some(a? && b?)
}

fn or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    Some(a? || b?)
}

/// Sorted distinct values a real-valued function takes on its prefix, tail, and the
/// first few affine tail points.
fn sample_values(f: &Func) -> Vec<Q> {
    let mut vs: Vec<Q> = match f.range() {
        Some(r) => r.iter().filter_map(Point::real).collect(),
        None => (0..f.prefix_len() + 8).filter_map(|n| f.value(n).real()).collect(),
    };
    vs.sort();
    vs.dedup();
    vs
}

/// Thresholds around `vs`: the values, their neighbours at distance 1/2, and midpoints.
fn thresholds(vs: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = vs.to_vec();
    for v in vs {
        out.push(v - qf(1, 2));
        out.push(v + qf(1, 2));
    }
    for w in vs.windows(2) {
        out.push((w[0] + w[1]) * qf(1, 2));
    }
    out.sort();
    out.dedup();
    out
}

/// Real tables on a finite codomain: every distance-to-a-point function, for every pseudometric.
fn distance_tables(c: &UniformCodomain) -> Vec<Vec<Q>> {
    let pts = c.finite_points().expect("finite codomain");
    let mut out = Vec::new();
    for pm in 0..c.pm_count() {
        for y0 in &pts {
            let t: Vec<Q> = pts.iter().map(|y| c.distance(pm, y0, y)).collect();
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// `g ∘ f` as a real-valued instance, for a table `g` over the codomain points.
fn compose(inst: &Instance, g: &[Q]) -> Option<Instance> {
    let pts = inst.codomain.finite_points()?;
    let h = inst
        .func
        .map(|p| Point::Real(g[pts.iter().position(|y| y == p).expect("codomain point")]))
        .ok()?;
    inst.with_codomain(CodomainDescriptor::RationalLine, h).ok()
}

fn s1(c: &mut Ctx) {
    let (t1, t2, smooth) = (c.get(Property::T1), c.get(Property::T2), c.get(Property::Smooth));
    c.all_equal("T1 iff T2", &[("t1", t1), ("t2", t2)]);
    c.implies("T2 implies smooth", t2, smooth);
}

fn s2(c: &mut Ctx) {
    if !c.inst.space.is_finite() {
        return c.skip();
    }
    let conv = c.get(Property::Conventional);
    let ubm = c.get(Property::Ubm);
    let t2 = c.get(Property::T2);
    let base = c.get(Property::Base);
    let bounded = Some(c.inst.space.is_bounded());
    let complete = c.inst.space.completeness_check().ok();
    c.implies("conventional implies ubm", conv, ubm);
    c.implies("conventional and bounded imply T2", and(conv, bounded), t2);
    c.implies("complete and base imply conventional", and(complete, base), conv);
    c.implies("complete and T2 imply conventional", and(complete, t2), conv);
}

fn s3(c: &mut Ctx) {
    let (ubm, base, smooth, t2) = (
        c.get(Property::Ubm),
        c.get(Property::Base),
        c.get(Property::Smooth),
        c.get(Property::T2),
    );
    c.implies("ubm implies base", ubm, base);
    // every catalogued codomain is uniformly locally compact
    c.implies("base implies ubm", base, ubm);
    c.implies("ubm and smooth imply T2", and(ubm, smooth), t2);
}

fn s4(c: &mut Ctx) {
    if c.inst.codomain.finite_points().is_none() {
        return c.skip();
    }
    let t2 = c.get(Property::T2);
    let base = c.get(Property::Base);
    let ubm = c.get(Property::Ubm);
    let tables = distance_tables(&c.inst.codomain);
    let n = tables[0].len();
    let mut families: Vec<Vec<Vec<Q>>> = vec![tables.clone(), vec![vec![Q::zero(); n]]];
    families.extend(tables.into_iter().map(|t| vec![t]));
    for fam in families {
        let ez = match build_eta_zeta(c.inst, &fam) {
            Ok(ez) => ez,
            Err(e) => {
                let inst = c.inst;
                c.out.violate(inst, format!("eta/zeta construction failed: {e}"));
                continue;
            }
        };
        c.implies("T2 with an eta subbase implies base", and(t2, Some(ez.eta_subbase)), base);
        c.implies(
            "T2 with an entourage subbase implies ubm",
            and(t2, Some(ez.entourage_subbase)),
            ubm,
        );
        c.implies("zeta subbase implies eta subbase", Some(ez.zeta_subbase), Some(ez.eta_subbase));
        c.implies(
            "zeta entourage subbase implies entourage subbase",
            Some(ez.zeta_entourage_subbase),
            Some(ez.entourage_subbase),
        );
    }
}

/// Checks `h^{-1}(-∞, z) ∈ F̄` and, when `boundary`, `h^{-1}{z}` null in `F̄`.
fn check_sublevel(c: &mut Ctx, h: &Instance, label: &str, boundary: bool, positive_only: bool) {
    let Ok(profile) = phi_profile(h) else { return };
    for z in thresholds(&sample_values(&h.func)) {
        if !profile.is_zero(&z) || (positive_only && !z.is_positive()) {
            continue;
        }
        let below = h.func.preimage_interval(&Interval::below(z));
        let (member, _) = h.space.pj_membership(&below);
        c.expect(member, || format!("{label}: preimage of the ray below {z} is outside the completion"));
        if boundary {
            let edge = h.func.preimage_interval(&Interval::point(z));
            let (member, _) = h.space.pj_membership(&edge);
            let null = h.space.outer(&edge).is_zero();
            c.expect(member && null, || format!("{label}: boundary preimage at {z} is not null"));
        }
    }
}

fn s5(c: &mut Ctx) {
    let t2 = c.get(Property::T2) == Some(true);
    let ubm = c.get(Property::Ubm) == Some(true);
    if c.inst.is_real() {
        if !(t2 || ubm) {
            return c.skip();
        }
        if t2 {
            let neg = c.inst.with_func(c.inst.func.affine_image(q(-1), Q::zero())).expect("negation");
            let id = c.inst.clone();
            check_sublevel(c, &id, "identity", true, false);
            check_sublevel(c, &neg, "negation", true, false);
        }
        // |f| < z is bounded, hence totally bounded
        if let Ok(abs) = c.inst.func.map(|p| Point::Real(p.real().expect("real value").abs())) {
            let abs = c.inst.with_func(abs).expect("absolute value");
            check_sublevel(c, &abs, "absolute value", true, true);
        }
    } else if c.inst.codomain.finite_points().is_some() {
        // every subset of a finite codomain is totally bounded and clopen
        if !(t2 || ubm) {
            return c.skip();
        }
        for g in distance_tables(&c.inst.codomain) {
            if let Some(h) = compose(c.inst, &g) {
                check_sublevel(c, &h, "distance table", false, false);
            }
        }
    } else {
        c.skip()
    }
}

/// The properties of the boundary mass limit, read on `profile` at sampled points.
fn phi_shape(c: &mut Ctx, profile: &PhiProfile, values: &[Q], grid: u32) {
    let zs = thresholds(values);
    let deltas: Vec<Q> = (0..=16).map(|k| Q::new(1, 1i64 << k)).collect();
    for z in &zs {
        let v = profile.value(z);
        if v.is_zero() {
            for g in 0..=grid {
                let eps = ExtRational::Finite(Q::new(1, 1i64 << g));
                let ok = deltas.iter().any(|d| {
                    profile
                        .positive_points(z - d, z + d)
                        .iter()
                        .all(|w| profile.value(w) < eps)
                });
                c.expect(ok, || format!("phi is not small near its zero {z}"));
            }
        } else if !v.is_infinite() {
            let ok = deltas.iter().any(|d| {
                let others = profile
                    .positive_points(z - d, z + d)
                    .into_iter()
                    .filter(|w| w != z && (w - z).abs() < *d);
                v > ExtRational::sum(others.map(|w| profile.value(&w)))
            });
            c.expect(ok, || format!("phi at {z} does not dominate its neighbours"));
        }
        if !v.is_infinite() {
            let d = deltas
                .iter()
                .find(|d| profile.infinite.iter().all(|w| (w - z).abs() >= **d));
            c.expect(d.is_some(), || format!("phi is infinite arbitrarily close to {z}"));
            if let Some(d) = d {
                c.expect(profile.zero_in(z - d, z + d).is_some(), || format!("no zero of phi near {z}"));
            }
        }
    }
    let mut ends: Vec<Q> = zs.clone();
    ends.extend(profile.infinite.iter().copied());
    ends.sort();
    ends.dedup();
    let lo = ends.first().copied().unwrap_or(Q::zero()) - q(1);
    let hi = ends.last().copied().unwrap_or(Q::zero()) + q(1);
    let mut intervals: Vec<(Q, Q)> = vec![(lo, hi)];
    let mut all = vec![lo];
    all.extend(ends);
    all.push(hi);
    intervals.extend(all.windows(2).map(|w| (w[0], w[1])));
    for (a, b) in intervals {
        let split = |k: i64| -> Vec<(Q, Q)> {
            (0..k).map(|j| (a + (b - a) * qf(j, k), a + (b - a) * qf(j + 1, k))).collect()
        };
        let (coarse, fine) = (split(8), split(64));
        let finite_everywhere = |ps: &[(Q, Q)]| ps.iter().all(|(x, y)| profile.finite_in(*x, *y).is_some());
        let zero_everywhere = |ps: &[(Q, Q)]| ps.iter().all(|(x, y)| profile.zero_in(*x, *y).is_some());
        c.all_equal(
            &format!("boundary mass statements on ({a}, {b})"),
            &[
                ("no infinite interval", Some(finite_everywhere(&coarse))),
                ("upper sets nowhere dense", Some(zero_everywhere(&coarse) && finite_everywhere(&fine))),
                ("zeros comeagre", Some(zero_everywhere(&fine))),
                ("zeros dense", Some(zero_everywhere(&coarse))),
                ("finite values dense", Some(finite_everywhere(&fine))),
            ],
        );
    }
}

fn s6(c: &mut Ctx) {
    if !c.inst.is_real() {
        return c.skip();
    }
    let profile = phi_profile(c.inst).expect("real instance");
    let values = sample_values(&c.inst.func);
    phi_shape(c, &profile, &values, c.opts.grid);
    match Oracle::new(c.inst, c.opts).and_then(|o| o.phi_disagreements(&profile)) {
        Ok(bad) => c.expect(bad.is_empty(), || format!("phi closed form disagrees with the model at {bad:?}")),
        Err(e) => {
            let inst = c.inst;
            c.out.violate(inst, format!("phi cannot be modelled: {e}"));
        }
    }
}

fn s7(c: &mut Ctx) {
    if !c.inst.is_real() {
        return c.skip();
    }
    let ray = c.get(Property::Ray);
    let left = c.get(Property::RayLeft);
    let right = c.get(Property::RayRight);
    let greco = c.get(Property::Greco);
    let base = c.get(Property::Base);
    let ubm = c.get(Property::Ubm);
    c.implies("ray implies left and right ray", ray, and(left, right));
    c.implies("a one-sided ray implies Greco", or(left, right), greco);
    c.implies("Greco implies base", greco, base);
    c.all_equal("ubm iff base", &[("ubm", ubm), ("base", base)]);
    let plus = c.inst.with_func(c.inst.func.positive_part()).expect("positive part");
    let minus = c.inst.with_func(c.inst.func.negative_part()).expect("negative part");
    let parts = and(c.judge(&plus, Property::Ray), c.judge(&minus, Property::Ray));
    c.all_equal("ray iff both parts ray", &[("f", ray), ("f+ and f-", parts)]);
    for (a, b) in [(q(-1), q(0)), (q(2), q(1)), (q(1), q(-1))] {
        let psi = c.inst.with_func(c.inst.func.affine_image(a, b)).expect("affine image");
        for (p, v) in [(Property::Ray, ray), (Property::Greco, greco), (Property::Base, base)] {
            let w = c.judge(&psi, p);
            c.implies_on(&psi, &format!("{p} survives {a}·f + {b}"), v, w);
        }
    }
    if c.inst.space.is_finite() {
        let conv = c.get(Property::Conventional);
        c.implies("conventional on a sigma-field implies ray", conv, ray);
        let complete = c.inst.space.completeness_check().ok();
        c.implies("complete and ray imply conventional", and(complete, ray), conv);
    }
}

fn density(c: &mut Ctx) -> bool {
    let dense = phi_profile(c.inst).expect("real instance").finite_set_is_dense();
    c.out.checks += 1;
    dense
}

fn s8(c: &mut Ctx) {
    if !c.inst.is_real() || !density(c) {
        return c.skip();
    }
    let plus = c.inst.with_func(c.inst.func.positive_part()).expect("positive part");
    let minus = c.inst.with_func(c.inst.func.negative_part()).expect("negative part");
    let parts = and(c.judge(&plus, Property::Base), c.judge(&minus, Property::Base));
    let top = sample_values(&c.inst.func).last().copied().unwrap_or(Q::zero()) + q(1);
    let up = c.inst.func.preimage_interval(&Interval::above(top));
    let some_ray = c.inst.space.pj_membership(&up).0;
    let base = c.get(Property::Base);
    let named = [
        ("ray", c.get(Property::Ray)),
        ("left ray", c.get(Property::RayLeft)),
        ("right ray", c.get(Property::RayRight)),
        ("Greco", c.get(Property::Greco)),
        ("parts base", parts),
        ("base with a ray", and(base, Some(some_ray))),
    ];
    c.all_equal("ray-type equivalence", &named);
}

fn s9(c: &mut Ctx) {
    if !c.inst.is_real() || !density(c) {
        return c.skip();
    }
    let smooth = c.get(Property::Smooth);
    let t2 = c.get(Property::T2);
    let named = [
        ("regular", c.get(Property::Regular)),
        ("T1", c.get(Property::T1)),
        ("T2", t2),
        ("ray and smooth", and(c.get(Property::Ray), smooth)),
        ("base and smooth", and(c.get(Property::Base), smooth)),
    ];
    c.all_equal("T1-type equivalence", &named);
    if t2 == Some(true) {
        let inst = c.inst;
        let built = find_regular_delta(inst, REGULAR_DEPTH).and_then(|d| build_regular_sequence(inst, d, REGULAR_DEPTH));
        match built {
            Ok(seq) => {
                let ok = seq.bad_piece().is_none()
                    && if inst.space.is_finite() {
                        seq.converged_at().is_some_and(|d| d <= REGULAR_DEPTH)
                    } else {
                        seq.limit.is_zero()
                    };
                c.expect(ok, || format!("the regular sequence for step {} does not converge", seq.delta));
            }
            Err(e) => c.out.violate(inst, format!("no regular sequence: {e}")),
        }
    }
}

fn two_point() -> CodomainDescriptor {
    CodomainDescriptor::FiniteMetric {
        points: vec!["p".into(), "q".into()],
        distances: vec![vec![q(0), q(1)], vec![q(1), q(0)]],
    }
}

fn weak(tables: Vec<Vec<Q>>) -> CodomainDescriptor {
    CodomainDescriptor::WeakFamily {
        points: vec!["p".into(), "q".into(), "r".into()],
        tables,
    }
}

const SURJECTIONS: [[usize; 3]; 6] = [[0, 0, 1], [0, 1, 0], [1, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]];

fn s10(c: &mut Ctx) {
    let inst = c.inst;
    let mut scoped = false;
    match &inst.codomain_desc {
        CodomainDescriptor::FiniteMetric { points, .. } if points.len() == 3 => {
            scoped = true;
            let t2 = c.get(Property::T2);
            let smooth = c.get(Property::Smooth);
            for h in SURJECTIONS {
                // pseudometric pulled back from the two-point metric: strictly coarser
                let table = vec![h.iter().map(|&i| q(i as i64)).collect()];
                let coarse = inst.with_codomain(weak(table), inst.func.clone()).expect("coarser codomain");
                c.out.tally("coarsening");
                let (ct2, csm) = (c.judge(&coarse, Property::T2), c.judge(&coarse, Property::Smooth));
                c.implies_on(&coarse, "T2 survives coarsening", t2, ct2);
                c.implies_on(&coarse, "smoothness survives coarsening", smooth, csm);
                let pushed = inst.with_codomain(two_point(), inst.func.relabel(&h)).expect("pushforward");
                let pt2 = c.judge(&pushed, Property::T2);
                c.implies_on(&pushed, "T2 passes to h∘f", t2, pt2);
                let pubm = c.judge(&pushed, Property::Ubm);
                let both = inst.with_codomain(weak(vec![h.iter().map(|&i| q(i as i64)).collect()]), inst.func.clone());
                let bubm = both.ok().and_then(|b| c.judge(&b, Property::Ubm));
                c.implies_on(&pushed, "ubm of h∘f gives ubm for the weak uniformity of h", pubm, bubm);
            }
        }
        CodomainDescriptor::WeakFamily { tables, .. } if tables.len() >= 2 => {
            scoped = true;
            let ubm = c.get(Property::Ubm);
            let base = c.get(Property::Base);
            let t2 = c.get(Property::T2);
            let mut each_ubm = Some(true);
            let mut each_base = Some(true);
            for t in tables {
                let single = inst.with_codomain(weak(vec![t.clone()]), inst.func.clone()).expect("single table");
                let (su, sb, st) = (
                    c.judge(&single, Property::Ubm),
                    c.judge(&single, Property::Base),
                    c.judge(&single, Property::T2),
                );
                each_ubm = and(each_ubm, su);
                each_base = and(each_base, sb);
                c.implies_on(&single, "T2 passes to each pseudometric", t2, st);
            }
            c.implies("ubm for each pseudometric gives ubm", each_ubm, ubm);
            c.implies("base for each pseudometric gives base", each_base, base);
        }
        CodomainDescriptor::Product(fs) if fs.len() == 2 => {
            scoped = true;
            c.out.tally("product");
            let ubm = c.get(Property::Ubm);
            let t2 = c.get(Property::T2);
            let mut each = Some(true);
            for (k, fd) in fs.iter().enumerate() {
                let proj = inst.with_codomain(fd.clone(), inst.func.project(k)).expect("projection");
                let (pu, pt) = (c.judge(&proj, Property::Ubm), c.judge(&proj, Property::T2));
                each = and(each, pu);
                c.implies_on(&proj, "T2 passes to each factor", t2, pt);
            }
            c.implies("componentwise ubm gives product ubm", each, ubm);
        }
        _ => {}
    }
    // products on ℕ: pair a label sequence with a parity sequence
    if matches!(inst.codomain_desc, CodomainDescriptor::FiniteMetric { .. }) && !inst.space.is_finite() {
        scoped = true;
        let parity = Func::sequence(
            vec![],
            crate::func::Tail::Periodic(vec![Point::Real(q(0)), Point::Real(q(1))]),
        )
        .expect("parity");
        if let Ok(paired) = inst.func.pair(&parity) {
            let desc = CodomainDescriptor::Product(vec![inst.codomain_desc.clone(), CodomainDescriptor::RationalLine]);
            let prod = inst.with_codomain(desc, paired).expect("product");
            c.out.tally("product");
            let line = inst.with_codomain(CodomainDescriptor::RationalLine, parity).expect("parity instance");
            let each = and(c.get(Property::Ubm), c.judge(&line, Property::Ubm));
            let pu = c.judge(&prod, Property::Ubm);
            c.implies_on(&prod, "componentwise ubm gives product ubm", each, pu);
            let pt = c.judge(&prod, Property::T2);
            let ft = c.get(Property::T2);
            c.implies_on(&prod, "T2 passes to each factor", pt, ft);
        }
    }
    if !scoped {
        c.skip();
    }
}

fn s11(c: &mut Ctx) {
    let inst = c.inst;
    let cutoffs: Vec<u64> = if inst.space.is_finite() {
        vec![c.opts.cutoff]
    } else {
        vec![c.opts.cutoff, 4 * c.opts.cutoff]
    };
    let oracles: Vec<Oracle> = match cutoffs
        .iter()
        .map(|&cutoff| Oracle::new(inst, OracleOptions { cutoff, ..c.opts }))
        .collect::<Result<Vec<_>>>()
    {
        Ok(o) => o,
        Err(e) => return c.out.violate(inst, format!("no oracle model: {e}")),
    };
    for o in &oracles {
        c.out.tally(match (inst.space.is_finite(), o.opts.cutoff == c.opts.cutoff) {
            (true, _) => "finite",
            (false, true) => "fincof-1x",
            (false, false) => "fincof-4x",
        });
    }
    for p in Property::ALL {
        let d = decide(p, inst);
        let mut seen: Option<bool> = None;
        for o in &oracles {
            let ov = o.decide(p);
            match (&d, &ov) {
                (Ok(d), Ok(ov)) => {
                    c.out.checks += 1;
                    c.out.replayed += 1;
                    if d.holds != ov.holds {
                        c.out.violate(
                            inst,
                            format!("{p}: decider {} but oracle {} at cutoff {}", show(Some(d.holds)), show(Some(ov.holds)), o.opts.cutoff),
                        );
                    }
                    if let Err(e) = replay(o, d) {
                        c.out.replay_failures += 1;
                        c.out.violate(inst, format!("{p} evidence does not replay at cutoff {}: {e}", o.opts.cutoff));
                    }
                    if seen.is_some_and(|s| s != ov.holds) {
                        c.out.violate(inst, format!("{p}: the oracle verdict moves with the cutoff"));
                    }
                    seen = Some(ov.holds);
                }
                (Err(_), Err(_)) => {}
                (Ok(_), Err(Error::ResourceCap(_))) => {}
                (a, b) => c.out.violate(
                    inst,
                    format!("{p}: decider {:?} but oracle {:?}", a.as_ref().map(|v| v.holds), b.as_ref().map(|v| v.holds)),
                ),
            }
        }
    }
}

fn check(suite: Suite, c: &mut Ctx) {
    match suite {
        Suite::S1 => s1(c),
        Suite::S2 => s2(c),
        Suite::S3 => s3(c),
        Suite::S4 => s4(c),
        Suite::S5 => s5(c),
        Suite::S6 => s6(c),
        Suite::S7 => s7(c),
        Suite::S8 => s8(c),
        Suite::S9 => s9(c),
        Suite::S10 => s10(c),
        Suite::S11 => s11(c),
    }
}

/// Runs `suite` on the given instances.
pub fn run_suite_on(suite: Suite, instances: &[Instance], opts: OracleOptions) -> SuiteReport {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = instances
        .par_iter()
        .map(|inst| {
            let mut c = Ctx::new(inst, opts);
            check(suite, &mut c);
            c.out
        })
        .collect();
    let mut report = SuiteReport {
        suite,
        instances: 0,
        checks: 0,
        skipped: 0,
        replayed: 0,
        replay_failures: 0,
        tallies: BTreeMap::new(),
        violations: Vec::new(),
        wall: Duration::ZERO,
    };
    for o in outcomes {
        if o.in_scope {
            report.instances += 1;
        } else {
            report.skipped += 1;
        }
        report.checks += o.checks;
        report.replayed += o.replayed;
        report.replay_failures += o.replay_failures;
        for (k, n) in o.tallies {
            *report.tallies.entry(k.to_string()).or_default() += n;
        }
        report.violations.extend(o.violations);
    }
    report.wall = start.elapsed();
    report
}

/// Runs `suite` on every instance within `params`.
pub fn run_suite(suite: Suite, params: &InstanceParams, opts: OracleOptions) -> Result<SuiteReport> {
    let instances = enumerate_instances(params)?;
    Ok(run_suite_on(suite, &instances, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixtures() -> Vec<Instance> {
        (1..=6).map(|n| Instance::fixture(n).unwrap()).collect()
    }

    #[test]
    fn ids_parse() {
        assert_eq!("s10".parse::<Suite>().unwrap(), Suite::S10);
        assert!("S12".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_passes_on_fixtures() {
        for s in Suite::ALL {
            let r = run_suite_on(s, &fixtures(), OracleOptions::default());
            assert!(r.passed(), "{s}: {:?}", r.violations);
        }
    }

    #[test]
    fn violations_are_reported() {
        let inst = Instance::fixture(1).unwrap();
        let mut c = Ctx::new(&inst, OracleOptions::default());
        c.implies("x", Some(true), Some(false));
        assert_eq!(c.out.violations.len(), 1);
        assert!(c.out.violations[0].detail.starts_with("x:"));
    }
}
