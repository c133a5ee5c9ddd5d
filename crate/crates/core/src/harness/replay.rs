//! Replays decider certificates and obstructions against an oracle model.

use num_traits::Zero;

use super::model::{reals, CellValue, Mask};
use super::oracle::{Oracle, OracleOptions};
use crate::cset::CSet;
use crate::measurability::{Certificate, Obstruction, PreimageWitness, Property, Verdict};
use crate::rational::{ExtRational, Q};
use crate::space::PJSandwich;
use crate::uniform::{Entourage, Point};

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

struct Replay<'o, 'a> {
    o: &'o Oracle<'a>,
}

impl Replay<'_, '_> {
    fn mask(&self, a: &CSet) -> std::result::Result<Mask, String> {
        self.o.model.mask(a)
    }

    fn field_set(&self, a: &CSet) -> std::result::Result<Mask, String> {
        let m = self.mask(a)?;
        ensure(self.o.model.in_field(m), || format!("{a} is not a field set"))?;
        Ok(m)
    }

    /// Disjoint field sets covering the model.
    fn partition(&self, sets: &[&CSet]) -> std::result::Result<Vec<Mask>, String> {
        let mut seen: Mask = 0;
        let mut out = Vec::new();
        for s in sets {
            let m = self.field_set(s)?;
            ensure(m & seen == 0, || format!("{s} overlaps an earlier block"))?;
            seen |= m;
            out.push(m);
        }
        ensure(seen == self.o.model.full(), || "the blocks miss some points".into())?;
        Ok(out)
    }

    fn sandwich(&self, set: Mask, sw: &PJSandwich) -> Check {
        let (lo, hi) = (self.field_set(&sw.lower)?, self.field_set(&sw.upper)?);
        ensure(subset(lo, set) && subset(set, hi), || "the sandwich does not enclose its set".into())?;
        let gap = self.o.model.gap(set);
        ensure(gap == sw.gap_infimum, || {
            format!("sandwich gap {} but the model gives {gap}", sw.gap_infimum)
        })?;
        ensure(self.o.model.charge(hi & !lo) >= gap, || "the sandwich beats the infimum".into())
    }

    fn member(&self, set: &CSet, sw: &PJSandwich) -> std::result::Result<Mask, String> {
        let m = self.mask(set)?;
        self.sandwich(m, sw)?;
        ensure(self.o.member(m), || format!("{set} is not in the completion"))?;
        Ok(m)
    }

    fn with_values(&self, values: &[Point]) -> Mask {
        self.o
            .model
            .where_value(|v| matches!(v, CellValue::At(p) if values.contains(p)))
    }

    /// Cells where the simple function misses `E[f(x)]`.
    fn misses(&self, pieces: &[(Mask, &Point)], e: &Entourage) -> Mask {
        pieces
            .iter()
            .fold(0, |acc, (m, c)| acc | (m & !self.o.covered(c, e)))
    }

    fn certificate(&self, property: Property, cert: &Certificate) -> Check {
        let o = self.o;
        let model = &o.model;
        match cert {
            Certificate::Partitions { levels } => {
                let mut parts = Vec::new();
                for l in levels {
                    let mut sets = vec![&l.null_part];
                    sets.extend(&l.parts);
                    let masks = self.partition(&sets)?;
                    ensure(model.charge(masks[0]).is_zero(), || "the exceptional block is charged".into())?;
                    for (m, s) in masks[1..].iter().zip(&l.parts) {
                        ensure(o.small(*m, &l.entourage), || format!("f({s}) is not small"))?;
                    }
                    parts.push(masks[1..].to_vec());
                }
                for e in o.entourages() {
                    ensure(parts.iter().any(|ps| ps.iter().all(|m| o.small(*m, e))), || {
                        format!("no level serves {e:?}")
                    })?;
                }
                Ok(())
            }
            Certificate::SimpleFunctions { levels } => {
                let mut all = Vec::new();
                for l in levels {
                    let sets: Vec<&CSet> = l.pieces.iter().map(|(s, _)| s).collect();
                    let masks = self.partition(&sets)?;
                    let pieces: Vec<(Mask, &Point)> = masks.into_iter().zip(l.pieces.iter().map(|(_, c)| c)).collect();
                    let ex = self.mask(&l.exceptional)?;
                    ensure(model.outer(ex).is_zero(), || "the exceptional set is charged".into())?;
                    ensure(subset(self.misses(&pieces, &l.entourage), ex), || {
                        "the simple function strays outside the exceptional set".into()
                    })?;
                    all.push(pieces);
                }
                for e in o.entourages() {
                    ensure(all.iter().any(|ps| model.outer(self.misses(ps, e)).is_zero()), || {
                        format!("no level serves {e:?}")
                    })?;
                }
                Ok(())
            }
            Certificate::Cover {
                blocks,
                uncovered,
                uncovered_outer,
            } => {
                let u = self.mask(uncovered)?;
                ensure(model.outer(u) == *uncovered_outer && uncovered_outer.is_zero(), || {
                    "the uncovered set is charged".into()
                })?;
                let mut covered = 0;
                for b in blocks {
                    ensure(b.len() <= 1 || o.entourages().iter().all(|e| o.inst.codomain.is_small(b, e)), || {
                        "a block is not small".into()
                    })?;
                    covered |= self.with_values(b);
                }
                ensure(subset(model.full() & !covered, u), || "some points are neither covered nor exceptional".into())
            }
            Certificate::Preimages { entourage, sets } => self.preimages(property, entourage.as_ref(), sets),
            Certificate::Rays { cuts } => {
                let vs = reals(&model.points());
                for c in cuts {
                    let (lo, hi) = (c.interval[0], c.interval[1]);
                    ensure(lo < c.sample && c.sample < hi, || "the sample leaves its interval".into())?;
                    let want = model.where_value(|v| if c.left { v.below(c.sample) } else { v.above(c.sample) });
                    ensure(self.mask(&c.set)? == want, || format!("{} is not the ray preimage", c.set))?;
                    self.member(&c.set, &c.sandwich)?;
                }
                let sides: &[bool] = match property {
                    Property::RayLeft => &[true],
                    Property::RayRight => &[false],
                    _ => &[true, false],
                };
                for w in vs.windows(2) {
                    for left in sides {
                        ensure(
                            cuts.iter().any(|c| c.left == *left && c.interval[0] <= w[0] && w[1] <= c.interval[1]),
                            || format!("no cut between {} and {}", w[0], w[1]),
                        )?;
                    }
                }
                Ok(())
            }
            Certificate::Sandwiches { pairs } => {
                for p in pairs {
                    let g = self.part_values(p.negative_part);
                    let above = |t: Q| above_mask(&g, t);
                    let h = self.member(&p.h, &p.sandwich)?;
                    ensure(p.b < p.a && subset(above(p.a), h) && subset(h, above(p.b)), || {
                        format!("{} is not between the super-level sets at {} and {}", p.h, p.a, p.b)
                    })?;
                }
                Ok(())
            }
            Certificate::Regular { delta, limit, .. } => {
                ensure(limit.is_zero(), || "the hazy limit is charged".into())?;
                match o.regular_failure(*delta) {
                    None => Ok(()),
                    Some(v) => Err(format!("the sequence for step {delta} fails with {v}")),
                }
            }
            Certificate::ClosedForm { rule } => {
                let v = o.decide(property).map_err(|e| e.to_string())?;
                ensure(v.holds, || format!("the rule '{rule}' is refuted by the oracle"))
            }
        }
    }

    fn preimages(&self, property: Property, entourage: Option<&Entourage>, sets: &[PreimageWitness]) -> Check {
        let o = self.o;
        let mut masks = Vec::new();
        for w in sets {
            let m = self.mask(&w.set)?;
            ensure(m == self.with_values(&w.values), || format!("{} is not the preimage of its values", w.set))?;
            if property == Property::Conventional {
                ensure(o.model.in_field(m), || format!("{} is not a field set", w.set))?;
            } else {
                self.member(&w.set, &w.sandwich)?;
            }
            masks.push(m);
        }
        let pts = o.model.points();
        match entourage {
            None => {
                for p in &pts {
                    let class = self.with_values(&pts.iter().filter(|q| o.inst.codomain.same_class(p, q)).cloned().collect::<Vec<_>>());
                    ensure(masks.contains(&class), || "a class preimage is missing".into())?;
                }
            }
            Some(e) => {
                for c in o.inst.codomain.ball_patterns(&pts, e) {
                    let vals: Vec<Point> = c.iter().map(|&i| pts[i].clone()).collect();
                    ensure(masks.contains(&self.with_values(&vals)), || "a ball trace is missing".into())?;
                }
            }
        }
        Ok(())
    }

    fn part_values(&self, negative: bool) -> Vec<CellValue> {
        self.o
            .model
            .values
            .iter()
            .map(|v| match v {
                CellValue::At(p) => {
                    let x = p.real().expect("real value");
                    CellValue::At(Point::Real(if negative { -x } else { x }.max(Q::zero())))
                }
                CellValue::Far(up) if *up != negative => CellValue::Far(true),
                CellValue::Far(_) => CellValue::At(Point::Real(Q::zero())),
            })
            .collect()
    }

    fn obstruction(&self, property: Property, ob: &Obstruction) -> Check {
        let o = self.o;
        let positive = |v: &ExtRational| !o.member_value(v);
        // a set outside the field may still sit in the completion
        if property != Property::Conventional {
            ensure(positive(&ob.infimum), || format!("the infimum {} is negligible", ob.infimum))?;
        }
        let agree = |got: ExtRational| {
            ensure(got == ob.infimum, || format!("the oracle gives {got}, the decider {}", ob.infimum))
        };
        match property {
            Property::T1 | Property::T2 | Property::Smooth => {
                let e = ob.entourage.as_ref().ok_or("no entourage")?;
                agree(o.infimum_at(property, e).expect("entourage property"))
            }
            Property::Base | Property::Ubm => {
                let w = ob.witness.as_ref().ok_or("no witness")?;
                agree(o.model.gap(self.mask(w)?))
            }
            Property::Conventional => {
                let w = self.mask(ob.witness.as_ref().ok_or("no witness")?)?;
                ensure(!o.model.in_field(w), || "the witness is a field set".into())?;
                agree(o.model.gap(w))
            }
            Property::RayLeft | Property::RayRight | Property::Ray => {
                let w = self.mask(ob.witness.as_ref().ok_or("no witness")?)?;
                let (lo, hi) = (ob.threshold[0], ob.threshold[1]);
                let mid = (lo + hi) / Q::from_integer(2);
                let left = o.model.where_value(|v| v.below(mid));
                let right = o.model.where_value(|v| v.above(mid));
                ensure(w == left || w == right, || "the witness is not a ray preimage".into())?;
                // no value lies strictly inside the interval, so every threshold there gives the same set
                ensure(
                    o.model.values.iter().all(|v| v.real().is_none_or(|x| x <= lo || x >= hi)),
                    || "a value lies inside the bad interval".into(),
                )?;
                agree(o.model.gap(w))
            }
            Property::Greco => {
                let w = self.mask(ob.witness.as_ref().ok_or("no witness")?)?;
                let (a, b) = (ob.threshold[0], ob.threshold[1]);
                let found = [false, true].into_iter().find_map(|neg| {
                    let g = self.part_values(neg);
                    (above_mask(&g, a) == w).then(|| o.sandwich_infimum(w, above_mask(&g, b)))
                });
                agree(found.ok_or("the witness is not a super-level set")?)
            }
            Property::Regular => {
                let w = self.mask(ob.witness.as_ref().ok_or("no witness")?)?;
                if ob.threshold.len() == 1 {
                    ensure(o.regular_failure(ob.threshold[0]).is_some(), || "the oracle accepts the step".into())?;
                    agree(o.model.outer(w))
                } else {
                    agree(o.model.gap(w))
                }
            }
        }
    }
}

fn above_mask(values: &[CellValue], t: Q) -> Mask {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.above(t))
        .fold(0, |m, (i, _)| m | (1 << i))
}

impl Oracle<'_> {
    fn member_value(&self, v: &ExtRational) -> bool {
        super::model::negligible(v, self.opts.grid)
    }
}

/// Sets named by a verdict's evidence.
fn evidence_sets(v: &Verdict) -> Vec<&CSet> {
    let mut out: Vec<&CSet> = Vec::new();
    match &v.certificate {
        Some(Certificate::Partitions { levels }) => {
            for l in levels {
                out.push(&l.null_part);
                out.extend(&l.parts);
            }
        }
        Some(Certificate::SimpleFunctions { levels }) => {
            for l in levels {
                out.push(&l.exceptional);
                out.extend(l.pieces.iter().map(|(a, _)| a));
            }
        }
        Some(Certificate::Cover { uncovered, .. }) => out.push(uncovered),
        Some(Certificate::Preimages { sets, .. }) => {
            for w in sets {
                out.extend([&w.set, &w.sandwich.lower, &w.sandwich.upper]);
            }
        }
        Some(Certificate::Rays { cuts }) => {
            for c in cuts {
                out.extend([&c.set, &c.sandwich.lower, &c.sandwich.upper]);
            }
        }
        Some(Certificate::Sandwiches { pairs }) => {
            for p in pairs {
                out.extend([&p.h, &p.sandwich.lower, &p.sandwich.upper]);
            }
        }
        Some(Certificate::Regular { .. } | Certificate::ClosedForm { .. }) | None => {}
    }
    if let Some(w) = v.obstruction.as_ref().and_then(|o| o.witness.as_ref()) {
        out.push(w);
    }
    out
}

/// Checks a verdict's certificate or obstruction against the oracle's model.
///
/// Evidence reaching past a truncated model's window is replayed on a model
/// wide enough to hold it.
pub fn replay(oracle: &Oracle, verdict: &Verdict) -> Check {
    let horizon = evidence_sets(verdict).iter().map(|a| a.horizon()).max().unwrap_or(0);
    if oracle.model.cutoff().is_some_and(|k| horizon > k) {
        let opts = OracleOptions {
            cutoff: horizon,
            ..oracle.opts
        };
        let wide = Oracle::new(oracle.inst, opts).map_err(|e| format!("no model holds the evidence: {e}"))?;
        return replay_on(&wide, verdict);
    }
    replay_on(oracle, verdict)
}

fn replay_on(oracle: &Oracle, verdict: &Verdict) -> Check {
    let r = Replay { o: oracle };
    match (&verdict.certificate, &verdict.obstruction) {
        (Some(c), None) if verdict.holds => r.certificate(verdict.property, c),
        (None, Some(ob)) if !verdict.holds => r.obstruction(verdict.property, ob),
        _ => Err("the verdict carries mismatched evidence".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::oracle::OracleOptions;
    use crate::instance::Instance;
    use crate::measurability::decide;

    #[test]
    fn fixture_verdicts_replay() {
        for n in 1..=6 {
            let inst = Instance::fixture(n).unwrap();
            let o = Oracle::new(&inst, OracleOptions::default()).unwrap();
            for p in Property::ALL {
                let Ok(v) = decide(p, &inst) else { continue };
                assert_eq!(replay(&o, &v), Ok(()), "FIX{n} {p}");
            }
        }
    }

    #[test]
    fn tampered_infimum_is_caught() {
        let inst = Instance::fixture(2).unwrap();
        let o = Oracle::new(&inst, OracleOptions::default()).unwrap();
        let mut v = decide(Property::T2, &inst).unwrap();
        v.obstruction.as_mut().unwrap().infimum = ExtRational::from_int(1);
        assert!(replay(&o, &v).is_err());
    }

    #[test]
    fn tampered_partition_is_caught() {
        let inst = Instance::fixture(1).unwrap();
        let o = Oracle::new(&inst, OracleOptions::default()).unwrap();
        let mut v = decide(Property::T2, &inst).unwrap();
        if let Some(Certificate::Partitions { levels }) = v.certificate.as_mut() {
            levels[0].parts.clear();
        }
        assert!(replay(&o, &v).is_err());
    }

    #[test]
    fn evidence_past_the_window_is_replayed_on_a_wider_model() {
        let inst = crate::instance::parse_instance(
            "[space]\nkind = fincof\nprefix = [1/2]\nwinf = 0\nminf = 1\n\n\
             [codomain]\nkind = rational-line\n\n\
             [function]\nprefix = [-2]\ntail = affine 1/2 0\n",
        )
        .unwrap();
        let o = Oracle::new(&inst, OracleOptions::default()).unwrap();
        let v = decide(Property::Regular, &inst).unwrap();
        let w = v.obstruction.as_ref().unwrap().witness.as_ref().unwrap();
        assert!(w.horizon() > o.model.cutoff().unwrap());
        assert_eq!(replay(&o, &v), Ok(()));
    }
}
