use std::collections::BTreeMap;
use std::ops::Bound;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::phi::phi_profile;
use super::{is_affine, require_real, tail_mass, Certificate, Obstruction, Property, Verdict};
use crate::cset::CSet;
use crate::error::{Error, Result};
use crate::func::Interval;
use crate::instance::Instance;
use crate::rational::{q, ExtRational, Q};
use crate::space::PJSandwich;

/// Depth to which regular sequences are built and checked by default.
pub const REGULAR_DEPTH: u32 = 8;

/// `A_{ik}^+ = f^{-1}(y_{ik}, y_{i,k+1}]` or `A_{ik}^- = f^{-1}[-y_{i,k+1}, -y_{ik})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub depth: u32,
    pub k: i64,
    pub negative: bool,
    pub set: CSet,
    pub sandwich: PJSandwich,
}

/// Hazy error of `s_i`: `outer{|f| > i·δ}` and `outer{|s_i - f| > ε}` per `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthError {
    pub depth: u32,
    pub resolution: ExtRational,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub epsilons: Vec<Q>,
    pub errors: Vec<ExtRational>,
}

impl DepthError {
    pub fn is_zero(&self) -> bool {
        self.errors.iter().all(ExtRational::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularSequence {
    #[serde(with = "crate::rational::serde_q")]
    pub delta: Q,
    pub depth: u32,
    /// Nonempty pieces only.
    pub pieces: Vec<Piece>,
    pub errors: Vec<DepthError>,
    /// `lim_i outer{|s_i - f| > ε}`, the same for every `ε > 0`.
    pub limit: ExtRational,
}

impl RegularSequence {
    /// First piece outside the completion.
    pub fn bad_piece(&self) -> Option<&Piece> {
        self.pieces.iter().find(|p| !p.sandwich.gap_infimum.is_zero())
    }

    /// First depth from which every recorded hazy error vanishes.
    pub fn converged_at(&self) -> Option<u32> {
        let last_bad = self.errors.iter().rposition(|e| !e.is_zero());
        match last_bad {
            None => self.errors.first().map(|e| e.depth),
            Some(i) => self.errors.get(i + 1).map(|e| e.depth),
        }
    }

    /// `y_{ik}`.
    pub fn level(&self, i: u32, k: i64) -> Q {
        level(self.delta, i, k)
    }

    /// `s_i` at a point where `f` takes the value `v`.
    pub fn approx(&self, i: u32, v: Q) -> Q {
        approx(self.delta, i, v)
    }
}

fn step(delta: Q, i: u32) -> Q {
    delta / q(1i64 << i)
}

fn level(delta: Q, i: u32, k: i64) -> Q {
    step(delta, i) * q(k)
}

fn top_index(i: u32) -> i64 {
    i as i64 * (1i64 << i) - 1
}

/// Index `k` of the piece containing `v`, if any.
fn piece_index(delta: Q, i: u32, v: Q) -> Option<i64> {
    if v.is_zero() {
        return None;
    }
    let k = (v.abs() / step(delta, i)).ceil().to_integer() - 1;
    (1..=top_index(i)).contains(&k).then_some(k)
}

fn approx(delta: Q, i: u32, v: Q) -> Q {
    match piece_index(delta, i, v) {
        Some(k) if v.is_negative() => -level(delta, i, k),
        Some(k) => level(delta, i, k),
        None => Q::zero(),
    }
}

/// Values of `f` inside `[-r, r]` with their preimages, and the preimage of the rest.
fn split_values(inst: &Instance, r: Q) -> (BTreeMap<Q, CSet>, CSet) {
    let mut near: BTreeMap<Q, CSet> = BTreeMap::new();
    if is_affine(inst) {
        let window = Interval {
            lo: Bound::Included(-r),
            hi: Bound::Included(r),
        };
        let members = inst.func.preimage_interval(&window);
        for &n in members.members().expect("finite window") {
            let v = inst.func.value(n).real().expect("real value");
            let e = near.entry(v).or_insert_with(CSet::empty);
            *e = e.union(&CSet::singleton(n));
        }
        let far = inst
            .func
            .preimage_interval(&Interval::above(r))
            .union(&inst.func.preimage_interval(&Interval::below(-r)));
        return (near, far);
    }
    let mut far = CSet::empty();
    for y in inst.func.range().expect("finite range") {
        let v = y.real().expect("real value");
        let set = inst.func.preimage(|p| *p == y);
        if v.abs() <= r {
            near.insert(v, set);
        } else {
            far = far.union(&set);
        }
    }
    (near, far)
}

fn hazy_epsilons(inst: &Instance) -> Vec<Q> {
    let eps: Vec<Q> = inst
        .codomain
        .critical_thresholds(&inst.func.relevant_points())
        .into_iter()
        .filter(|e| e.is_positive())
        .collect();
    if eps.is_empty() {
        vec![q(1)]
    } else {
        eps
    }
}

/// The sequence `s_1, .., s_depth` for step `δ`, with piece membership and hazy errors.
pub fn build_regular_sequence(inst: &Instance, delta: Q, depth: u32) -> Result<RegularSequence> {
    require_real(Property::Regular, inst)?;
    if depth == 0 || !delta.is_positive() {
        return Err(Error::InvalidFunction("regular sequences need δ > 0 and depth ≥ 1".into()));
    }
    let epsilons = hazy_epsilons(inst);
    let mut pieces = Vec::new();
    let mut errors = Vec::new();
    for i in 1..=depth {
        let reach = q(i as i64) * delta;
        let (near, far) = split_values(inst, reach);
        let mut groups: BTreeMap<(bool, i64), CSet> = BTreeMap::new();
        for (v, set) in &near {
            if let Some(k) = piece_index(delta, i, *v) {
                let g = groups.entry((v.is_negative(), k)).or_insert_with(CSet::empty);
                *g = g.union(set);
            }
        }
        for ((negative, k), set) in groups {
            let (_, sandwich) = inst.space.pj_membership(&set);
            pieces.push(Piece {
                depth: i,
                k,
                negative,
                set,
                sandwich,
            });
        }
        let errs = epsilons
            .iter()
            .map(|eps| {
                let mut bad = CSet::empty();
                for (v, set) in &near {
                    if (approx(delta, i, *v) - v).abs() > *eps {
                        bad = bad.union(set);
                    }
                }
                let (_, far_big) = split_values(inst, reach.max(*eps));
                inst.space.outer(&bad.union(&far_big))
            })
            .collect();
        errors.push(DepthError {
            depth: i,
            resolution: inst.space.outer(&far),
            epsilons: epsilons.clone(),
            errors: errs,
        });
    }
    let limit = if is_affine(inst) {
        tail_mass(inst)
    } else {
        ExtRational::zero()
    };
    Ok(RegularSequence {
        delta,
        depth,
        pieces,
        errors,
        limit,
    })
}

fn max_abs(inst: &Instance) -> Q {
    inst.func
        .relevant_points()
        .iter()
        .filter_map(|p| p.real())
        .map(|v| v.abs())
        .max()
        .unwrap_or(Q::zero())
}

/// A step `δ = scale·p/3^j` none of whose dyadic multiples `k·2^{-i}·δ`, `i ≤ depth`,
/// carries positive boundary mass.
pub fn find_regular_delta(inst: &Instance, depth: u32) -> Result<Q> {
    let profile = phi_profile(inst)?;
    let m = max_abs(inst);
    let mut scale = q(1);
    while scale < m {
        scale *= q(2);
    }
    let dyadic = q(1i64 << depth.min(40));
    let mut tried = 0;
    for j in 1..=5u32 {
        let denom = 3i64.pow(j);
        for p in (denom + 7) / 8..=denom {
            if p % 3 == 0 {
                continue;
            }
            tried += 1;
            let delta = scale * Q::new(p, denom);
            let reach = q(depth as i64) * delta;
            let hits = profile
                .support
                .keys()
                .copied()
                .chain(profile.positive_points(-reach, reach))
                .filter(|z| !z.is_zero())
                .any(|z| (z.abs() / delta * dyadic).is_integer());
            if !hits {
                return Ok(delta);
            }
        }
    }
    Err(Error::NoRegularDelta { tried })
}

/// Smallest depth at which every level interval holds at most one value and no
/// positive interval reaches zero.
fn separation_depth(inst: &Instance, delta: Q) -> u32 {
    let Some(range) = inst.func.range() else { return 1 };
    let mut vs: Vec<Q> = range.iter().filter_map(|p| p.real()).collect();
    vs.sort();
    let gaps = vs.windows(2).map(|w| w[1] - w[0]);
    let mags = vs.iter().filter(|v| !v.is_zero()).map(|v| v.abs());
    let Some(min) = gaps.chain(mags).min() else { return 1 };
    let mut i = 1;
    while step(delta, i) >= min {
        i += 1;
    }
    i
}

/// Regular T₁-measurability, witnessed by the sequence for the first admissible `δ`.
///
/// Past the separation depth every piece is the preimage of a single value, so
/// no new sets appear and the checked prefix decides all pieces.
pub fn decide_regular(inst: &Instance) -> Result<Verdict> {
    require_real(Property::Regular, inst)?;
    let delta = find_regular_delta(inst, REGULAR_DEPTH)?;
    let depth = REGULAR_DEPTH.max(separation_depth(inst, delta));
    let seq = build_regular_sequence(inst, delta, depth)?;
    if let Some(p) = seq.bad_piece() {
        let (lo, hi) = (seq.level(p.depth, p.k), seq.level(p.depth, p.k + 1));
        let mut ob = Obstruction::set(
            p.set.clone(),
            p.sandwich.gap_infimum,
            format!("a level piece at depth {} lies outside the completion", p.depth),
        );
        ob.threshold = if p.negative { vec![-hi, -lo] } else { vec![lo, hi] };
        return Ok(Verdict::fails(Property::Regular, ob));
    }
    if seq.limit.is_positive() {
        let (_, far) = split_values(inst, q(depth as i64) * delta);
        let mut ob = Obstruction::set(far, seq.limit, "the hazy error never falls below the tail mass");
        ob.threshold = vec![delta];
        return Ok(Verdict::fails(Property::Regular, ob));
    }
    Ok(Verdict::holds(
        Property::Regular,
        Certificate::Regular {
            delta,
            depth: seq.converged_at().unwrap_or(depth),
            pieces: seq.pieces.len(),
            limit: seq.limit,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn zero_function_has_no_error() {
        let inst = Instance::fixture(1).unwrap();
        let seq = build_regular_sequence(&inst, q(1), 6).unwrap();
        assert!(seq.pieces.is_empty());
        assert!(seq.errors.iter().all(DepthError::is_zero));
        assert_eq!(seq.converged_at(), Some(1));
    }

    #[test]
    fn fix2_delta_and_failure() {
        let inst = Instance::fixture(2).unwrap();
        assert_eq!(find_regular_delta(&inst, REGULAR_DEPTH).unwrap(), qf(2, 3));
        let seq = build_regular_sequence(&inst, qf(2, 3), 6).unwrap();
        assert!(seq.converged_at().unwrap() <= 6);
        assert!(!decide_regular(&inst).unwrap().holds);
    }

    #[test]
    fn fix4_error_never_vanishes() {
        let inst = Instance::fixture(4).unwrap();
        let seq = build_regular_sequence(&inst, qf(2, 3), 5).unwrap();
        assert!(seq.bad_piece().is_none());
        assert!(seq.errors.iter().all(|e| e.resolution == ExtRational::INF));
        let v = decide_regular(&inst).unwrap();
        assert_eq!(v.obstruction.unwrap().infimum, ExtRational::INF);
    }

    #[test]
    fn levels_are_half_open() {
        // (y_{1,1}, y_{1,2}] = (1/2, 1] for δ = 1
        assert_eq!(approx(q(1), 1, q(1)), qf(1, 2));
        assert_eq!(approx(q(1), 1, qf(1, 2)), q(0));
        assert_eq!(approx(q(1), 1, -q(1)), -qf(1, 2));
        // beyond i·δ the approximation is zero
        assert_eq!(approx(q(1), 1, q(2)), q(0));
    }

    #[test]
    fn delta_avoids_weighted_values() {
        let inst = Instance::fixture(6).unwrap();
        let d = find_regular_delta(&inst, REGULAR_DEPTH).unwrap();
        assert!(!(q(5) / d * q(256)).is_integer());
        assert!(decide_regular(&inst).unwrap().holds);
    }
}
