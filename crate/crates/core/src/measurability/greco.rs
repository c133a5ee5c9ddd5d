use num_traits::{Signed, Zero};

use super::{require_real, tail_mass, Certificate, GrecoPair, Obstruction, Property, Verdict};
use crate::cset::CSet;
use crate::error::Result;
use crate::func::{Func, Tail};
use crate::instance::Instance;
use crate::rational::{q, qf, ExtRational, Q};
use crate::space::Backend;

/// One threshold from every class of `(0, ∞)` on which `g^{-1}(t, ∞)` is constant,
/// doubled so that pairs `b < a` inside a single class also occur.
fn thresholds(values: &[Q]) -> Vec<Q> {
    let positive: Vec<Q> = values.iter().copied().filter(|v| v.is_positive()).collect();
    let Some(&first) = positive.first() else {
        return vec![qf(1, 4), qf(3, 4)];
    };
    let mut out = vec![first * qf(1, 4), first * qf(3, 4)];
    for (i, &p) in positive.iter().enumerate() {
        out.push(p);
        match positive.get(i + 1) {
            Some(&next) => out.push((p + next) * qf(1, 2)),
            None => out.push(p + q(1)),
        }
    }
    out
}

/// The cheapest `H` in the completion with `lower ⊆ H ⊆ upper`, or the infimum
/// of the Peano–Jordan gap over all `H` in between.
fn sandwich(inst: &Instance, lower: &CSet, upper: &CSet) -> std::result::Result<CSet, ExtRational> {
    match inst.space.backend() {
        Backend::FiniteExplicit(s) => {
            let mut h = lower.clone();
            let mut gap = Q::zero();
            for (atom, m) in s.atoms().iter().zip(s.atom_mass()) {
                if m.is_zero() || atom.is_disjoint(lower) {
                    continue;
                }
                if atom.is_subset(upper) {
                    h = h.union(atom);
                } else {
                    gap += m;
                }
            }
            if gap.is_zero() {
                Ok(h)
            } else {
                Err(ExtRational::Finite(gap))
            }
        }
        Backend::FinCofNat(_) => {
            let tau = tail_mass(inst);
            if tau.is_zero() || lower.is_finite() {
                Ok(lower.clone())
            } else if upper.is_cofinite() {
                Ok(upper.clone())
            } else {
                Err(tau)
            }
        }
    }
}

fn part_values(g: &Func) -> Option<Vec<Q>> {
    if matches!(g.tail(), Some(Tail::Affine { .. })) {
        return None;
    }
    let vs = g.range().expect("finite range");
    Some(vs.iter().map(|p| p.real().expect("real value")).collect())
}

/// Greco measurability with respect to the completion, checked on `f⁺` and `f⁻`.
pub fn decide_greco(inst: &Instance) -> Result<Verdict> {
    require_real(Property::Greco, inst)?;
    let mut pairs = Vec::new();
    for negative_part in [false, true] {
        let g = if negative_part {
            inst.func.negative_part()
        } else {
            inst.func.positive_part()
        };
        // an affine part is eventually monotone, so its super-level sets are finite or cofinite
        let Some(values) = part_values(&g) else { continue };
        let ts = thresholds(&values);
        for (j, &b) in ts.iter().enumerate() {
            for &a in &ts[j + 1..] {
                let above = |t: Q| g.preimage(move |p| p.real().is_some_and(|v| v > t));
                let (lower, upper) = (above(a), above(b));
                match sandwich(inst, &lower, &upper) {
                    Ok(h) => {
                        let (member, pj) = inst.space.pj_membership(&h);
                        debug_assert!(member);
                        pairs.push(GrecoPair {
                            negative_part,
                            a,
                            b,
                            h,
                            sandwich: pj,
                        });
                    }
                    Err(inf) => {
                        let part = if negative_part { "f⁻" } else { "f⁺" };
                        let mut ob = Obstruction::set(
                            lower,
                            inf,
                            format!("no set of the completion lies between the super-level sets of {part}"),
                        );
                        ob.threshold = vec![a, b];
                        return Ok(Verdict::fails(Property::Greco, ob));
                    }
                }
            }
        }
    }
    Ok(Verdict::holds(Property::Greco, Certificate::Sandwiches { pairs }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        for n in [1, 3, 4, 6] {
            assert!(decide_greco(&Instance::fixture(n).unwrap()).unwrap().holds, "FIX{n}");
        }
        let v = decide_greco(&Instance::fixture(5).unwrap()).unwrap();
        let ob = v.obstruction.unwrap();
        assert_eq!(ob.threshold, vec![qf(3, 4), qf(1, 4)]);
        assert_eq!(ob.infimum, ExtRational::INF);
    }

    #[test]
    fn fix2_fails_between_one_and_two() {
        let v = decide_greco(&Instance::fixture(2).unwrap()).unwrap();
        let ob = v.obstruction.unwrap();
        assert_eq!(ob.threshold, vec![qf(3, 2), q(1)]);
        assert_eq!(ob.infimum, ExtRational::from_int(2));
        assert_eq!(ob.witness, Some(CSet::singleton(2)));
    }

    #[test]
    fn thresholds_cover_every_class() {
        assert_eq!(
            thresholds(&[q(0), q(1), q(3)]),
            vec![qf(1, 4), qf(3, 4), q(1), q(2), q(3), q(4)]
        );
    }
}
