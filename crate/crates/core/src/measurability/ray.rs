use super::{is_affine, require_real, Certificate, Obstruction, Property, RayCut, Verdict};
use crate::error::Result;
use crate::instance::Instance;
use crate::rational::{qf, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaySide {
    Left,
    Right,
    Both,
}

impl RaySide {
    fn property(self) -> Property {
        match self {
            RaySide::Left => Property::RayLeft,
            RaySide::Right => Property::RayRight,
            RaySide::Both => Property::Ray,
        }
    }

    fn sides(self) -> &'static [bool] {
        match self {
            RaySide::Left => &[true],
            RaySide::Right => &[false],
            RaySide::Both => &[false, true],
        }
    }
}

/// Sorted real values of a finite-range function.
pub(crate) fn real_range(inst: &Instance) -> Vec<Q> {
    let mut vs: Vec<Q> = inst
        .func
        .range()
        .expect("finite range")
        .iter()
        .map(|p| p.real().expect("real value"))
        .collect();
    vs.sort();
    vs
}

/// Ray measurability on the chosen side(s).
///
/// Between consecutive values `v_i < v_{i+1}` every right ray pulls back to
/// `f^{-1}(v_i, ∞)` and every left ray to `f^{-1}(-∞, v_{i+1})`; outside the
/// range the rays pull back to `∅` or `X`. The bad thresholds are therefore a
/// union of whole gaps plus finitely many values, and they have empty interior
/// iff every gap is good.
pub fn decide_ray(inst: &Instance, side: RaySide) -> Result<Verdict> {
    let property = side.property();
    require_real(property, inst)?;
    if is_affine(inst) {
        return Ok(Verdict::holds(
            property,
            Certificate::ClosedForm {
                rule: "rays pull back to finite or cofinite sets".into(),
            },
        ));
    }
    let values = real_range(inst);
    let mut cuts = Vec::new();
    for pair in values.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let sample = (lo + hi) * qf(1, 2);
        for &left in side.sides() {
            let set = if left {
                inst.func.preimage(|p| p.real().is_some_and(|v| v < sample))
            } else {
                inst.func.preimage(|p| p.real().is_some_and(|v| v > sample))
            };
            let (member, sandwich) = inst.space.pj_membership(&set);
            if !member {
                let ray = if left { "left" } else { "right" };
                let mut ob = Obstruction::set(
                    set,
                    sandwich.gap_infimum,
                    format!("every {ray} ray with endpoint in the open interval pulls back outside the completion"),
                );
                ob.threshold = vec![lo, hi];
                return Ok(Verdict::fails(property, ob));
            }
            cuts.push(RayCut {
                interval: vec![lo, hi],
                sample,
                left,
                set,
                sandwich,
            });
        }
    }
    Ok(Verdict::holds(property, Certificate::Rays { cuts }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, ExtRational};

    #[test]
    fn fixtures() {
        assert!(decide_ray(&Instance::fixture(4).unwrap(), RaySide::Right).unwrap().holds);
        let v = decide_ray(&Instance::fixture(5).unwrap(), RaySide::Right).unwrap();
        assert!(!v.holds);
        let ob = v.obstruction.unwrap();
        assert_eq!(ob.threshold, vec![q(0), q(1)]);
        assert_eq!(ob.infimum, ExtRational::INF);
        assert!(decide_ray(&Instance::fixture(3).unwrap(), RaySide::Both).unwrap().holds);
        assert!(!decide_ray(&Instance::fixture(2).unwrap(), RaySide::Left).unwrap().holds);
    }

    #[test]
    fn constant_holds_with_no_cuts() {
        let inst = Instance::fixture(6).unwrap();
        let inst = inst.with_func(inst.func.map(|_| crate::uniform::Point::Real(q(2))).unwrap()).unwrap();
        let v = decide_ray(&inst, RaySide::Both).unwrap();
        assert_eq!(v.certificate, Some(Certificate::Rays { cuts: vec![] }));
    }
}
