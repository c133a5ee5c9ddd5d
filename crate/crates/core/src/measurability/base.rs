use super::{base_entourages, class_preimages, is_affine, Certificate, Obstruction, PreimageWitness, Property, Verdict};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::uniform::Point;

const AFFINE_RULE: &str = "every bounded ball has a finite preimage";

fn witness(inst: &Instance, values: Vec<Point>, set: crate::cset::CSet) -> (bool, PreimageWitness) {
    let (member, sandwich) = inst.space.pj_membership(&set);
    (member, PreimageWitness { values, set, sandwich })
}

fn fmt_values(inst: &Instance, values: &[Point]) -> String {
    let names: Vec<String> = values.iter().map(|v| inst.codomain.fmt_point(v)).collect();
    format!("{{{}}}", names.join(", "))
}

/// Base measurability.
///
/// Small neighbourhoods of `y` meet the range exactly in the class of `y`, so the
/// neighbourhood base exists iff every class preimage lies in the completion.
pub fn decide_base(inst: &Instance) -> Verdict {
    if is_affine(inst) {
        return Verdict::holds(Property::Base, Certificate::ClosedForm { rule: AFFINE_RULE.into() });
    }
    let finest = base_entourages(inst).swap_remove(0);
    let mut sets = Vec::new();
    for (values, set) in class_preimages(inst) {
        let (member, w) = witness(inst, values, set);
        if !member {
            let mut ob = Obstruction::set(
                w.set.clone(),
                w.sandwich.gap_infimum,
                format!("small balls at {} pull back outside the completion", fmt_values(inst, &w.values)),
            );
            ob.entourage = Some(finest);
            return Verdict::fails(Property::Base, ob);
        }
        sets.push(w);
    }
    Verdict::holds(Property::Base, Certificate::Preimages { entourage: None, sets })
}

/// Uniform base measurability, checked on every ball trace of the finest base entourage.
pub fn decide_ubm(inst: &Instance) -> Verdict {
    if is_affine(inst) {
        return Verdict::holds(Property::Ubm, Certificate::ClosedForm { rule: AFFINE_RULE.into() });
    }
    let range = inst.func.range().expect("finite range");
    let finest = base_entourages(inst).swap_remove(0);
    let mut sets = Vec::new();
    for pattern in inst.codomain.ball_patterns(&range, &finest) {
        let values: Vec<Point> = pattern.iter().map(|&i| range[i].clone()).collect();
        let set = inst.func.preimage(|p| values.contains(p));
        let (member, w) = witness(inst, values, set);
        if !member {
            let mut ob = Obstruction::at(
                &finest,
                w.sandwich.gap_infimum,
                format!("the ball trace {} pulls back outside the completion", fmt_values(inst, &w.values)),
            );
            ob.witness = Some(w.set);
            return Verdict::fails(Property::Ubm, ob);
        }
        sets.push(w);
    }
    Verdict::holds(
        Property::Ubm,
        Certificate::Preimages {
            entourage: Some(finest),
            sets,
        },
    )
}

/// Conventional measurability on a finite ground set, whose field is a σ-field.
///
/// Open sets can isolate any union of classes of range points, so the preimage
/// of every open set is in the field iff every class preimage is.
pub fn decide_conventional(inst: &Instance) -> Result<Verdict> {
    if !inst.space.is_finite() {
        return Err(Error::WrongBackend("a finite ground set"));
    }
    let mut sets = Vec::new();
    for (values, set) in class_preimages(inst) {
        let (_, w) = witness(inst, values, set);
        if !inst.space.field_membership(&w.set) {
            let reason = format!(
                "an open set isolating {} pulls back outside the field",
                fmt_values(inst, &w.values)
            );
            return Ok(Verdict::fails(
                Property::Conventional,
                Obstruction::set(w.set, w.sandwich.gap_infimum, reason),
            ));
        }
        sets.push(w);
    }
    Ok(Verdict::holds(
        Property::Conventional,
        Certificate::Preimages { entourage: None, sets },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cset::CSet;
    use crate::rational::ExtRational;

    #[test]
    fn fixtures() {
        for n in [3, 4] {
            let inst = Instance::fixture(n).unwrap();
            assert!(decide_base(&inst).holds && decide_ubm(&inst).holds, "FIX{n}");
        }
        let fix5 = Instance::fixture(5).unwrap();
        for v in [decide_base(&fix5), decide_ubm(&fix5)] {
            assert!(!v.holds);
            assert_eq!(v.obstruction.unwrap().infimum, ExtRational::INF);
        }
    }

    #[test]
    fn conventional_fixtures() {
        let v = decide_conventional(&Instance::fixture(3).unwrap()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.obstruction.unwrap().witness, Some(CSet::singleton(0)));
        assert!(!decide_conventional(&Instance::fixture(2).unwrap()).unwrap().holds);
        assert!(decide_conventional(&Instance::fixture(1).unwrap()).unwrap().holds);
        assert!(matches!(
            decide_conventional(&Instance::fixture(4).unwrap()),
            Err(Error::WrongBackend(_))
        ));
    }
}
