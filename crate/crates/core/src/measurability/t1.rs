use num_traits::Zero;

use super::{base_entourages, tail_index, tail_mass, Certificate, Obstruction, Property, SimpleLevel, Verdict};
use crate::cset::CSet;
use crate::instance::Instance;
use crate::rational::ExtRational;
use crate::space::Backend;
use crate::uniform::Entourage;

/// A simple function whose disagreement set is null, or the positive infimum of
/// the outer charge of that set.
fn level(inst: &Instance, e: &Entourage) -> Result<SimpleLevel, ExtRational> {
    let y = &inst.codomain;
    let mut pieces = Vec::new();
    let mut exceptional = CSet::empty();
    match inst.space.backend() {
        Backend::FiniteExplicit(s) => {
            let mut infimum = ExtRational::zero();
            for (atom, m) in s.atoms().iter().zip(s.atom_mass()) {
                let img = inst.func.image(atom).expect("finite atom");
                match y.find_center(&img, e) {
                    Some(c) => pieces.push((atom.clone(), c)),
                    None if m.is_zero() => {
                        exceptional = exceptional.union(atom);
                        pieces.push((atom.clone(), img[0].clone()));
                    }
                    None => infimum = infimum + ExtRational::Finite(*m),
                }
            }
            if infimum.is_positive() {
                return Err(infimum);
            }
        }
        Backend::FinCofNat(_) => {
            let n = tail_index(inst);
            pieces.extend((0..n).map(|i| (CSet::singleton(i), inst.func.value(i))));
            let tail = CSet::from_index(n);
            let center = inst.func.image(&tail).and_then(|img| y.find_center(&img, e));
            match center {
                Some(c) => pieces.push((tail, c)),
                None => {
                    let tau = tail_mass(inst);
                    if tau.is_positive() {
                        return Err(tau);
                    }
                    pieces.push((tail.clone(), inst.func.value(n)));
                    exceptional = tail;
                }
            }
        }
    }
    Ok(SimpleLevel {
        entourage: e.clone(),
        pieces,
        exceptional,
    })
}

/// T₁-measurability: for every base entourage a field-simple function that is
/// `E`-close to `f` off a set of outer charge zero.
///
/// Decided by ball centres rather than diameters, independently of T₂.
pub fn decide_t1(inst: &Instance) -> Verdict {
    let mut levels = Vec::new();
    for e in base_entourages(inst) {
        match level(inst, &e) {
            Ok(l) => levels.push(l),
            Err(inf) => {
                return Verdict::fails(
                    Property::T1,
                    Obstruction::at(&e, inf, "some positive atom has no ball centre covering its image"),
                )
            }
        }
    }
    Verdict::holds(Property::T1, Certificate::SimpleFunctions { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::func::Func;
    use crate::rational::q;
    use crate::space::SpaceDescriptor;
    use crate::uniform::Point;

    #[test]
    fn fixtures_match_expectations() {
        assert!(decide_t1(&Instance::fixture(1).unwrap()).holds);
        assert!(!decide_t1(&Instance::fixture(4).unwrap()).holds);
        assert!(decide_t1(&Instance::fixture(6).unwrap()).holds);
    }

    #[test]
    fn centre_covers_far_pair() {
        // one positive atom mapped onto {p, r}; the ball of radius 2 at q covers both
        let inst = Instance::new(
            SpaceDescriptor::Finite {
                points: vec!["x".into(), "y".into()],
                generators: vec![],
                weights: vec![q(1), q(0)],
            },
            fixtures::codomain_descriptor(7).unwrap(),
            Func::Table(vec![Point::Label(0), Point::Label(2)]),
        )
        .unwrap();
        let e = Entourage::new([(0, q(2))]);
        let l = level(&inst, &e).unwrap();
        assert_eq!(l.pieces[0].1, Point::Label(1));
        assert!(!decide_t1(&inst).holds);
    }
}
