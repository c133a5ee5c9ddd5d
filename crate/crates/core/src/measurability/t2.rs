use num_traits::Zero;

use super::{base_entourages, tail_index, tail_mass, Certificate, Obstruction, PartitionLevel, Property, Verdict};
use crate::cset::CSet;
use crate::instance::Instance;
use crate::rational::ExtRational;
use crate::space::Backend;
use crate::uniform::{Entourage, Point};

/// Either a partition with `μ(A_0) = 0`, or the positive infimum of `μ(A_0)`.
fn level(inst: &Instance, e: &Entourage) -> Result<PartitionLevel, ExtRational> {
    let y = &inst.codomain;
    match inst.space.backend() {
        Backend::FiniteExplicit(s) => {
            let mut null_part = CSet::empty();
            let mut groups: Vec<(CSet, Vec<Point>)> = Vec::new();
            let mut infimum = ExtRational::zero();
            for (atom, m) in s.atoms().iter().zip(s.atom_mass()) {
                let img = inst.func.image(atom).expect("finite atom");
                if !y.is_small(&img, e) {
                    if m.is_zero() {
                        null_part = null_part.union(atom);
                    } else {
                        infimum = infimum + ExtRational::Finite(*m);
                    }
                    continue;
                }
                let slot = groups.iter_mut().find(|(_, vals)| {
                    let mut joint = vals.clone();
                    joint.extend(img.iter().cloned());
                    y.is_small(&joint, e)
                });
                match slot {
                    Some((set, vals)) => {
                        *set = set.union(atom);
                        vals.extend(img);
                    }
                    None => groups.push((atom.clone(), img)),
                }
            }
            if infimum.is_positive() {
                return Err(infimum);
            }
            Ok(PartitionLevel {
                entourage: e.clone(),
                null_part,
                parts: groups.into_iter().map(|(s, _)| s).collect(),
            })
        }
        Backend::FinCofNat(_) => {
            let n = tail_index(inst);
            let tail = CSet::from_index(n);
            let mut parts: Vec<CSet> = (0..n).map(CSet::singleton).collect();
            let small = inst.func.image(&tail).is_some_and(|img| y.is_small(&img, e));
            if small {
                parts.push(tail);
                return Ok(PartitionLevel {
                    entourage: e.clone(),
                    null_part: CSet::empty(),
                    parts,
                });
            }
            let tau = tail_mass(inst);
            if tau.is_positive() {
                return Err(tau);
            }
            Ok(PartitionLevel {
                entourage: e.clone(),
                null_part: tail,
                parts,
            })
        }
    }
}

/// T₂-measurability: for every base entourage a field partition with a null
/// exceptional block and small images on the others.
pub fn decide_t2(inst: &Instance) -> Verdict {
    let mut levels = Vec::new();
    for e in base_entourages(inst) {
        match level(inst, &e) {
            Ok(l) => levels.push(l),
            Err(inf) => {
                return Verdict::fails(
                    Property::T2,
                    Obstruction::at(&e, inf, "no field partition has a null exceptional block"),
                )
            }
        }
    }
    Verdict::holds(Property::T2, Certificate::Partitions { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, ExtRational};

    #[test]
    fn fix2_fails_at_half() {
        let v = decide_t2(&Instance::fixture(2).unwrap());
        assert!(!v.holds);
        let ob = v.obstruction.unwrap();
        assert_eq!(ob.entourage.unwrap().radius(0), Some(qf(1, 2)));
        assert_eq!(ob.infimum, ExtRational::from_int(2));
    }

    #[test]
    fn constant_function_gives_whole_space() {
        let inst = Instance::fixture(2).unwrap();
        let inst = inst.with_func(inst.func.map(|_| Point::Real(qf(3, 1))).unwrap()).unwrap();
        let v = decide_t2(&inst);
        let Some(Certificate::Partitions { levels }) = v.certificate else {
            panic!("expected partitions")
        };
        assert!(levels.iter().all(|l| l.parts == vec![CSet::below(3)]));
    }

    #[test]
    fn fincof_fixtures() {
        assert!(decide_t2(&Instance::fixture(6).unwrap()).holds);
        assert!(decide_t2(&Instance::fixture(3).unwrap()).holds);
        for n in [4, 5] {
            let v = decide_t2(&Instance::fixture(n).unwrap());
            assert!(!v.holds);
            assert_eq!(v.obstruction.unwrap().infimum, ExtRational::INF);
        }
    }
}
