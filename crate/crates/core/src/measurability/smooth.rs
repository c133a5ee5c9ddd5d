use super::{base_entourages, is_affine, tail_index, tail_mass, Certificate, Obstruction, Property, Verdict};
use crate::cset::CSet;
use crate::instance::Instance;
use crate::rational::ExtRational;

/// Smoothness: outside finitely many `E`-small sets the preimage has outer charge zero.
///
/// Singletons are small for every entourage, so a finite range is always covered;
/// an unbounded affine tail leaves an infinite set whose outer charge is the tail mass.
pub fn decide_smooth(inst: &Instance) -> Verdict {
    let (blocks, uncovered) = match inst.func.range() {
        Some(range) => (range, CSet::empty()),
        None => {
            let n = tail_index(inst);
            let tau = tail_mass(inst);
            if tau.is_positive() {
                let e = base_entourages(inst).swap_remove(0);
                return Verdict::fails(
                    Property::Smooth,
                    Obstruction::at(&e, tau, "an unbounded tail escapes every finite family of small sets"),
                );
            }
            let mut head: Vec<_> = (0..n).map(|i| inst.func.value(i)).collect();
            head.sort();
            head.dedup();
            (head, CSet::from_index(n))
        }
    };
    debug_assert!(is_affine(inst) || uncovered.is_empty());
    let uncovered_outer = inst.space.outer(&uncovered);
    debug_assert_eq!(uncovered_outer, ExtRational::zero());
    Verdict::holds(
        Property::Smooth,
        Certificate::Cover {
            blocks: blocks.into_iter().map(|p| vec![p]).collect(),
            uncovered,
            uncovered_outer,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        for n in [1, 2, 3, 5, 6] {
            assert!(decide_smooth(&Instance::fixture(n).unwrap()).holds, "FIX{n}");
        }
        let v = decide_smooth(&Instance::fixture(4).unwrap());
        assert!(!v.holds);
        assert_eq!(v.obstruction.unwrap().infimum, ExtRational::INF);
    }
}
