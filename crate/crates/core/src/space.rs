//! Charge spaces: ground set, field of sets, charge, outer/inner charges and the
//! Peano–Jordan completion.

use serde::{Deserialize, Serialize};

use crate::cset::CSet;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, ExtRational, Q};
use num_traits::{Signed, Zero};

/// Default upper bound on the number of sets in a finite field.
pub const FIELD_CAP: usize = 4096;

/// Unvalidated description of a charge space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceDescriptor {
    /// Finite ground set; the field is generated by `generators` and the charge
    /// of a field set is the sum of the point weights it contains.
    Finite {
        points: Vec<String>,
        generators: Vec<Vec<usize>>,
        weights: Vec<Q>,
    },
    /// ℕ with the finite–cofinite field. `n` weighs `prefix[n]` below the prefix
    /// length and `w_inf` above it; cofinite sets additionally carry `m_inf`.
    FinCofNat {
        prefix: Vec<Q>,
        w_inf: Q,
        m_inf: ExtRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteExplicit {
    names: Vec<String>,
    generators: Vec<CSet>,
    weights: Vec<Q>,
    atoms: Vec<CSet>,
    atom_mass: Vec<Q>,
}

impl FiniteExplicit {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[CSet] {
        &self.generators
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn atoms(&self) -> &[CSet] {
        &self.atoms
    }

    pub fn atom_mass(&self) -> &[Q] {
        &self.atom_mass
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Index of the atom containing point `x`.
    pub fn atom_of(&self, x: u64) -> usize {
        self.atoms
            .iter()
            .position(|a| a.contains(x))
            .expect("atoms partition the ground set")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCofNat {
    prefix: Vec<Q>,
    w_inf: Q,
    m_inf: ExtRational,
}

impl FinCofNat {
    pub fn prefix(&self) -> &[Q] {
        &self.prefix
    }

    pub fn w_inf(&self) -> Q {
        self.w_inf
    }

    pub fn m_inf(&self) -> ExtRational {
        self.m_inf
    }

    pub fn weight(&self, n: u64) -> Q {
        self.prefix.get(n as usize).copied().unwrap_or(self.w_inf)
    }

    /// Charge carried by every cofinite set beyond its prefix weights.
    pub fn tail_mass(&self) -> ExtRational {
        if self.w_inf.is_positive() {
            ExtRational::INF
        } else {
            self.m_inf
        }
    }

    /// `Σ_{n ∈ A} w_n`, infinite when `A` is infinite and `w_inf > 0`.
    pub fn weight_sum(&self, a: &CSet) -> ExtRational {
        match a.members() {
            Some(ms) => ExtRational::Finite(ms.iter().map(|&n| self.weight(n)).sum()),
            None if self.w_inf.is_positive() => ExtRational::INF,
            None => ExtRational::Finite(
                (0..self.prefix.len() as u64)
                    .filter(|&n| a.contains(n))
                    .map(|n| self.prefix[n as usize])
                    .sum(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    FiniteExplicit(FiniteExplicit),
    FinCofNat(FinCofNat),
}

/// `(X, F, μ)` with exact values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeSpace {
    backend: Backend,
}

/// Field sets `lower ⊆ A ⊆ upper` realizing the Peano–Jordan gap of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PJSandwich {
    pub lower: CSet,
    pub upper: CSet,
    pub gap_infimum: ExtRational,
}

fn check_weight(w: &Q) -> Result<()> {
    if w.is_negative() {
        Err(Error::NegativeWeight(fmt_q(w)))
    } else {
        Ok(())
    }
}

/// Atoms of the field generated by `generators` over `{0..n-1}`, by partition refinement.
fn refine_atoms(n: u64, generators: &[CSet]) -> Vec<CSet> {
    let mut blocks = if n == 0 { vec![] } else { vec![CSet::below(n)] };
    for g in generators {
        blocks = blocks
            .into_iter()
            .flat_map(|b| [b.intersection(g), b.difference(g)])
            .filter(|b| !b.is_empty())
            .collect();
    }
    blocks.sort_by_key(|b| b.members().and_then(|m| m.first().copied()));
    blocks
}

pub fn build_space(desc: &SpaceDescriptor) -> Result<ChargeSpace> {
    build_space_with_cap(desc, FIELD_CAP)
}

pub fn build_space_with_cap(desc: &SpaceDescriptor, cap: usize) -> Result<ChargeSpace> {
    match desc {
        SpaceDescriptor::Finite {
            points,
            generators,
            weights,
        } => {
            let n = points.len();
            if weights.len() != n {
                return Err(Error::InvalidFunction(format!(
                    "expected {n} point weights, got {}",
                    weights.len()
                )));
            }
            weights.iter().try_for_each(check_weight)?;
            let mut gens = Vec::with_capacity(generators.len());
            for (index, g) in generators.iter().enumerate() {
                if g.iter().any(|&x| x >= n) {
                    return Err(Error::GeneratorOutsideGround { index });
                }
                gens.push(CSet::finite(g.iter().map(|&x| x as u64)));
            }
            let atoms = refine_atoms(n as u64, &gens);
            if atoms.len() >= usize::BITS as usize || (1usize << atoms.len()) > cap {
                return Err(Error::FieldTooLarge { cap });
            }
            let atom_mass = atoms
                .iter()
                .map(|a| {
                    a.members()
                        .unwrap()
                        .iter()
                        .map(|&x| weights[x as usize])
                        .sum()
                })
                .collect();
            Ok(ChargeSpace {
                backend: Backend::FiniteExplicit(FiniteExplicit {
                    names: points.clone(),
                    generators: gens,
                    weights: weights.clone(),
                    atoms,
                    atom_mass,
                }),
            })
        }
        SpaceDescriptor::FinCofNat {
            prefix,
            w_inf,
            m_inf,
        } => {
            prefix.iter().try_for_each(check_weight)?;
            check_weight(w_inf)?;
            if let ExtRational::Finite(m) = m_inf {
                check_weight(m)?;
            }
            // trailing prefix entries equal to w_inf are redundant
            let mut prefix = prefix.clone();
            while prefix.last() == Some(w_inf) {
                prefix.pop();
            }
            let m_inf = if w_inf.is_positive() {
                ExtRational::INF
            } else {
                *m_inf
            };
            Ok(ChargeSpace {
                backend: Backend::FinCofNat(FinCofNat {
                    prefix,
                    w_inf: *w_inf,
                    m_inf,
                }),
            })
        }
    }
}

impl ChargeSpace {
    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn as_finite(&self) -> Option<&FiniteExplicit> {
        match &self.backend {
            Backend::FiniteExplicit(s) => Some(s),
            Backend::FinCofNat(_) => None,
        }
    }

    pub fn as_fincof(&self) -> Option<&FinCofNat> {
        match &self.backend {
            Backend::FinCofNat(s) => Some(s),
            Backend::FiniteExplicit(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    /// Number of ground points, `None` for ℕ.
    pub fn ground_len(&self) -> Option<u64> {
        self.as_finite().map(|s| s.len() as u64)
    }

    pub fn universe(&self) -> CSet {
        match &self.backend {
            Backend::FiniteExplicit(s) => CSet::below(s.len() as u64),
            Backend::FinCofNat(_) => CSet::all(),
        }
    }

    pub fn complement(&self, a: &CSet) -> CSet {
        self.universe().difference(a)
    }

    pub fn check_set(&self, a: &CSet) -> Result<()> {
        if a.is_subset(&self.universe()) {
            Ok(())
        } else {
            Err(Error::ForeignSet(a.to_string()))
        }
    }

    /// Renders a set with point names when the ground set is finite.
    pub fn fmt_set(&self, a: &CSet) -> String {
        match (&self.backend, a.members()) {
            (Backend::FiniteExplicit(s), Some(ms)) => {
                let names: Vec<&str> = ms
                    .iter()
                    .map(|&x| s.names.get(x as usize).map_or("?", |n| n.as_str()))
                    .collect();
                format!("{{{}}}", names.join(","))
            }
            _ => a.to_string(),
        }
    }

    /// Inverse of [`fmt_set`](Self::fmt_set): point names on a finite ground set,
    /// the [`CSet`] syntax on ℕ. The result is checked against the ground set.
    pub fn parse_set(&self, text: &str) -> Result<CSet> {
        let a = match &self.backend {
            Backend::FiniteExplicit(s) => {
                let inner = text
                    .trim()
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| Error::InvalidSet(format!("expected '{{..}}', got '{}'", text.trim())))?;
                let members = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| match s.names.iter().position(|n| n == t) {
                        Some(i) => Ok(i as u64),
                        None => Err(Error::Unknown {
                            kind: "point",
                            name: t.to_string(),
                        }),
                    })
                    .collect::<Result<Vec<u64>>>()?;
                CSet::finite(members)
            }
            Backend::FinCofNat(_) => text.parse::<CSet>().map_err(Error::InvalidSet)?,
        };
        self.check_set(&a)?;
        Ok(a)
    }

    pub fn point_name(&self, x: u64) -> String {
        match &self.backend {
            Backend::FiniteExplicit(s) => s.names[x as usize].clone(),
            Backend::FinCofNat(_) => x.to_string(),
        }
    }

    pub fn field_membership(&self, a: &CSet) -> bool {
        match &self.backend {
            Backend::FiniteExplicit(s) => s
                .atoms
                .iter()
                .all(|atom| atom.is_subset(a) || atom.is_disjoint(a)),
            Backend::FinCofNat(_) => a.is_finite() || a.is_cofinite(),
        }
    }

    pub fn charge(&self, a: &CSet) -> Result<ExtRational> {
        if !self.field_membership(a) {
            return Err(Error::NotInField(self.fmt_set(a)));
        }
        Ok(self.inner(a))
    }

    pub fn total_mass(&self) -> ExtRational {
        self.inner(&self.universe())
    }

    pub fn is_bounded(&self) -> bool {
        !self.total_mass().is_infinite()
    }

    /// `inf { μ(B) : B ∈ F, B ⊇ A }`.
    pub fn outer(&self, a: &CSet) -> ExtRational {
        match &self.backend {
            Backend::FiniteExplicit(s) => ExtRational::Finite(
                s.atoms
                    .iter()
                    .zip(&s.atom_mass)
                    .filter(|(atom, _)| !atom.is_disjoint(a))
                    .map(|(_, m)| *m)
                    .sum(),
            ),
            Backend::FinCofNat(s) => {
                if a.is_finite() {
                    s.weight_sum(a)
                } else {
                    s.tail_mass() + s.weight_sum(a)
                }
            }
        }
    }

    /// `sup { μ(B) : B ∈ F, B ⊆ A }`.
    pub fn inner(&self, a: &CSet) -> ExtRational {
        match &self.backend {
            Backend::FiniteExplicit(s) => ExtRational::Finite(
                s.atoms
                    .iter()
                    .zip(&s.atom_mass)
                    .filter(|(atom, _)| atom.is_subset(a))
                    .map(|(_, m)| *m)
                    .sum(),
            ),
            Backend::FinCofNat(s) => {
                if a.is_cofinite() {
                    s.tail_mass() + s.weight_sum(a)
                } else {
                    s.weight_sum(a)
                }
            }
        }
    }

    pub fn pj_membership(&self, a: &CSet) -> (bool, PJSandwich) {
        self.pj_membership_with_cutoff(a, 0)
    }

    /// As [`ChargeSpace::pj_membership`]; on ℕ the sandwich splits at
    /// `max(cutoff, horizon)`.
    pub fn pj_membership_with_cutoff(&self, a: &CSet, cutoff: u64) -> (bool, PJSandwich) {
        match &self.backend {
            Backend::FiniteExplicit(s) => {
                let mut lower = CSet::empty();
                let mut upper = CSet::empty();
                let mut gap = Q::zero();
                for (atom, m) in s.atoms.iter().zip(&s.atom_mass) {
                    let inside = atom.is_subset(a);
                    let meets = !atom.is_disjoint(a);
                    if inside {
                        lower = lower.union(atom);
                    }
                    if meets {
                        upper = upper.union(atom);
                    }
                    if meets && !inside {
                        gap += m;
                    }
                }
                let sandwich = PJSandwich {
                    lower,
                    upper,
                    gap_infimum: ExtRational::Finite(gap),
                };
                (gap.is_zero(), sandwich)
            }
            Backend::FinCofNat(s) => {
                if a.is_finite() || a.is_cofinite() {
                    return (
                        true,
                        PJSandwich {
                            lower: a.clone(),
                            upper: a.clone(),
                            gap_infimum: ExtRational::zero(),
                        },
                    );
                }
                let split = cutoff.max(a.horizon()).max(s.prefix.len() as u64);
                let head = CSet::below(split);
                let sandwich = PJSandwich {
                    lower: a.intersection(&head),
                    upper: a.union(&CSet::from_index(split)),
                    gap_infimum: s.tail_mass(),
                };
                (sandwich.gap_infimum.is_zero(), sandwich)
            }
        }
    }

    pub fn pj_contains(&self, a: &CSet) -> bool {
        self.pj_membership(a).0
    }

    /// `μ̄(A)` for `A` in the completion.
    pub fn pj_charge(&self, a: &CSet) -> Result<ExtRational> {
        let (member, sandwich) = self.pj_membership(a);
        if !member {
            return Err(Error::NotInCompletion {
                set: self.fmt_set(a),
                gap: sandwich.gap_infimum.to_string(),
            });
        }
        Ok(self.inner(a))
    }

    /// Whether every subset of a null set lies in the field (finite ground only).
    pub fn completeness_check(&self) -> Result<bool> {
        match &self.backend {
            Backend::FiniteExplicit(s) => Ok(s
                .atoms
                .iter()
                .zip(&s.atom_mass)
                .all(|(atom, m)| !m.is_zero() || atom.members().unwrap().len() == 1)),
            Backend::FinCofNat(_) => Err(Error::WrongBackend("a finite ground set")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    fn fix2() -> ChargeSpace {
        fixtures::space(2)
    }

    #[test]
    fn fix1_has_one_atom() {
        let s = fixtures::space(1);
        assert_eq!(s.as_finite().unwrap().atoms(), &[CSet::singleton(0)]);
        assert_eq!(s.total_mass(), ExtRational::from_int(1));
    }

    #[test]
    fn sets_parse_by_name() {
        let s = fix2();
        let a = s.parse_set("{c, a}").unwrap();
        assert_eq!(a, CSet::finite([0, 2]));
        assert_eq!(s.fmt_set(&a), "{a,c}");
        assert!(matches!(s.parse_set("{z}"), Err(Error::Unknown { .. })));
        assert!(matches!(s.parse_set("a"), Err(Error::InvalidSet(_))));
        let n = fixtures::space(4);
        assert_eq!(n.parse_set("co{0}").unwrap(), CSet::cofinite([0]));
    }

    #[test]
    fn fix2_atoms_and_field() {
        let s = fix2();
        assert_eq!(
            s.as_finite().unwrap().atoms(),
            &[CSet::singleton(0), CSet::finite([1, 2])]
        );
        assert!(!s.field_membership(&CSet::singleton(1)));
        assert!(s.field_membership(&CSet::empty()));
        assert_eq!(s.outer(&CSet::singleton(1)), ExtRational::from_int(2));
        assert_eq!(s.inner(&CSet::singleton(1)), ExtRational::zero());
        let (member, sw) = s.pj_membership(&CSet::singleton(1));
        assert!(!member);
        assert_eq!(sw.gap_infimum, ExtRational::from_int(2));
        assert!(s.charge(&CSet::singleton(1)).is_err());
        assert_eq!(s.completeness_check(), Ok(true));
    }

    #[test]
    fn fix3_everything_in_completion() {
        let s = fixtures::space(3);
        let (member, sw) = s.pj_membership(&CSet::singleton(0));
        assert!(member);
        assert_eq!(sw.lower, CSet::empty());
        assert_eq!(sw.upper, CSet::finite([0, 1]));
        assert_eq!(s.pj_charge(&CSet::singleton(0)), Ok(ExtRational::zero()));
        assert_eq!(s.completeness_check(), Ok(false));
        assert_eq!(fixtures::space(1).completeness_check(), Ok(true));
    }

    #[test]
    fn fincof_closed_forms() {
        let s4 = fixtures::space(4);
        assert_eq!(s4.charge(&CSet::from_index(3)), Ok(ExtRational::INF));
        assert_eq!(s4.charge(&CSet::finite([0, 1])), Ok(ExtRational::from_int(2)));
        let evens = CSet::residue_class(2, 0, 0);
        assert!(!s4.field_membership(&evens));
        assert!(s4.completeness_check().is_err());

        let s5 = fixtures::space(5);
        assert_eq!(s5.inner(&evens), ExtRational::INF);
        assert_eq!(s5.outer(&evens), ExtRational::INF);
        let (member, sw) = s5.pj_membership(&evens);
        assert!(!member);
        assert_eq!(sw.gap_infimum, ExtRational::INF);

        let s6 = fixtures::space(6);
        let evens_no_zero = CSet::residue_class(2, 0, 1);
        assert_eq!(s6.outer(&evens_no_zero), ExtRational::from_int(1));
        assert_eq!(s6.inner(&evens_no_zero), ExtRational::zero());
        assert_eq!(s6.pj_charge(&CSet::all()), Ok(ExtRational::from_int(2)));
    }

    #[test]
    fn build_errors() {
        let neg = SpaceDescriptor::FinCofNat {
            prefix: vec![],
            w_inf: q(-1),
            m_inf: ExtRational::zero(),
        };
        assert!(matches!(build_space(&neg), Err(Error::NegativeWeight(_))));
        let outside = SpaceDescriptor::Finite {
            points: vec!["a".into()],
            generators: vec![vec![1]],
            weights: vec![q(1)],
        };
        assert_eq!(
            build_space(&outside),
            Err(Error::GeneratorOutsideGround { index: 0 })
        );
        let big = SpaceDescriptor::Finite {
            points: (0..5).map(|i| format!("p{i}")).collect(),
            generators: (0..5).map(|i| vec![i]).collect(),
            weights: vec![q(1); 5],
        };
        assert_eq!(
            build_space_with_cap(&big, 16),
            Err(Error::FieldTooLarge { cap: 16 })
        );
        assert!(build_space_with_cap(&big, 32).is_ok());
    }

    #[test]
    fn positive_tail_weight_forces_infinite_mass_at_infinity() {
        let s = build_space(&SpaceDescriptor::FinCofNat {
            prefix: vec![],
            w_inf: q(1),
            m_inf: ExtRational::from_int(3),
        })
        .unwrap();
        assert_eq!(s.as_fincof().unwrap().m_inf(), ExtRational::INF);
    }
}
