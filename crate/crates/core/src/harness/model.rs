//! Finite cell models of instances.
//!
//! A finite ground set is modelled point by point, with its field enumerated
//! literally. On ℕ the model keeps the window `0..K` as singleton cells and folds
//! `{n ≥ K}` into one atom split into residue cells; every set whose pattern
//! settles before `K` with a period dividing the tail period is represented exactly.

use num_traits::Signed;

use crate::cset::CSet;
use crate::error::{Error, Result};
use crate::func::Tail;
use crate::instance::Instance;
use crate::measurability::PhiProfile;
use crate::rational::{ExtRational, Q};
use crate::space::Backend;
use crate::uniform::Point;

pub type Mask = u128;

/// Upper bound on the number of sets in a literally enumerated field.
const FIELD_LIMIT: usize = 1 << 12;

/// The value of `f` on a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellValue {
    At(Point),
    /// An unbounded run of an affine tail, towards `+∞` when `true`.
    Far(bool),
}

impl CellValue {
    pub fn real(&self) -> Option<Q> {
        match self {
            CellValue::At(p) => p.real(),
            CellValue::Far(_) => None,
        }
    }

    /// Whether the value exceeds `t`; an unbounded run exceeds every threshold upwards.
    pub fn above(&self, t: Q) -> bool {
        match self {
            CellValue::At(p) => p.real().is_some_and(|v| v > t),
            CellValue::Far(up) => *up,
        }
    }

    pub fn below(&self, t: Q) -> bool {
        match self {
            CellValue::At(p) => p.real().is_some_and(|v| v < t),
            CellValue::Far(up) => !*up,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Finite(u64),
    Truncated { cutoff: u64, period: u64 },
}

#[derive(Clone, Debug)]
pub struct Model {
    pub values: Vec<CellValue>,
    pub atoms: Vec<Mask>,
    pub mass: Vec<ExtRational>,
    /// Charge an infinite cell carries by itself; counted by inner charges even when
    /// the rest of its atom is missing.
    pub own: Vec<ExtRational>,
    /// Every field set, when the field was enumerated.
    pub field: Option<Vec<Mask>>,
    layout: Layout,
}

pub fn bit(i: usize) -> Mask {
    1 << i
}

pub fn cells(m: Mask) -> impl Iterator<Item = usize> {
    (0..128).filter(move |i| m & bit(*i) != 0)
}

fn subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

impl Model {
    pub fn new(inst: &Instance, cutoff: u64) -> Result<Model> {
        match inst.space.backend() {
            Backend::FiniteExplicit(_) => Model::finite(inst),
            Backend::FinCofNat(_) => Model::truncated(inst, cutoff),
        }
    }

    /// Literal model of a finite ground set: the field is closed under union and
    /// complement from the generators, and its atoms are its minimal nonempty sets.
    pub fn finite(inst: &Instance) -> Result<Model> {
        let s = inst.space.as_finite().ok_or(Error::WrongBackend("a finite ground set"))?;
        let n = s.len();
        if n > 128 {
            return Err(Error::ResourceCap(format!("{n} points exceed the model width")));
        }
        let full: Mask = if n == 128 { !0 } else { bit(n) - 1 };
        let mask_of = |a: &CSet| {
            a.members()
                .expect("finite set")
                .iter()
                .fold(0, |m, &x| m | bit(x as usize))
        };
        let mut field: Vec<Mask> = vec![0, full];
        field.extend(s.generators().iter().map(mask_of));
        field.sort();
        field.dedup();
        loop {
            let mut next = field.clone();
            for &a in &field {
                next.push(full & !a);
                for &b in &field {
                    next.push(a | b);
                }
            }
            next.sort();
            next.dedup();
            if next.len() > FIELD_LIMIT {
                return Err(Error::ResourceCap(format!("field exceeds {FIELD_LIMIT} sets")));
            }
            if next.len() == field.len() {
                break;
            }
            field = next;
        }
        let atoms: Vec<Mask> = field
            .iter()
            .copied()
            .filter(|&a| a != 0 && !field.iter().any(|&b| b != 0 && b != a && subset(b, a)))
            .collect();
        let mass = atoms
            .iter()
            .map(|&a| ExtRational::Finite(cells(a).map(|x| s.weights()[x]).sum()))
            .collect();
        Ok(Model {
            values: (0..n as u64).map(|x| CellValue::At(inst.func.value(x))).collect(),
            own: vec![ExtRational::zero(); n],
            atoms,
            mass,
            field: Some(field),
            layout: Layout::Finite(n as u64),
        })
    }

    /// Model of ℕ truncated at `cutoff` (raised to the tail index when smaller).
    pub fn truncated(inst: &Instance, cutoff: u64) -> Result<Model> {
        let s = inst.space.as_fincof().ok_or(Error::WrongBackend("the ground set ℕ"))?;
        let start = inst.func.prefix_len().max(s.prefix().len() as u64);
        let k = cutoff.max(start);
        let tail = inst.func.tail().expect("sequence");
        let period = tail.period();
        let width = (k + period) as usize;
        if width > 128 {
            return Err(Error::ResourceCap(format!("{width} cells exceed the model width")));
        }
        let mut values: Vec<CellValue> = (0..k).map(|n| CellValue::At(inst.func.value(n))).collect();
        let mut atoms: Vec<Mask> = (0..k as usize).map(bit).collect();
        let mut mass: Vec<ExtRational> = (0..k).map(|n| ExtRational::Finite(s.weight(n))).collect();
        let mut own = vec![ExtRational::zero(); k as usize];
        let mut star = 0;
        for r in 0..period {
            let n = k + r;
            values.push(match tail {
                Tail::Affine { a, .. } => CellValue::Far(a.is_positive()),
                _ => CellValue::At(inst.func.value(n)),
            });
            star |= bit(n as usize);
            // infinitely many points of weight w_inf
            own.push(if s.weight(n).is_positive() { ExtRational::INF } else { ExtRational::zero() });
        }
        atoms.push(star);
        mass.push(if s.weight(k).is_positive() { ExtRational::INF } else { s.m_inf() });
        Ok(Model {
            values,
            atoms,
            mass,
            own,
            field: None,
            layout: Layout::Truncated { cutoff: k, period },
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn full(&self) -> Mask {
        let n = self.len();
        if n == 128 {
            !0
        } else {
            bit(n) - 1
        }
    }

    /// Points of ℕ represented individually; `None` on a finite ground set.
    pub fn cutoff(&self) -> Option<u64> {
        match self.layout {
            Layout::Finite(_) => None,
            Layout::Truncated { cutoff, .. } => Some(cutoff),
        }
    }

    pub fn is_literal(&self) -> bool {
        self.field.is_some()
    }

    /// Cells of a set, or a description of why the model cannot represent it.
    pub fn mask(&self, a: &CSet) -> std::result::Result<Mask, String> {
        match self.layout {
            Layout::Finite(n) => {
                let ms = a.members().ok_or_else(|| format!("{a} is infinite"))?;
                if ms.iter().any(|&x| x >= n) {
                    return Err(format!("{a} leaves the ground set"));
                }
                Ok(ms.iter().fold(0, |m, &x| m | bit(x as usize)))
            }
            Layout::Truncated { cutoff, period } => {
                if a.horizon() > cutoff || period % a.period() != 0 {
                    return Err(format!("{a} does not settle inside the window"));
                }
                Ok((0..cutoff + period)
                    .filter(|&n| a.contains(n))
                    .fold(0, |m, n| m | bit(n as usize)))
            }
        }
    }

    pub fn where_value(&self, pred: impl Fn(&CellValue) -> bool) -> Mask {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| pred(v))
            .fold(0, |m, (i, _)| m | bit(i))
    }

    pub fn in_field(&self, m: Mask) -> bool {
        match &self.field {
            Some(f) => f.binary_search(&m).is_ok(),
            None => self.atoms.iter().all(|&a| subset(a, m) || a & m == 0),
        }
    }

    /// `μ` of a field set.
    pub fn charge(&self, m: Mask) -> ExtRational {
        ExtRational::sum(
            self.atoms
                .iter()
                .zip(&self.mass)
                .filter(|(a, _)| subset(**a, m))
                .map(|(_, w)| *w),
        )
    }

    fn field_sets(&self) -> &[Mask] {
        self.field.as_deref().expect("literal field")
    }

    pub fn outer(&self, m: Mask) -> ExtRational {
        if self.is_literal() {
            return self
                .field_sets()
                .iter()
                .filter(|&&c| subset(m, c))
                .map(|&c| self.charge(c))
                .min()
                .expect("the whole space covers every set");
        }
        ExtRational::sum(
            self.atoms
                .iter()
                .zip(&self.mass)
                .filter(|(a, _)| **a & m != 0)
                .map(|(_, w)| *w),
        )
    }

    pub fn inner(&self, m: Mask) -> ExtRational {
        if self.is_literal() {
            return self
                .field_sets()
                .iter()
                .filter(|&&b| subset(b, m))
                .map(|&b| self.charge(b))
                .max()
                .expect("the empty set lies inside every set");
        }
        let mut total = self.charge(m);
        for (a, _) in self.atoms.iter().zip(&self.mass) {
            if !subset(*a, m) {
                for c in cells(a & m) {
                    total = total + self.own[c];
                }
            }
        }
        total
    }

    /// `inf { μ(C \ B) : B ⊆ A ⊆ C, B, C ∈ F }`.
    pub fn gap(&self, m: Mask) -> ExtRational {
        if self.is_literal() {
            let f = self.field_sets();
            let mut best = ExtRational::INF;
            for &b in f.iter().filter(|&&b| subset(b, m)) {
                for &c in f.iter().filter(|&&c| subset(m, c)) {
                    best = best.min(self.charge(c & !b));
                }
            }
            return best;
        }
        ExtRational::sum(
            self.atoms
                .iter()
                .zip(&self.mass)
                .filter(|(a, _)| **a & m != 0 && !subset(**a, m))
                .map(|(_, w)| *w),
        )
    }

    /// Distinct bounded values, in the order of first appearance.
    pub fn points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for v in &self.values {
            if let CellValue::At(p) = v {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        out
    }

    /// Bounded values used to place thresholds and centres: on a truncated ℕ only
    /// the first half of the window and the tail cells, away from the window edge.
    pub fn query_points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            let inside = match self.layout {
                Layout::Finite(_) => true,
                Layout::Truncated { cutoff, .. } => (i as u64) < cutoff / 2 || i as u64 >= cutoff,
            };
            if let (true, CellValue::At(p)) = (inside, v) {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        out.sort();
        out
    }

    pub fn has_far(&self) -> bool {
        self.values.iter().any(|v| matches!(v, CellValue::Far(_)))
    }

    /// `φ_f(z)` read literally as the inner charge of the preimage of `(z - δ, z + δ)`.
    pub fn phi(&self, z: Q, delta: Q) -> ExtRational {
        self.inner(self.where_value(|v| v.real().is_some_and(|x| (x - z).abs() < delta)))
    }
}

/// Sorted distinct reals of `points`.
pub fn reals(points: &[Point]) -> Vec<Q> {
    let mut vs: Vec<Q> = points.iter().filter_map(Point::real).collect();
    vs.sort();
    vs.dedup();
    vs
}

/// Compares a closed-form profile with the literal boundary mass at `z`.
pub fn phi_agrees(profile: &PhiProfile, model: &Model, z: Q, delta: Q) -> bool {
    profile.value(&z) == model.phi(z, delta)
}

/// `2^{-g}`.
pub fn grid_epsilon(grid: u32) -> Q {
    Q::new(1, 1i64 << grid.min(60))
}

/// Whether `v` is below every grid tolerance.
pub fn negligible(v: &ExtRational, grid: u32) -> bool {
    v.finite().is_some_and(|x| x < grid_epsilon(grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn fix2_field_is_literal() {
        let m = Model::new(&Instance::fixture(2).unwrap(), 16).unwrap();
        assert_eq!(m.field.as_ref().unwrap().len(), 4);
        assert_eq!(m.atoms, vec![0b001, 0b110]);
        assert_eq!(m.outer(0b010), ExtRational::from_int(2));
        assert_eq!(m.inner(0b010), ExtRational::zero());
        assert_eq!(m.gap(0b010), ExtRational::from_int(2));
    }

    #[test]
    fn fix5_window_and_tail() {
        let inst = Instance::fixture(5).unwrap();
        let m = Model::new(&inst, 16).unwrap();
        assert_eq!(m.len(), 18);
        let odd = m.mask(&CSet::residue_class(2, 1, 0)).unwrap();
        assert_eq!(m.gap(odd), ExtRational::INF);
        assert_eq!(m.inner(odd), ExtRational::INF);
        assert_eq!(m.phi(q(0), Q::new(1, 8)), ExtRational::INF);
        assert!(m.mask(&CSet::singleton(40)).is_err());
    }

    #[test]
    fn fix4_tail_is_unbounded() {
        let m = Model::new(&Instance::fixture(4).unwrap(), 16).unwrap();
        assert!(m.has_far());
        assert_eq!(m.query_points().len(), 8);
        assert_eq!(m.outer(m.where_value(|v| v.above(q(100)))), ExtRational::INF);
    }
}
