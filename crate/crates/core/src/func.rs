//! Functions from a charge space into a uniform codomain.

use std::collections::BTreeSet;
use std::ops::Bound;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::cset::CSet;
use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::space::{Backend, ChargeSpace};
use crate::uniform::{Point, UniformCodomain};

/// Behaviour of a sequence beyond its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tail {
    Constant(Point),
    /// `f(n) = values[n mod q]`.
    Periodic(Vec<Point>),
    /// `f(n) = a·n + b` with `a ≠ 0`, rational line only.
    Affine { a: Q, b: Q },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    /// Explicit values on a finite ground set.
    Table(Vec<Point>),
    /// Values on ℕ: `prefix[n]` for `n < prefix.len()`, the tail afterwards.
    Sequence { prefix: Vec<Point>, tail: Tail },
}

/// Real interval with arbitrary (possibly infinite) endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound<Q>,
    pub hi: Bound<Q>,
}

impl Interval {
    pub fn open(lo: Q, hi: Q) -> Interval {
        Interval {
            lo: Bound::Excluded(lo),
            hi: Bound::Excluded(hi),
        }
    }

    pub fn point(v: Q) -> Interval {
        Interval {
            lo: Bound::Included(v),
            hi: Bound::Included(v),
        }
    }

    /// `(y, ∞)`.
    pub fn above(y: Q) -> Interval {
        Interval {
            lo: Bound::Excluded(y),
            hi: Bound::Unbounded,
        }
    }

    /// `(-∞, y)`.
    pub fn below(y: Q) -> Interval {
        Interval {
            lo: Bound::Unbounded,
            hi: Bound::Excluded(y),
        }
    }

    pub fn contains(&self, v: &Q) -> bool {
        let lo = match &self.lo {
            Bound::Included(l) => v >= l,
            Bound::Excluded(l) => v > l,
            Bound::Unbounded => true,
        };
        let hi = match &self.hi {
            Bound::Included(h) => v <= h,
            Bound::Excluded(h) => v < h,
            Bound::Unbounded => true,
        };
        lo && hi
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.lo, Bound::Unbounded) && !matches!(self.hi, Bound::Unbounded)
    }
}

fn floor_q(v: Q) -> i64 {
    v.floor().to_integer()
}

fn ceil_q(v: Q) -> i64 {
    v.ceil().to_integer()
}

/// Integers `n` with `a·n + b ∈ iv`, as an inclusive range with optional ends.
fn affine_solutions(a: Q, b: Q, iv: &Interval) -> (Option<i64>, Option<i64>) {
    // a·n + b ∈ iv  ⟺  n ∈ (iv - b) / a, with the ends swapped when a < 0
    let map = |bd: &Bound<Q>| match bd {
        Bound::Included(v) => Bound::Included((v - b) / a),
        Bound::Excluded(v) => Bound::Excluded((v - b) / a),
        Bound::Unbounded => Bound::Unbounded,
    };
    let (lo, hi) = if a.is_positive() {
        (map(&iv.lo), map(&iv.hi))
    } else {
        (map(&iv.hi), map(&iv.lo))
    };
    let min = match lo {
        Bound::Included(v) => Some(ceil_q(v)),
        Bound::Excluded(v) => Some(floor_q(v) + 1),
        Bound::Unbounded => None,
    };
    let max = match hi {
        Bound::Included(v) => Some(floor_q(v)),
        Bound::Excluded(v) => Some(ceil_q(v) - 1),
        Bound::Unbounded => None,
    };
    (min, max)
}

impl Tail {
    fn value(&self, n: u64) -> Point {
        match self {
            Tail::Constant(y) => y.clone(),
            Tail::Periodic(vs) => vs[(n % vs.len() as u64) as usize].clone(),
            Tail::Affine { a, b } => Point::Real(a * q(n as i64) + b),
        }
    }

    pub fn period(&self) -> u64 {
        match self {
            Tail::Periodic(vs) => vs.len() as u64,
            _ => 1,
        }
    }

    fn normalize(self) -> Tail {
        match self {
            Tail::Periodic(vs) => {
                let p = vs.len();
                let d = (1..=p)
                    .find(|&d| p % d == 0 && (0..p).all(|i| vs[i] == vs[i % d]))
                    .unwrap_or(p);
                if d == 1 {
                    Tail::Constant(vs[0].clone())
                } else {
                    Tail::Periodic(vs[..d].to_vec())
                }
            }
            t => t,
        }
    }
}

impl Func {
    /// Builds a sequence in normal form: minimal period, constant tails collapsed
    /// and prefix entries agreeing with the tail dropped.
    pub fn sequence(prefix: Vec<Point>, tail: Tail) -> Result<Func> {
        match &tail {
            Tail::Periodic(vs) if vs.is_empty() => {
                return Err(Error::InvalidFunction("empty periodic tail".into()))
            }
            Tail::Affine { a, .. } if a.is_zero() => {
                return Err(Error::InvalidFunction("affine tail needs a nonzero slope".into()))
            }
            _ => {}
        }
        let tail = tail.normalize();
        let mut prefix = prefix;
        while let Some(last) = prefix.last() {
            if *last == tail.value(prefix.len() as u64 - 1) {
                prefix.pop();
            } else {
                break;
            }
        }
        Ok(Func::Sequence { prefix, tail })
    }

    /// Checks that `self` is total on `space` with values in `codomain`.
    pub fn validate(&self, space: &ChargeSpace, codomain: &UniformCodomain) -> Result<()> {
        match (self, space.backend()) {
            (Func::Table(vs), Backend::FiniteExplicit(s)) => {
                if vs.len() != s.len() {
                    return Err(Error::InvalidFunction(format!(
                        "expected {} values, got {}",
                        s.len(),
                        vs.len()
                    )));
                }
                vs.iter().try_for_each(|v| codomain.validate_point(v))
            }
            (Func::Sequence { prefix, tail }, Backend::FinCofNat(_)) => {
                prefix.iter().try_for_each(|v| codomain.validate_point(v))?;
                match tail {
                    Tail::Constant(y) => codomain.validate_point(y),
                    Tail::Periodic(vs) => vs.iter().try_for_each(|v| codomain.validate_point(v)),
                    Tail::Affine { .. } if codomain.is_line() => Ok(()),
                    Tail::Affine { .. } => Err(Error::InvalidFunction(
                        "affine tails need the rational line as codomain".into(),
                    )),
                }
            }
            (Func::Table(_), _) => Err(Error::InvalidFunction(
                "a value table needs a finite ground set".into(),
            )),
            (Func::Sequence { .. }, _) => Err(Error::InvalidFunction(
                "a prefix/tail function needs the ground set ℕ".into(),
            )),
        }
    }

    pub fn value(&self, n: u64) -> Point {
        match self {
            Func::Table(vs) => vs[n as usize].clone(),
            Func::Sequence { prefix, tail } => match prefix.get(n as usize) {
                Some(v) => v.clone(),
                None => tail.value(n),
            },
        }
    }

    pub fn tail(&self) -> Option<&Tail> {
        match self {
            Func::Table(_) => None,
            Func::Sequence { tail, .. } => Some(tail),
        }
    }

    pub fn prefix_len(&self) -> u64 {
        match self {
            Func::Table(vs) => vs.len() as u64,
            Func::Sequence { prefix, .. } => prefix.len() as u64,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.tail(), Some(Tail::Affine { .. }))
    }

    /// Distinct values when the range is finite.
    pub fn range(&self) -> Option<Vec<Point>> {
        let mut out: BTreeSet<Point> = BTreeSet::new();
        match self {
            Func::Table(vs) => out.extend(vs.iter().cloned()),
            Func::Sequence { prefix, tail } => {
                out.extend(prefix.iter().cloned());
                match tail {
                    Tail::Constant(y) => {
                        out.insert(y.clone());
                    }
                    Tail::Periodic(vs) => out.extend(vs.iter().cloned()),
                    Tail::Affine { .. } => return None,
                }
            }
        }
        Some(out.into_iter().collect())
    }

    /// Values that appear infinitely often (the tail values), empty on finite ground sets.
    pub fn tail_values(&self) -> Vec<Point> {
        match self.tail() {
            Some(Tail::Constant(y)) => vec![y.clone()],
            Some(Tail::Periodic(vs)) => vs.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
            _ => vec![],
        }
    }

    /// A finite set of values sufficient to locate critical radii: the whole
    /// range when finite, else the prefix and the first tail values.
    pub fn relevant_points(&self) -> Vec<Point> {
        if let Some(r) = self.range() {
            return r;
        }
        let m = self.prefix_len();
        let mut out: BTreeSet<Point> = (0..m + 2).map(|n| self.value(n)).collect();
        out.insert(self.value(m));
        out.into_iter().collect()
    }

    /// Index from which the tail pattern repeats exactly.
    pub fn tail_start(&self) -> u64 {
        self.prefix_len()
    }

    /// `f(A)`, or `None` when it is infinite.
    pub fn image(&self, a: &CSet) -> Option<Vec<Point>> {
        let mut out: BTreeSet<Point> = BTreeSet::new();
        if let Some(ms) = a.members() {
            out.extend(ms.iter().map(|&n| self.value(n)));
            return Some(out.into_iter().collect());
        }
        let tail = self.tail()?;
        if matches!(tail, Tail::Affine { .. }) {
            return None;
        }
        let start = a.horizon().max(self.prefix_len());
        let span = a.period().lcm(&tail.period());
        out.extend(
            (0..start + span)
                .filter(|&n| a.contains(n))
                .map(|n| self.value(n)),
        );
        Some(out.into_iter().collect())
    }

    /// `{x : pred(f(x))}`; not available for affine tails (use [`Func::preimage_interval`]).
    pub fn preimage(&self, pred: impl Fn(&Point) -> bool) -> CSet {
        match self {
            Func::Table(vs) => CSet::finite(
                vs.iter()
                    .enumerate()
                    .filter(|(_, v)| pred(v))
                    .map(|(i, _)| i as u64),
            ),
            Func::Sequence { prefix, tail } => {
                let m = prefix.len() as u64;
                let head = (0..m).filter(|&n| pred(&prefix[n as usize]));
                match tail {
                    Tail::Affine { .. } => panic!("preimage of an affine tail needs an interval"),
                    _ => {
                        let q = tail.period();
                        let residues: Vec<u64> = (0..q).filter(|&r| pred(&tail.value(r))).collect();
                        CSet::periodic(head, q, residues, m)
                    }
                }
            }
        }
    }

    /// `f^{-1}(iv)` for a real-valued function.
    pub fn preimage_interval(&self, iv: &Interval) -> CSet {
        let inside = |p: &Point| p.real().is_some_and(|v| iv.contains(&v));
        match self {
            Func::Sequence {
                prefix,
                tail: Tail::Affine { a, b },
            } => {
                let m = prefix.len() as u64;
                let head = CSet::finite((0..m).filter(|&n| inside(&prefix[n as usize])));
                let (lo, hi) = affine_solutions(*a, *b, iv);
                let lo = lo.map_or(m as i64, |l| l.max(m as i64));
                let tail = match hi {
                    None => CSet::from_index(lo as u64),
                    Some(h) if h < lo => CSet::empty(),
                    Some(h) => CSet::finite(lo as u64..=h as u64),
                };
                head.union(&tail)
            }
            _ => self.preimage(inside),
        }
    }

    /// `g ∘ f` for a map defined pointwise; affine tails are rejected.
    pub fn map(&self, g: impl Fn(&Point) -> Point) -> Result<Func> {
        match self {
            Func::Table(vs) => Ok(Func::Table(vs.iter().map(&g).collect())),
            Func::Sequence { prefix, tail } => {
                let tail = match tail {
                    Tail::Constant(y) => Tail::Constant(g(y)),
                    Tail::Periodic(vs) => Tail::Periodic(vs.iter().map(&g).collect()),
                    Tail::Affine { .. } => {
                        return Err(Error::InvalidFunction(
                            "cannot compose an affine tail with an arbitrary map".into(),
                        ))
                    }
                };
                Func::sequence(prefix.iter().map(&g).collect(), tail)
            }
        }
    }

    /// `c·f + d` for a real-valued `f` and `c ≠ 0`.
    pub fn affine_image(&self, c: Q, d: Q) -> Func {
        let psi = |p: &Point| Point::Real(c * p.real().expect("real value") + d);
        match self {
            Func::Sequence {
                prefix,
                tail: Tail::Affine { a, b },
            } => Func::sequence(
                prefix.iter().map(psi).collect(),
                Tail::Affine {
                    a: a * c,
                    b: b * c + d,
                },
            )
            .expect("nonzero slope"),
            _ => self.map(psi).expect("finite tail"),
        }
    }

    /// `max(f, 0)` for a real-valued `f`.
    pub fn positive_part(&self) -> Func {
        self.clamp_part(false)
    }

    /// `max(-f, 0)` for a real-valued `f`.
    pub fn negative_part(&self) -> Func {
        self.clamp_part(true)
    }

    fn clamp_part(&self, negate: bool) -> Func {
        let sign = if negate { q(-1) } else { q(1) };
        let clamp = |p: &Point| Point::Real((p.real().expect("real value") * sign).max(Q::zero()));
        match self {
            Func::Sequence {
                prefix,
                tail: Tail::Affine { a, b },
            } => {
                let (a, b) = (a * sign, b * sign);
                // first index from which the sign of a·n + b no longer changes
                let m = prefix.len() as i64;
                let turn = (-b / a).floor().to_integer() + 1;
                let from = turn.max(m) as u64;
                let mut head: Vec<Point> = prefix.iter().map(clamp).collect();
                for n in prefix.len() as u64..from {
                    head.push(Point::Real((a * q(n as i64) + b).max(Q::zero())));
                }
                let tail = if a.is_positive() {
                    Tail::Affine { a, b }
                } else {
                    Tail::Constant(Point::Real(Q::zero()))
                };
                Func::sequence(head, tail).expect("valid tail")
            }
            _ => self.map(clamp).expect("finite tail"),
        }
    }

    /// `x ↦ (f(x), g(x))` into a product codomain.
    pub fn pair(&self, other: &Func) -> Result<Func> {
        match (self, other) {
            (Func::Table(a), Func::Table(b)) if a.len() == b.len() => Ok(Func::Table(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| Point::Tuple(vec![x.clone(), y.clone()]))
                    .collect(),
            )),
            (Func::Sequence { tail: t1, .. }, Func::Sequence { tail: t2, .. })
                if !matches!(t1, Tail::Affine { .. }) && !matches!(t2, Tail::Affine { .. }) =>
            {
                let m = self.prefix_len().max(other.prefix_len());
                let period = t1.period().lcm(&t2.period());
                let start = m.div_ceil(period) * period;
                let at = |n: u64| Point::Tuple(vec![self.value(n), other.value(n)]);
                Func::sequence(
                    (0..start).map(at).collect(),
                    Tail::Periodic((start..start + period).map(at).collect()),
                )
            }
            _ => Err(Error::InvalidFunction("functions cannot be paired".into())),
        }
    }

    /// Restriction of a tuple-valued function to one coordinate.
    pub fn project(&self, k: usize) -> Func {
        self.map(|p| match p {
            Point::Tuple(xs) => xs[k].clone(),
            other => other.clone(),
        })
        .expect("tuple-valued functions have finite tails")
    }

    /// Relabels the points of a finite codomain.
    pub fn relabel(&self, h: &[usize]) -> Func {
        self.map(|p| match p {
            Point::Label(i) => Point::Label(h[*i]),
            other => other.clone(),
        })
        .expect("finite codomains have finite tails")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn r(v: i64) -> Point {
        Point::Real(q(v))
    }

    #[test]
    fn sequence_normal_form() {
        let f = Func::sequence(vec![r(5), r(0)], Tail::Periodic(vec![r(0), r(0)])).unwrap();
        assert_eq!(
            f,
            Func::Sequence {
                prefix: vec![r(5)],
                tail: Tail::Constant(r(0))
            }
        );
        let g = Func::sequence(vec![r(0), r(1)], Tail::Periodic(vec![r(0), r(1)])).unwrap();
        assert_eq!(g.prefix_len(), 0);
        assert!(Func::sequence(vec![], Tail::Affine { a: q(0), b: q(1) }).is_err());
    }

    #[test]
    fn affine_interval_preimages() {
        let f = Func::sequence(vec![], Tail::Affine { a: q(1), b: q(0) }).unwrap();
        assert_eq!(f.preimage_interval(&Interval::open(q(1), q(4))), CSet::finite([2, 3]));
        assert_eq!(f.preimage_interval(&Interval::above(qf(3, 2))), CSet::from_index(2));
        assert_eq!(f.preimage_interval(&Interval::below(q(0))), CSet::empty());
        let g = Func::sequence(vec![r(7)], Tail::Affine { a: q(-2), b: q(1) }).unwrap();
        // values 7, -1, -3, -5, ...
        assert_eq!(g.preimage_interval(&Interval::below(q(-2))), CSet::from_index(2));
        assert_eq!(g.preimage_interval(&Interval::point(q(-3))), CSet::singleton(2));
        assert_eq!(g.preimage_interval(&Interval::above(q(0))), CSet::singleton(0));
    }

    #[test]
    fn parts_of_affine_tails() {
        let f = Func::sequence(vec![], Tail::Affine { a: q(1), b: q(-2) }).unwrap();
        let p = f.positive_part();
        for n in 0..12 {
            let v = f.value(n).real().unwrap();
            assert_eq!(p.value(n).real().unwrap(), v.max(q(0)));
            assert_eq!(f.negative_part().value(n).real().unwrap(), (-v).max(q(0)));
        }
        assert!(p.is_affine());
        assert!(!f.negative_part().is_affine());
    }

    #[test]
    fn periodic_preimage() {
        let f = Func::sequence(vec![], Tail::Periodic(vec![r(0), r(1)])).unwrap();
        assert_eq!(f.preimage(|p| *p == r(0)), CSet::residue_class(2, 0, 0));
        let h = f.affine_image(q(-1), q(1));
        assert_eq!(h.value(0), r(1));
        assert_eq!(h.value(3), r(0));
    }

    #[test]
    fn pairing_aligns_periods() {
        let f = Func::sequence(vec![r(3)], Tail::Periodic(vec![r(0), r(1)])).unwrap();
        let g = Func::sequence(vec![], Tail::Periodic(vec![r(0), r(1), r(2)])).unwrap();
        let h = f.pair(&g).unwrap();
        for n in 0..30 {
            assert_eq!(h.value(n), Point::Tuple(vec![f.value(n), g.value(n)]));
        }
        assert_eq!(h.project(1), g);
    }
}
