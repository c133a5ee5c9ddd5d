use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::tail_index;
use crate::error::{Error, Result};
use crate::func::Tail;
use crate::instance::Instance;
use crate::rational::{q, qf, ExtRational, Q};

/// `φ = value` on `{start + k·step : k ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    #[serde(with = "crate::rational::serde_q")]
    pub start: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub step: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
}

impl Progression {
    pub fn contains(&self, z: &Q) -> bool {
        let k = (z - self.start) / self.step;
        k.is_integer() && !k.is_negative()
    }
}

/// Closed form of the boundary mass limit `φ_f`; zero wherever nothing is recorded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiProfile {
    /// Explicit positive values, overriding the progression.
    #[serde(with = "support_serde")]
    pub support: BTreeMap<Q, ExtRational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub progression: Option<Progression>,
    /// Points with `φ = ∞`, also present in `support`.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub infinite: Vec<Q>,
}

mod support_serde {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{fmt_q, parse_q, ExtRational, Q};

    pub fn serialize<S: Serializer>(m: &BTreeMap<Q, ExtRational>, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(String, &ExtRational)> = m.iter().map(|(k, v)| (fmt_q(k), v)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Q, ExtRational>, D::Error> {
        let pairs: Vec<(String, ExtRational)> = Vec::deserialize(d)?;
        pairs
            .into_iter()
            .map(|(k, v)| {
                parse_q(&k)
                    .map(|k| (k, v))
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {k}")))
            })
            .collect()
    }
}

impl PhiProfile {
    pub fn value(&self, z: &Q) -> ExtRational {
        if let Some(v) = self.support.get(z) {
            return *v;
        }
        match &self.progression {
            Some(p) if p.contains(z) => ExtRational::Finite(p.value),
            _ => ExtRational::zero(),
        }
    }

    pub fn is_zero(&self, z: &Q) -> bool {
        self.value(z).is_zero()
    }

    /// Recorded points with positive value inside `[lo, hi]`.
    pub fn positive_points(&self, lo: Q, hi: Q) -> Vec<Q> {
        let mut out: Vec<Q> = self.support.range(lo..=hi).map(|(k, _)| *k).collect();
        if let Some(p) = &self.progression {
            let (a, b) = if p.step.is_positive() {
                ((lo - p.start) / p.step, (hi - p.start) / p.step)
            } else {
                ((hi - p.start) / p.step, (lo - p.start) / p.step)
            };
            let first = a.ceil().to_integer().max(0);
            let last = b.floor().to_integer();
            out.extend((first..=last).map(|k| p.start + p.step * q(k)));
        }
        out.sort();
        out.dedup();
        out
    }

    /// A point with `φ = 0` in the open interval `(lo, hi)`, found by bisection.
    pub fn zero_in(&self, lo: Q, hi: Q) -> Option<Q> {
        self.point_in(lo, hi, |v| v.is_zero())
    }

    /// A point with `φ < ∞` in the open interval `(lo, hi)`.
    pub fn finite_in(&self, lo: Q, hi: Q) -> Option<Q> {
        self.point_in(lo, hi, |v| !v.is_infinite())
    }

    fn point_in(&self, lo: Q, hi: Q, ok: impl Fn(&ExtRational) -> bool) -> Option<Q> {
        // dyadic points of (lo, hi), coarse to fine
        for level in 1..=12u32 {
            let parts = 1i64 << level;
            for k in (1..parts).step_by(2) {
                let z = lo + (hi - lo) * qf(k, parts);
                if ok(&self.value(&z)) {
                    return Some(z);
                }
            }
        }
        None
    }

    /// Whether `φ^{-1}[0, ∞)` is dense: the infinite points are finitely many,
    /// so every open interval between them must contain a finite value.
    pub fn finite_set_is_dense(&self) -> bool {
        let mut pts = self.infinite.clone();
        pts.sort();
        let lo = pts.first().copied().unwrap_or(Q::zero()) - q(1);
        let hi = pts.last().copied().unwrap_or(Q::zero()) + q(1);
        let mut ends = vec![lo];
        ends.extend(pts);
        ends.push(hi);
        ends.windows(2).all(|w| self.finite_in(w[0], w[1]).is_some())
    }
}

/// `φ_f` in closed form.
///
/// With a finite range the shrinking intervals eventually isolate a single value,
/// so `φ_f(z)` is the inner charge of `f^{-1}{z}`. An affine tail is injective,
/// so each preimage is finite and `φ_f(z)` is the weight sitting on it.
pub fn phi_profile(inst: &Instance) -> Result<PhiProfile> {
    if !inst.is_real() {
        return Err(Error::InvalidFunction("φ needs a real-valued function".into()));
    }
    let mut support = BTreeMap::new();
    let mut progression = None;
    if let Some(Tail::Affine { a, b }) = inst.func.tail() {
        let s = inst.space.as_fincof().expect("sequences live on ℕ");
        let n = tail_index(inst);
        let w_inf = s.w_inf();
        if w_inf.is_positive() {
            progression = Some(Progression {
                start: a * q(n as i64) + b,
                step: *a,
                value: w_inf,
            });
        }
        let mut sums: BTreeMap<Q, Q> = BTreeMap::new();
        for i in 0..n {
            let z = inst.func.value(i).real().expect("real value");
            *sums.entry(z).or_insert(Q::zero()) += s.weight(i);
        }
        for (z, w) in sums {
            let w = match &progression {
                Some(p) if p.contains(&z) => w + p.value,
                _ => w,
            };
            if w.is_positive() {
                support.insert(z, ExtRational::Finite(w));
            }
        }
    } else {
        for y in inst.func.range().expect("finite range") {
            let z = y.real().expect("real value");
            let v = inst.space.inner(&inst.func.preimage(|p| *p == y));
            if v.is_positive() {
                support.insert(z, v);
            }
        }
    }
    let infinite = support
        .iter()
        .filter(|(_, v)| v.is_infinite())
        .map(|(k, _)| *k)
        .collect();
    Ok(PhiProfile {
        support,
        progression,
        infinite,
    })
}

pub fn phi(inst: &Instance, z: &Q) -> Result<ExtRational> {
    Ok(phi_profile(inst)?.value(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        let p1 = phi_profile(&Instance::fixture(1).unwrap()).unwrap();
        assert_eq!(p1.value(&q(0)), ExtRational::from_int(1));
        assert!(p1.is_zero(&q(1)));

        let p5 = phi_profile(&Instance::fixture(5).unwrap()).unwrap();
        assert_eq!(p5.infinite, vec![q(0), q(1)]);

        let p4 = phi_profile(&Instance::fixture(4).unwrap()).unwrap();
        assert_eq!(
            p4.progression,
            Some(Progression {
                start: q(0),
                step: q(1),
                value: q(1)
            })
        );
        for n in 0..20 {
            assert_eq!(p4.value(&q(n)), ExtRational::from_int(1));
        }
        assert!(p4.is_zero(&q(-1)) && p4.is_zero(&qf(1, 2)));

        let p6 = phi_profile(&Instance::fixture(6).unwrap()).unwrap();
        assert_eq!(p6.value(&q(0)), ExtRational::from_int(1));
        assert_eq!(p6.value(&q(5)), ExtRational::from_int(1));
    }

    #[test]
    fn density_and_zeros() {
        for n in 1..=6 {
            let p = phi_profile(&Instance::fixture(n).unwrap()).unwrap();
            assert!(p.finite_set_is_dense());
            let z = p.zero_in(q(0), q(1)).unwrap();
            assert!(z > q(0) && z < q(1));
        }
    }

    #[test]
    fn serde_round_trip() {
        let p = phi_profile(&Instance::fixture(4).unwrap()).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PhiProfile>(&json).unwrap(), p);
    }
}
