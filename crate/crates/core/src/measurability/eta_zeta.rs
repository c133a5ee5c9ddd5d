use serde::{Deserialize, Serialize};

use super::phi::{phi_profile, PhiProfile};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::Q;
use crate::uniform::{CodomainDescriptor, Point};

/// `g^{-1}(z, ∞)` (right) or `g^{-1}(-∞, z)` as a set of codomain points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulledRay {
    pub table: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub endpoint: Q,
    pub right: bool,
    pub set: Vec<Point>,
}

/// The families `η`, `ζ` and the subbase verdicts for `η`, `𝓔`, `ζ`, `𝓩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaZeta {
    /// `φ_{g∘f}` for each table.
    pub profiles: Vec<PhiProfile>,
    pub eta: Vec<PulledRay>,
    pub zeta: Vec<PulledRay>,
    pub eta_subbase: bool,
    pub entourage_subbase: bool,
    pub zeta_subbase: bool,
    pub zeta_entourage_subbase: bool,
}

/// Endpoints chosen in each open gap between consecutive values of `g`.
struct Gaps {
    values: Vec<Q>,
    /// `ends[i]` lies strictly between `values[i]` and `values[i + 1]`.
    ends: Vec<Option<Q>>,
}

impl Gaps {
    fn rays(&self, table: usize, g: &[Q], points: &[Point]) -> Vec<PulledRay> {
        let mut out = Vec::new();
        for z in self.ends.iter().flatten() {
            for right in [true, false] {
                let set = points
                    .iter()
                    .zip(g)
                    .filter(|(_, v)| if right { *v > z } else { *v < z })
                    .map(|(p, _)| p.clone())
                    .collect();
                out.push(PulledRay {
                    table,
                    endpoint: *z,
                    right,
                    set,
                });
            }
        }
        out
    }

    /// `(v⁻, v⁺)` around the value `u`: the band `{(y, y') : v⁻ < g(y') < v⁺}`
    /// of an entourage whose sections are all admissible rays.
    fn band(&self, u: Q) -> (Option<Q>, Option<Q>) {
        let i = self.values.binary_search(&u).expect("value of g");
        let lo = if i == 0 { None } else { self.ends[i - 1] };
        let hi = self.ends.get(i).copied().flatten();
        (lo, hi)
    }

    fn band_contains(&self, u: Q, w: Q) -> bool {
        // a gap without an admissible endpoint leaves that side unconstrained
        let (lo, hi) = self.band(u);
        lo.is_none_or(|l| w > l) && hi.is_none_or(|h| w < h)
    }
}

fn gaps(g: &[Q], profile: &PhiProfile, zero: bool) -> Gaps {
    let mut values = g.to_vec();
    values.sort();
    values.dedup();
    let ends = values
        .windows(2)
        .map(|w| {
            if zero {
                profile.zero_in(w[0], w[1])
            } else {
                profile.finite_in(w[0], w[1])
            }
        })
        .collect();
    Gaps { values, ends }
}

/// Whether every point `y` is the only class in the intersection of the rays containing it.
fn is_subbase(inst: &Instance, points: &[Point], rays: &[PulledRay]) -> bool {
    points.iter().all(|y| {
        points.iter().all(|z| {
            inst.codomain.same_class(y, z)
                || rays.iter().any(|r| r.set.contains(y) && !r.set.contains(z))
        })
    })
}

/// Whether the intersection of the bands of every table lies in the class relation.
fn is_entourage_subbase(inst: &Instance, points: &[Point], tables: &[Vec<Q>], gs: &[Gaps]) -> bool {
    (0..points.len()).all(|a| {
        (0..points.len()).all(|b| {
            inst.codomain.same_class(&points[a], &points[b])
                || tables
                    .iter()
                    .zip(gs)
                    .any(|(g, gap)| !gap.band_contains(g[a], g[b]))
        })
    })
}

/// Builds `η`, `ζ`, `𝓔`, `𝓩` for the real-valued tables `S` on a finite codomain.
///
/// Each ray is represented by one admissible endpoint per gap between values of
/// `g`: every endpoint inside a gap pulls back to the same set of points.
pub fn build_eta_zeta(inst: &Instance, tables: &[Vec<Q>]) -> Result<EtaZeta> {
    let points = inst
        .codomain
        .finite_points()
        .ok_or(Error::WrongBackend("a finite codomain"))?;
    let mut profiles = Vec::new();
    let (mut eta_gaps, mut zeta_gaps) = (Vec::new(), Vec::new());
    let (mut eta, mut zeta) = (Vec::new(), Vec::new());
    for (t, g) in tables.iter().enumerate() {
        if g.len() != points.len() {
            return Err(Error::InvalidFunction(format!(
                "table {t} has {} entries for {} points",
                g.len(),
                points.len()
            )));
        }
        for (a, ya) in points.iter().enumerate() {
            for (b, yb) in points.iter().enumerate() {
                if g[a] != g[b] && inst.codomain.same_class(ya, yb) {
                    return Err(Error::InvalidFunction(format!(
                        "table {t} separates points at distance zero"
                    )));
                }
            }
        }
        let h = inst.func.map(|p| {
            let i = points.iter().position(|y| y == p).expect("codomain point");
            Point::Real(g[i])
        })?;
        let real = inst.with_codomain(CodomainDescriptor::RationalLine, h)?;
        let profile = phi_profile(&real)?;
        let (ge, gz) = (gaps(g, &profile, false), gaps(g, &profile, true));
        eta.extend(ge.rays(t, g, &points));
        zeta.extend(gz.rays(t, g, &points));
        eta_gaps.push(ge);
        zeta_gaps.push(gz);
        profiles.push(profile);
    }
    Ok(EtaZeta {
        eta_subbase: is_subbase(inst, &points, &eta),
        entourage_subbase: is_entourage_subbase(inst, &points, tables, &eta_gaps),
        zeta_subbase: is_subbase(inst, &points, &zeta),
        zeta_entourage_subbase: is_entourage_subbase(inst, &points, tables, &zeta_gaps),
        profiles,
        eta,
        zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::func::Func;
    use crate::rational::q;

    fn fix7_instance(space: usize, func: Func) -> Instance {
        Instance::new(
            fixtures::space_descriptor(space).unwrap(),
            fixtures::codomain_descriptor(7).unwrap(),
            func,
        )
        .unwrap()
    }

    #[test]
    fn embedding_gives_subbase() {
        let inst = fix7_instance(2, Func::Table(vec![Point::Label(0), Point::Label(1), Point::Label(2)]));
        let ez = build_eta_zeta(&inst, &[vec![q(0), q(1), q(2)]]).unwrap();
        assert!(ez.eta_subbase && ez.entourage_subbase && ez.zeta_subbase);
        assert_eq!(ez.eta.len(), 4);
    }

    #[test]
    fn constant_table_is_not_subbase() {
        let inst = fix7_instance(1, Func::Table(vec![Point::Label(0)]));
        let ez = build_eta_zeta(&inst, &[vec![q(1), q(1), q(1)]]).unwrap();
        assert!(ez.eta.is_empty());
        assert!(!ez.eta_subbase && !ez.entourage_subbase);
    }

    #[test]
    fn parity_into_fix7_has_infinite_endpoints() {
        let func = Func::sequence(vec![], crate::func::Tail::Periodic(vec![Point::Label(0), Point::Label(1)])).unwrap();
        let inst = fix7_instance(5, func);
        let ez = build_eta_zeta(&inst, &[vec![q(0), q(1), q(2)]]).unwrap();
        assert_eq!(ez.profiles[0].infinite, vec![q(0), q(1)]);
        assert!(ez.zeta.iter().all(|r| !ez.profiles[0].infinite.contains(&r.endpoint)));
        assert!(ez.zeta_subbase);
    }

    #[test]
    fn rejects_line_codomain() {
        let inst = Instance::fixture(2).unwrap();
        assert!(matches!(build_eta_zeta(&inst, &[]), Err(Error::WrongBackend(_))));
    }
}
