//! Closed-form subsets of a ground set indexed by natural numbers.
//!
//! Every set is eventually periodic: membership of `n` is read from an explicit
//! prefix below `start` and from a residue pattern modulo `period` above it.
//! The three public forms are the normalizations of that pattern.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum CSet {
    /// Sorted, duplicate-free list of members.
    Finite { members: Vec<u64> },
    /// Everything except a sorted, duplicate-free list.
    Cofinite { excluded: Vec<u64> },
    /// Members of `prefix` below `start`, then every `n >= start` with `n mod period ∈ residues`.
    ///
    /// Normalized: `residues` is a nonempty proper subset of `0..period`, `period`
    /// is minimal and `start` is minimal for that period.
    PeriodicTail {
        prefix: Vec<u64>,
        period: u64,
        residues: Vec<u64>,
        start: u64,
    },
}

#[derive(Clone, Debug)]
struct Pattern {
    start: u64,
    period: u64,
    res: Vec<bool>,
    pre: Vec<bool>,
}

impl Pattern {
    fn contains(&self, n: u64) -> bool {
        if n < self.start {
            self.pre[n as usize]
        } else {
            self.res[(n % self.period) as usize]
        }
    }

    fn combine(&self, other: &Pattern, op: impl Fn(bool, bool) -> bool) -> Pattern {
        let period = self.period.lcm(&other.period);
        let start = self.start.max(other.start);
        let res = (0..period)
            .map(|i| {
                let n = start + ((i + period - start % period) % period);
                op(self.contains(n), other.contains(n))
            })
            .collect();
        let pre = (0..start)
            .map(|n| op(self.contains(n), other.contains(n)))
            .collect();
        Pattern {
            start,
            period,
            res,
            pre,
        }
    }

    fn into_cset(mut self) -> CSet {
        // minimal period
        let p = self.period;
        for d in 1..=p {
            if p.is_multiple_of(d) && (0..p as usize).all(|i| self.res[i] == self.res[i % d as usize]) {
                self.res.truncate(d as usize);
                self.period = d;
                break;
            }
        }
        // minimal start
        while self.start > 0 {
            let n = self.start - 1;
            if self.pre[n as usize] == self.res[(n % self.period) as usize] {
                self.pre.pop();
                self.start = n;
            } else {
                break;
            }
        }
        let members: Vec<u64> = (0..self.start).filter(|&n| self.pre[n as usize]).collect();
        if self.res.iter().all(|b| !b) {
            CSet::Finite { members }
        } else if self.res.iter().all(|b| *b) {
            CSet::Cofinite {
                excluded: (0..self.start).filter(|&n| !self.pre[n as usize]).collect(),
            }
        } else {
            CSet::PeriodicTail {
                prefix: members,
                period: self.period,
                residues: (0..self.period).filter(|&r| self.res[r as usize]).collect(),
                start: self.start,
            }
        }
    }
}

fn sorted_unique<I: IntoIterator<Item = u64>>(it: I) -> Vec<u64> {
    it.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

impl CSet {
    pub fn empty() -> CSet {
        CSet::Finite { members: vec![] }
    }

    /// The whole of ℕ.
    pub fn all() -> CSet {
        CSet::Cofinite { excluded: vec![] }
    }

    pub fn finite<I: IntoIterator<Item = u64>>(it: I) -> CSet {
        CSet::Finite {
            members: sorted_unique(it),
        }
    }

    pub fn singleton(n: u64) -> CSet {
        CSet::Finite { members: vec![n] }
    }

    pub fn cofinite<I: IntoIterator<Item = u64>>(excluded: I) -> CSet {
        CSet::Cofinite {
            excluded: sorted_unique(excluded),
        }
    }

    /// `{0, .., n-1}`.
    pub fn below(n: u64) -> CSet {
        CSet::Finite {
            members: (0..n).collect(),
        }
    }

    /// `{n, n+1, ..}`.
    pub fn from_index(n: u64) -> CSet {
        CSet::Cofinite {
            excluded: (0..n).collect(),
        }
    }

    /// Builds and normalizes a periodic-tail set; residues are taken modulo `period`.
    pub fn periodic<P, R>(prefix: P, period: u64, residues: R, start: u64) -> CSet
    where
        P: IntoIterator<Item = u64>,
        R: IntoIterator<Item = u64>,
    {
        assert!(period >= 1, "period must be positive");
        let prefix: BTreeSet<u64> = prefix.into_iter().collect();
        let residues: BTreeSet<u64> = residues.into_iter().map(|r| r % period).collect();
        let mut res = vec![false; period as usize];
        for r in residues {
            res[r as usize] = true;
        }
        Pattern {
            start,
            period,
            res,
            pre: (0..start).map(|n| prefix.contains(&n)).collect(),
        }
        .into_cset()
    }

    /// The residue class `{n >= start : n ≡ r (mod q)}`.
    pub fn residue_class(q: u64, r: u64, start: u64) -> CSet {
        CSet::periodic([], q, [r], start)
    }

    fn pattern(&self) -> Pattern {
        match self {
            CSet::Finite { members } => {
                let start = members.last().map_or(0, |m| m + 1);
                let mut pre = vec![false; start as usize];
                for &m in members {
                    pre[m as usize] = true;
                }
                Pattern {
                    start,
                    period: 1,
                    res: vec![false],
                    pre,
                }
            }
            CSet::Cofinite { excluded } => {
                let start = excluded.last().map_or(0, |m| m + 1);
                let mut pre = vec![true; start as usize];
                for &m in excluded {
                    pre[m as usize] = false;
                }
                Pattern {
                    start,
                    period: 1,
                    res: vec![true],
                    pre,
                }
            }
            CSet::PeriodicTail {
                prefix,
                period,
                residues,
                start,
            } => {
                let mut pre = vec![false; *start as usize];
                for &m in prefix {
                    pre[m as usize] = true;
                }
                let mut res = vec![false; *period as usize];
                for &r in residues {
                    res[r as usize] = true;
                }
                Pattern {
                    start: *start,
                    period: *period,
                    res,
                    pre,
                }
            }
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            CSet::Finite { members } => members.binary_search(&n).is_ok(),
            CSet::Cofinite { excluded } => excluded.binary_search(&n).is_err(),
            CSet::PeriodicTail {
                prefix,
                period,
                residues,
                start,
            } => {
                if n < *start {
                    prefix.binary_search(&n).is_ok()
                } else {
                    residues.binary_search(&(n % period)).is_ok()
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CSet::Finite { members } if members.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CSet::Finite { .. })
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, CSet::Cofinite { .. })
    }

    /// Infinite with infinite complement.
    pub fn is_periodic(&self) -> bool {
        matches!(self, CSet::PeriodicTail { .. })
    }

    pub fn members(&self) -> Option<&[u64]> {
        match self {
            CSet::Finite { members } => Some(members),
            _ => None,
        }
    }

    /// An index from which membership is periodic with [`CSet::period`].
    pub fn horizon(&self) -> u64 {
        match self {
            CSet::Finite { members } => members.last().map_or(0, |m| m + 1),
            CSet::Cofinite { excluded } => excluded.last().map_or(0, |m| m + 1),
            CSet::PeriodicTail { start, .. } => *start,
        }
    }

    pub fn period(&self) -> u64 {
        match self {
            CSet::PeriodicTail { period, .. } => *period,
            _ => 1,
        }
    }

    /// Members strictly below `bound`.
    pub fn members_below(&self, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&n| self.contains(n)).collect()
    }

    pub fn complement(&self) -> CSet {
        match self {
            CSet::Finite { members } => CSet::Cofinite {
                excluded: members.clone(),
            },
            CSet::Cofinite { excluded } => CSet::Finite {
                members: excluded.clone(),
            },
            CSet::PeriodicTail { .. } => {
                let p = self.pattern();
                Pattern {
                    start: p.start,
                    period: p.period,
                    res: p.res.iter().map(|b| !b).collect(),
                    pre: p.pre.iter().map(|b| !b).collect(),
                }
                .into_cset()
            }
        }
    }

    pub fn union(&self, other: &CSet) -> CSet {
        if let (CSet::Finite { members: a }, CSet::Finite { members: b }) = (self, other) {
            return CSet::finite(a.iter().chain(b).copied());
        }
        self.pattern()
            .combine(&other.pattern(), |x, y| x || y)
            .into_cset()
    }

    pub fn intersection(&self, other: &CSet) -> CSet {
        if let (CSet::Finite { members: a }, CSet::Finite { members: b }) = (self, other) {
            return CSet::Finite {
                members: a.iter().filter(|m| b.binary_search(m).is_ok()).copied().collect(),
            };
        }
        self.pattern()
            .combine(&other.pattern(), |x, y| x && y)
            .into_cset()
    }

    pub fn difference(&self, other: &CSet) -> CSet {
        if let (CSet::Finite { members: a }, CSet::Finite { members: b }) = (self, other) {
            return CSet::Finite {
                members: a.iter().filter(|m| b.binary_search(m).is_err()).copied().collect(),
            };
        }
        self.pattern()
            .combine(&other.pattern(), |x, y| x && !y)
            .into_cset()
    }

    pub fn is_subset(&self, other: &CSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &CSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a CSet>>(sets: I) -> CSet {
        sets.into_iter().fold(CSet::empty(), |acc, s| acc.union(s))
    }
}

fn fmt_list(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for CSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CSet::Finite { members } => f.write_str(&fmt_list(members)),
            CSet::Cofinite { excluded } => write!(f, "co{}", fmt_list(excluded)),
            CSet::PeriodicTail {
                prefix,
                period,
                residues,
                start,
            } => write!(
                f,
                "per(prefix={}; q={}; r={}; from={})",
                fmt_list(prefix),
                period,
                fmt_list(residues),
                start
            ),
        }
    }
}

fn parse_braced(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| format!("expected '{{..}}', got '{s}'"))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| format!("not an index: '{t}'")))
        .collect()
}

impl FromStr for CSet {
    type Err = String;

    /// Accepts `{0,2}`, `co{1}` and `per(prefix={..}; q=2; r={0}; from=4)`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("co") {
            return Ok(CSet::cofinite(parse_braced(rest)?));
        }
        if let Some(rest) = s.strip_prefix("per(").and_then(|t| t.strip_suffix(')')) {
            let (mut prefix, mut period, mut residues, mut start) = (vec![], None, None, 0);
            for part in rest.split(';') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| format!("expected key=value in '{part}'"))?;
                match k.trim() {
                    "prefix" => prefix = parse_braced(v)?,
                    "q" => period = Some(v.trim().parse::<u64>().map_err(|e| e.to_string())?),
                    "r" => residues = Some(parse_braced(v)?),
                    "from" => start = v.trim().parse::<u64>().map_err(|e| e.to_string())?,
                    other => return Err(format!("unknown periodic key '{other}'")),
                }
            }
            let period = period.ok_or("periodic set needs q")?;
            if period == 0 {
                return Err("period must be positive".into());
            }
            if prefix.iter().any(|&p| p >= start) {
                return Err("prefix members must lie below 'from'".into());
            }
            return Ok(CSet::periodic(prefix, period, residues.unwrap_or_default(), start));
        }
        Ok(CSet::finite(parse_braced(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_cset() -> impl Strategy<Value = CSet> {
        (
            0u64..8,
            1u64..5,
            proptest::collection::vec(any::<bool>(), 0..8),
            proptest::collection::vec(any::<bool>(), 5),
        )
            .prop_map(|(start, period, pre, res)| {
                let prefix = (0..start).filter(|&n| pre.get(n as usize).copied().unwrap_or(false));
                let residues = (0..period).filter(|&r| res[r as usize]);
                CSet::periodic(prefix, period, residues, start)
            })
    }

    const WINDOW: u64 = 120;

    fn bits(s: &CSet) -> Vec<bool> {
        (0..WINDOW).map(|n| s.contains(n)).collect()
    }

    #[test]
    fn normalization_collapses_trivial_residues() {
        assert_eq!(CSet::periodic([1], 2, [], 3), CSet::finite([1]));
        assert_eq!(CSet::periodic([1], 2, [0, 1], 3), CSet::cofinite([0, 2]));
        assert_eq!(CSet::periodic([0, 2], 2, [0], 4), CSet::residue_class(2, 0, 0));
        assert_eq!(CSet::periodic([], 4, [0, 2], 0), CSet::residue_class(2, 0, 0));
    }

    #[test]
    fn evens_are_infinite_and_coinfinite() {
        let evens = CSet::residue_class(2, 0, 0);
        assert!(evens.is_periodic());
        assert!(evens.contains(10) && !evens.contains(7));
        assert_eq!(evens.complement(), CSet::residue_class(2, 1, 0));
        assert_eq!(evens.union(&evens.complement()), CSet::all());
    }

    #[test]
    fn display_parse_examples() {
        let s: CSet = "per(prefix={1}; q=2; r={0}; from=3)".parse().unwrap();
        assert!(s.contains(1) && !s.contains(0) && s.contains(4) && !s.contains(5));
        assert_eq!(s.to_string().parse::<CSet>().unwrap(), s);
        assert_eq!("co{1,3}".parse::<CSet>().unwrap(), CSet::cofinite([3, 1]));
        assert!("{x}".parse::<CSet>().is_err());
    }

    proptest! {
        #[test]
        fn boolean_ops_match_membership(a in arb_cset(), b in arb_cset()) {
            let (ba, bb) = (bits(&a), bits(&b));
            let u = bits(&a.union(&b));
            let i = bits(&a.intersection(&b));
            let d = bits(&a.difference(&b));
            let c = bits(&a.complement());
            for n in 0..WINDOW as usize {
                prop_assert_eq!(u[n], ba[n] || bb[n]);
                prop_assert_eq!(i[n], ba[n] && bb[n]);
                prop_assert_eq!(d[n], ba[n] && !bb[n]);
                prop_assert_eq!(c[n], !ba[n]);
            }
        }

        #[test]
        fn normal_form_is_canonical(a in arb_cset(), b in arb_cset()) {
            // equal membership on a window longer than every horizon + period means equal sets
            prop_assert_eq!(bits(&a) == bits(&b), a == b);
            prop_assert_eq!(a.to_string().parse::<CSet>().unwrap(), a);
        }
    }
}
