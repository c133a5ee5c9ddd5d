//! Instances `(space, codomain, f)` and their line-oriented text format.
//!
//! ```text
//! # comments start with '#'
//! [space]
//! kind = finite
//! points = [a, b, c]
//! generators = [[a]]
//! weights = [1, 1, 1]
//!
//! [codomain]
//! kind = rational-line
//!
//! [function]
//! a = 0
//! b = 1
//! c = 2
//! ```
//!
//! On ℕ the space reads `kind = fincof`, `prefix = [..]`, `winf = w`, `minf = m|inf`
//! and the function `prefix = [..]` plus `tail = constant y | periodic [..] | affine a b`.
//! Codomains are `rational-line`, `metric` (`points`, `distances`), `weak`
//! (`points`, `tables`) or `product` followed by `[factor 1]`, `[factor 2]`, ..
//! sections. Before the first section, `instance = FIXn`, `space = FIXn` and
//! `codomain = FIX7 | rational-line` expand fixtures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::func::{Func, Tail};
use crate::rational::{fmt_q, parse_q, ExtRational, Q};
use crate::space::{build_space, ChargeSpace, SpaceDescriptor};
use crate::uniform::{build_codomain, split_top_level, CodomainDescriptor, Point, UniformCodomain};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub space_desc: SpaceDescriptor,
    pub codomain_desc: CodomainDescriptor,
    pub space: ChargeSpace,
    pub codomain: UniformCodomain,
    pub func: Func,
}

impl Instance {
    pub fn new(
        space_desc: SpaceDescriptor,
        codomain_desc: CodomainDescriptor,
        func: Func,
    ) -> Result<Instance> {
        let space = build_space(&space_desc)?;
        let codomain = build_codomain(&codomain_desc)?;
        func.validate(&space, &codomain)?;
        Ok(Instance {
            space_desc,
            codomain_desc,
            space,
            codomain,
            func,
        })
    }

    /// `FIXn` for `n` in `1..=6`.
    pub fn fixture(n: usize) -> Option<Instance> {
        Some(
            Instance::new(
                fixtures::space_descriptor(n)?,
                fixtures::codomain_descriptor(n)?,
                fixtures::function(n)?,
            )
            .expect("valid fixture"),
        )
    }

    /// Same space and codomain, another function.
    pub fn with_func(&self, func: Func) -> Result<Instance> {
        func.validate(&self.space, &self.codomain)?;
        Ok(Instance {
            func,
            ..self.clone()
        })
    }

    /// Same space, another codomain and function.
    pub fn with_codomain(&self, codomain_desc: CodomainDescriptor, func: Func) -> Result<Instance> {
        Instance::new(self.space_desc.clone(), codomain_desc, func)
    }

    pub fn is_real(&self) -> bool {
        self.codomain.is_line()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn fmt_list<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    let parts: Vec<String> = xs.iter().map(f).collect();
    format!("[{}]", parts.join(", "))
}

fn write_codomain(out: &mut String, desc: &CodomainDescriptor) {
    match desc {
        CodomainDescriptor::RationalLine => out.push_str("kind = rational-line\n"),
        CodomainDescriptor::FiniteMetric { points, distances } => {
            out.push_str("kind = metric\n");
            out.push_str(&format!("points = {}\n", fmt_list(points, |s| s.clone())));
            out.push_str(&format!(
                "distances = {}\n",
                fmt_list(distances, |row| fmt_list(row, fmt_q))
            ));
        }
        CodomainDescriptor::WeakFamily { points, tables } => {
            out.push_str("kind = weak\n");
            out.push_str(&format!("points = {}\n", fmt_list(points, |s| s.clone())));
            out.push_str(&format!(
                "tables = {}\n",
                fmt_list(tables, |row| fmt_list(row, fmt_q))
            ));
        }
        CodomainDescriptor::Product(factors) => {
            out.push_str("kind = product\n");
            for (k, f) in factors.iter().enumerate() {
                out.push_str(&format!("\n[factor {}]\n", k + 1));
                write_codomain(out, f);
            }
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::from("[space]\n");
        match &self.space_desc {
            SpaceDescriptor::Finite {
                points,
                generators,
                weights,
            } => {
                out.push_str("kind = finite\n");
                out.push_str(&format!("points = {}\n", fmt_list(points, |s| s.clone())));
                out.push_str(&format!(
                    "generators = {}\n",
                    fmt_list(generators, |g| fmt_list(g, |&i| points[i].clone()))
                ));
                out.push_str(&format!("weights = {}\n", fmt_list(weights, fmt_q)));
            }
            SpaceDescriptor::FinCofNat {
                prefix,
                w_inf,
                m_inf,
            } => {
                out.push_str("kind = fincof\n");
                out.push_str(&format!("prefix = {}\n", fmt_list(prefix, fmt_q)));
                out.push_str(&format!("winf = {}\n", fmt_q(w_inf)));
                out.push_str(&format!("minf = {m_inf}\n"));
            }
        }
        out.push_str("\n[codomain]\n");
        write_codomain(&mut out, &self.codomain_desc);
        out.push_str("\n[function]\n");
        let pt = |p: &Point| self.codomain.fmt_point(p);
        match &self.func {
            Func::Table(vs) => {
                for (x, v) in vs.iter().enumerate() {
                    out.push_str(&format!("{} = {}\n", self.space.point_name(x as u64), pt(v)));
                }
            }
            Func::Sequence { prefix, tail } => {
                out.push_str(&format!("prefix = {}\n", fmt_list(prefix, pt)));
                let t = match tail {
                    Tail::Constant(y) => format!("constant {}", pt(y)),
                    Tail::Periodic(vs) => format!("periodic {}", fmt_list(vs, pt)),
                    Tail::Affine { a, b } => format!("affine {} {}", fmt_q(a), fmt_q(b)),
                };
                out.push_str(&format!("tail = {t}\n"));
            }
        }
        f.write_str(&out)
    }
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }

    fn require(&mut self, key: &str) -> Result<Entry> {
        self.take(key).ok_or_else(|| {
            Error::parse(self.line, format!("section [{}] needs '{key}'", self.name))
        })
    }

    fn finish(&self) -> Result<()> {
        match self.entries.first() {
            Some(e) => Err(Error::parse(
                e.line,
                format!("unknown key '{}' in [{}]", e.key, self.name),
            )),
            None => Ok(()),
        }
    }
}

fn list(e: &Entry) -> Result<Vec<&str>> {
    let inner = e
        .value
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::parse(e.line, format!("'{}' expects a bracketed list", e.key)))?;
    Ok(split_top_level(inner, ','))
}

fn sublist(e: &Entry, s: &str) -> Result<Vec<String>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::parse(e.line, format!("'{}' expects nested lists", e.key)))?;
    Ok(split_top_level(inner, ',').into_iter().map(String::from).collect())
}

fn rational(line: usize, s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| Error::parse(line, format!("expected a rational, found '{s}'")))
}

fn rationals(e: &Entry) -> Result<Vec<Q>> {
    list(e)?.into_iter().map(|s| rational(e.line, s)).collect()
}

fn matrix(e: &Entry) -> Result<Vec<Vec<Q>>> {
    list(e)?
        .into_iter()
        .map(|row| sublist(e, row)?.iter().map(|s| rational(e.line, s)).collect())
        .collect()
}

fn check_name(line: usize, s: &str) -> Result<String> {
    let bad = |c: char| c.is_whitespace() || "[](){},=#".contains(c);
    if s.is_empty() || s.chars().any(bad) {
        return Err(Error::parse(line, format!("invalid point name '{s}'")));
    }
    Ok(s.to_string())
}

fn names(e: &Entry) -> Result<Vec<String>> {
    list(e)?.into_iter().map(|s| check_name(e.line, s)).collect()
}

fn fixture_index(line: usize, s: &str) -> Result<usize> {
    fixtures::parse_name(s).ok_or_else(|| Error::parse(line, format!("unknown fixture '{s}'")))
}

fn split_sections(text: &str) -> Result<(Section, Vec<Section>)> {
    let mut top = Section {
        name: "top level".into(),
        line: 1,
        entries: vec![],
    };
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let name = name.split_whitespace().collect::<Vec<_>>().join(" ");
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::parse(line, format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name,
                line,
                entries: vec![],
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected 'key = value', found '{content}'")))?;
        let key = key.trim().to_string();
        let target = sections.last_mut().unwrap_or(&mut top);
        if target.entries.iter().any(|e| e.key == key) {
            return Err(Error::parse(line, format!("duplicate key '{key}'")));
        }
        target.entries.push(Entry {
            key,
            value: value.trim().to_string(),
            line,
        });
    }
    Ok((top, sections))
}

fn parse_space(sec: &mut Section) -> Result<SpaceDescriptor> {
    let kind = sec.require("kind")?;
    let desc = match kind.value.as_str() {
        "finite" => {
            let pe = sec.require("points")?;
            let points = names(&pe)?;
            let generators = match sec.take("generators") {
                None => vec![],
                Some(ge) => list(&ge)?
                    .into_iter()
                    .map(|g| {
                        sublist(&ge, g)?
                            .iter()
                            .map(|n| {
                                points.iter().position(|p| p == n).ok_or_else(|| {
                                    Error::parse(ge.line, format!("generator names unknown point '{n}'"))
                                })
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?,
            };
            let we = sec.require("weights")?;
            let weights = rationals(&we)?;
            if weights.len() != points.len() {
                return Err(Error::parse(we.line, "one weight per point expected"));
            }
            if let Some(w) = weights.iter().find(|w| **w < Q::from_integer(0)) {
                return Err(Error::parse(we.line, format!("negative weight {}", fmt_q(w))));
            }
            SpaceDescriptor::Finite {
                points,
                generators,
                weights,
            }
        }
        "fincof" => {
            let prefix = match sec.take("prefix") {
                Some(e) => rationals(&e)?,
                None => vec![],
            };
            let we = sec.require("winf")?;
            let w_inf = rational(we.line, &we.value)?;
            let m_inf = match sec.take("minf") {
                Some(e) => e
                    .value
                    .parse::<ExtRational>()
                    .map_err(|m| Error::parse(e.line, m))?,
                None if w_inf > Q::from_integer(0) => ExtRational::INF,
                None => ExtRational::zero(),
            };
            for (w, line) in prefix.iter().map(|w| (w, sec.line)).chain([(&w_inf, we.line)]) {
                if *w < Q::from_integer(0) {
                    return Err(Error::parse(line, format!("negative weight {}", fmt_q(w))));
                }
            }
            if matches!(m_inf, ExtRational::Finite(m) if m < Q::from_integer(0)) {
                return Err(Error::parse(sec.line, "negative mass at infinity"));
            }
            SpaceDescriptor::FinCofNat {
                prefix,
                w_inf,
                m_inf,
            }
        }
        other => {
            return Err(Error::parse(kind.line, format!("unknown space kind '{other}'")));
        }
    };
    sec.finish()?;
    Ok(desc)
}

fn parse_codomain(sec: &mut Section, factors: &mut Vec<Section>) -> Result<CodomainDescriptor> {
    let kind = sec.require("kind")?;
    let desc = match kind.value.as_str() {
        "rational-line" => CodomainDescriptor::RationalLine,
        "metric" => {
            let points = names(&sec.require("points")?)?;
            let distances = matrix(&sec.require("distances")?)?;
            CodomainDescriptor::FiniteMetric { points, distances }
        }
        "weak" => {
            let points = names(&sec.require("points")?)?;
            let tables = matrix(&sec.require("tables")?)?;
            CodomainDescriptor::WeakFamily { points, tables }
        }
        "product" if !factors.is_empty() => {
            let mut out = Vec::new();
            let mut rest = std::mem::take(factors);
            for mut f in rest.drain(..) {
                out.push(parse_codomain(&mut f, &mut vec![])?);
            }
            CodomainDescriptor::Product(out)
        }
        "product" => return Err(Error::parse(kind.line, "product needs [factor k] sections")),
        other => match fixtures::parse_name(other).and_then(fixtures::codomain_descriptor) {
            Some(d) => d,
            None => {
                return Err(Error::parse(kind.line, format!("unknown codomain kind '{other}'")))
            }
        },
    };
    sec.finish()?;
    Ok(desc)
}

fn parse_point(y: &UniformCodomain, line: usize, s: &str) -> Result<Point> {
    y.parse_point(s)
        .map_err(|_| Error::parse(line, format!("'{s}' is not a codomain point")))
}

fn parse_function(sec: &mut Section, space: &ChargeSpace, y: &UniformCodomain) -> Result<Func> {
    if let Some(s) = space.as_finite() {
        let mut vs = Vec::with_capacity(s.len());
        for name in s.names() {
            let e = sec.require(name)?;
            vs.push(parse_point(y, e.line, &e.value)?);
        }
        sec.finish()?;
        return Ok(Func::Table(vs));
    }
    let prefix = match sec.take("prefix") {
        Some(e) => list(&e)?
            .into_iter()
            .map(|s| parse_point(y, e.line, s))
            .collect::<Result<_>>()?,
        None => vec![],
    };
    let te = sec.require("tail")?;
    let (form, rest) = te.value.split_once(char::is_whitespace).unwrap_or((&te.value, ""));
    let rest = rest.trim();
    let tail = match form {
        "constant" => Tail::Constant(parse_point(y, te.line, rest)?),
        "periodic" => {
            let e = Entry {
                key: "tail".into(),
                value: rest.to_string(),
                line: te.line,
            };
            Tail::Periodic(
                list(&e)?
                    .into_iter()
                    .map(|s| parse_point(y, te.line, s))
                    .collect::<Result<_>>()?,
            )
        }
        "affine" => {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::parse(te.line, "affine tail expects 'affine a b'"));
            }
            Tail::Affine {
                a: rational(te.line, parts[0])?,
                b: rational(te.line, parts[1])?,
            }
        }
        other => return Err(Error::parse(te.line, format!("unknown tail form '{other}'"))),
    };
    sec.finish()?;
    Func::sequence(prefix, tail).map_err(|e| Error::parse(te.line, e.to_string()))
}

/// Maps build errors onto the line of the section that caused them.
fn at(line: usize, r: Result<()>) -> Result<()> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let (mut top, sections) = split_sections(text)?;
    let mut space_desc = None;
    let mut codomain_desc = None;
    let mut func = None;
    if let Some(e) = top.take("instance") {
        let n = fixture_index(e.line, &e.value)?;
        let inst = Instance::fixture(n)
            .ok_or_else(|| Error::parse(e.line, format!("{} is not a full instance", e.value)))?;
        space_desc = Some((inst.space_desc, e.line));
        codomain_desc = Some((inst.codomain_desc, e.line));
        func = Some(inst.func);
    }
    if let Some(e) = top.take("space") {
        let n = fixture_index(e.line, &e.value)?;
        let d = fixtures::space_descriptor(n)
            .ok_or_else(|| Error::parse(e.line, format!("{} is not a space", e.value)))?;
        space_desc = Some((d, e.line));
    }
    if let Some(e) = top.take("codomain") {
        let d = if e.value == "rational-line" {
            CodomainDescriptor::RationalLine
        } else {
            fixtures::parse_name(&e.value)
                .and_then(fixtures::codomain_descriptor)
                .ok_or_else(|| Error::parse(e.line, format!("unknown codomain '{}'", e.value)))?
        };
        codomain_desc = Some((d, e.line));
    }
    top.finish()?;

    let mut by_name: BTreeMap<String, Section> = BTreeMap::new();
    let mut factors: Vec<Section> = Vec::new();
    for s in sections {
        match s.name.as_str() {
            "space" | "codomain" | "function" => {
                by_name.insert(s.name.clone(), s);
            }
            n if n.starts_with("factor ") => {
                let k: usize = n[7..]
                    .parse()
                    .map_err(|_| Error::parse(s.line, format!("bad section [{n}]")))?;
                if k != factors.len() + 1 {
                    return Err(Error::parse(s.line, "factor sections must be numbered 1, 2, .."));
                }
                factors.push(s);
            }
            n => return Err(Error::parse(s.line, format!("unknown section [{n}]"))),
        }
    }
    if let Some(mut s) = by_name.remove("space") {
        space_desc = Some((parse_space(&mut s)?, s.line));
    }
    if let Some(mut s) = by_name.remove("codomain") {
        codomain_desc = Some((parse_codomain(&mut s, &mut factors)?, s.line));
    }
    if let Some(f) = factors.first() {
        return Err(Error::parse(f.line, "[factor] sections need a product codomain"));
    }
    let (space_desc, space_line) =
        space_desc.ok_or_else(|| Error::parse(1, "missing [space] section"))?;
    let (codomain_desc, codomain_line) =
        codomain_desc.ok_or_else(|| Error::parse(1, "missing [codomain] section"))?;
    let space = build_space(&space_desc).map_err(|e| Error::parse(space_line, e.to_string()))?;
    let codomain =
        build_codomain(&codomain_desc).map_err(|e| Error::parse(codomain_line, e.to_string()))?;
    let (func, func_line) = match by_name.remove("function") {
        Some(mut s) => (parse_function(&mut s, &space, &codomain)?, s.line),
        None => (
            func.ok_or_else(|| Error::parse(1, "missing [function] section"))?,
            1,
        ),
    };
    at(func_line, func.validate(&space, &codomain))?;
    Ok(Instance {
        space_desc,
        codomain_desc,
        space,
        codomain,
        func,
    })
}

impl FromStr for Instance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Instance> {
        parse_instance(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn fixture_shorthands_expand() {
        let a: Instance = "space = FIX2\ncodomain = rational-line\n[function]\na = 0\nb = 1\nc = 2\n"
            .parse()
            .unwrap();
        assert_eq!(a, Instance::fixture(2).unwrap());
        let b: Instance = "instance = FIX4".parse().unwrap();
        assert_eq!(b, Instance::fixture(4).unwrap());
    }

    #[test]
    fn fincof_document() {
        let text = "[space]\nkind = fincof\nprefix = []\nwinf = 1\n\n[codomain]\nkind = rational-line\n\n[function]\ntail = affine 1 0\n";
        assert_eq!(parse_instance(text).unwrap(), Instance::fixture(4).unwrap());
    }

    #[test]
    fn negative_weight_reports_line() {
        let text = "[space]\nkind = fincof\nwinf = -1\n[codomain]\nkind = rational-line\n[function]\ntail = constant 0\n";
        match parse_instance(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let text = "instance = FIX1\nfoo = 1\n";
        assert!(matches!(parse_instance(text), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn fixtures_round_trip() {
        for n in 1..=6 {
            let inst = Instance::fixture(n).unwrap();
            assert_eq!(inst.to_text().parse::<Instance>().unwrap(), inst);
        }
    }

    #[test]
    fn product_round_trip() {
        let inst = Instance::new(
            fixtures::space_descriptor(2).unwrap(),
            CodomainDescriptor::Product(vec![
                fixtures::codomain_descriptor(7).unwrap(),
                CodomainDescriptor::RationalLine,
            ]),
            Func::Table(
                (0..3)
                    .map(|i| Point::Tuple(vec![Point::Label(i), Point::Real(q(i as i64))]))
                    .collect(),
            ),
        )
        .unwrap();
        let text = inst.to_text();
        assert!(text.contains("[factor 2]"));
        assert_eq!(text.parse::<Instance>().unwrap(), inst);
    }
}
