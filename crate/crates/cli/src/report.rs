//! Report records and their two renderings: aligned text and JSON lines.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use unimeas::harness::{SuiteReport, Witness};
use unimeas::measurability::PhiProfile;
use unimeas::{Certificate, ExtRational, Instance, PJSandwich, Verdict};

/// One machine-readable line of output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Command {
        args: Vec<String>,
        cutoff: u64,
        grid: u32,
    },
    Verdict {
        source: String,
        instance: String,
        verdict: Verdict,
    },
    Replay {
        property: String,
        oracle_holds: bool,
        agrees: bool,
        ok: bool,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        detail: Option<String>,
    },
    Phi {
        source: String,
        instance: String,
        profile: PhiProfile,
        dense: bool,
    },
    Completion {
        source: String,
        instance: String,
        set: String,
        member: bool,
        sandwich: PJSandwich,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        charge: Option<ExtRational>,
    },
    Suite {
        report: SuiteReport,
    },
    Witness {
        witness: Witness,
    },
    Exhausted {
        claim: String,
        instances: usize,
    },
    Timing {
        millis: u128,
    },
    Error {
        code: i32,
        message: String,
    },
    Exit {
        code: i32,
    },
}

/// What a command produced: text for people, records for tools, and an exit code.
#[derive(Default)]
pub struct Report {
    pub text: String,
    pub records: Vec<Record>,
    pub code: i32,
}

impl Report {
    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "  {key:<12} {value}");
    }

    pub fn heading(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{s}");
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn render(&self, machine: bool) -> String {
        if !machine {
            return self.text.clone();
        }
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

fn certificate_summary(inst: &Instance, c: &Certificate) -> String {
    match c {
        Certificate::Partitions { levels } => format!("partitions at {} entourages", levels.len()),
        Certificate::SimpleFunctions { levels } => format!("simple functions at {} entourages", levels.len()),
        Certificate::Cover { blocks, uncovered, uncovered_outer } => format!(
            "cover by {} blocks, uncovered {} of outer charge {}",
            blocks.len(),
            inst.space.fmt_set(uncovered),
            uncovered_outer
        ),
        Certificate::Preimages { sets, .. } => format!("{} preimages in the completion", sets.len()),
        Certificate::Rays { cuts } => format!("{} ray preimages in the completion", cuts.len()),
        Certificate::Sandwiches { pairs } => format!("{} sandwiches", pairs.len()),
        Certificate::Regular { delta, depth, pieces, limit } => format!(
            "delta {}, depth {depth}, {pieces} pieces, limit {limit}",
            unimeas::rational::fmt_q(delta)
        ),
        Certificate::ClosedForm { rule } => rule.clone(),
    }
}

pub fn verdict_lines(report: &mut Report, inst: &Instance, v: &Verdict) {
    report.line("property", v.property);
    report.line("holds", v.holds);
    if let Some(c) = &v.certificate {
        report.line("certificate", certificate_summary(inst, c));
    }
    if let Some(o) = &v.obstruction {
        if let Some(e) = &o.entourage {
            report.line("entourage", e);
        }
        if !o.threshold.is_empty() {
            let t: Vec<String> = o.threshold.iter().map(unimeas::rational::fmt_q).collect();
            report.line("threshold", t.join(" "));
        }
        if let Some(w) = &o.witness {
            report.line("witness", inst.space.fmt_set(w));
        }
        report.line("infimum", o.infimum);
        report.line("reason", &o.reason);
    }
}

pub fn phi_lines(report: &mut Report, p: &PhiProfile, dense: bool) {
    if p.support.is_empty() {
        report.line("support", "none");
    }
    for (z, v) in &p.support {
        report.line("support", format!("{} -> {v}", unimeas::rational::fmt_q(z)));
    }
    match &p.progression {
        Some(g) => report.line(
            "progression",
            format!(
                "start {}, step {}, value {}",
                unimeas::rational::fmt_q(&g.start),
                unimeas::rational::fmt_q(&g.step),
                unimeas::rational::fmt_q(&g.value)
            ),
        ),
        None => report.line("progression", "none"),
    }
    let inf: Vec<String> = p.infinite.iter().map(unimeas::rational::fmt_q).collect();
    report.line("infinite", if inf.is_empty() { "none".to_string() } else { inf.join(" ") });
    report.line("dense", dense);
}
