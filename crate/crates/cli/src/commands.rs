use std::path::Path;

use unimeas::harness::{enumerate_instances, replay, run_suite_on, search_on, Claim, InstanceParams, Oracle, OracleOptions, Suite};
use unimeas::measurability::phi_profile;
use unimeas::{decide, parse_instance, Error, Instance, Property};

use crate::report::{phi_lines, verdict_lines, Record, Report};
use crate::{Bounds, Command};

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::ResourceCap(_) | Error::FieldTooLarge { .. } | Error::NoRegularDelta { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Reads an instance file; `FIXn` names a built-in fixture when no such file exists.
fn load(source: &str) -> Result<Instance, Failure> {
    let path = Path::new(source);
    if !path.exists() {
        let fixture = source
            .strip_prefix("FIX")
            .or_else(|| source.strip_prefix("fix"))
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(Instance::fixture);
        return fixture.ok_or_else(|| Failure {
            code: 2,
            message: format!("{source}: no such file"),
        });
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{source}: {e}"),
    })?;
    parse_instance(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{source}: {}", f.message),
            ..f
        }
    })
}

fn params(b: &Bounds) -> InstanceParams {
    InstanceParams {
        fincof: !b.no_fincof,
        fixtures: !b.no_fixtures,
        cap: b.cap,
        ..InstanceParams::with_max_points(b.max_points)
    }
}

pub fn run(cmd: &Command, opts: OracleOptions, report: &mut Report) -> Result<(), Failure> {
    match cmd {
        Command::Decide { property, file } => {
            let p: Property = property.parse()?;
            let inst = load(file)?;
            let v = decide(p, &inst)?;
            report.heading(format!("decide {p} {file}"));
            verdict_lines(report, &inst, &v);
            report.code = if v.holds { 0 } else { 1 };
            report.push(Record::Verdict {
                source: file.clone(),
                instance: inst.to_text(),
                verdict: v,
            });
        }
        Command::Certify { property, file } => {
            let p: Property = property.parse()?;
            let inst = load(file)?;
            let v = decide(p, &inst)?;
            let oracle = Oracle::new(&inst, opts)?;
            let o = oracle.decide(p)?;
            let replayed = replay(&oracle, &v);
            let agrees = o.holds == v.holds;
            let ok = agrees && replayed.is_ok();
            report.heading(format!("certify {p} {file}"));
            verdict_lines(report, &inst, &v);
            report.line("oracle", o.holds);
            match &replayed {
                Ok(()) => report.line("replay", "ok"),
                Err(d) => report.line("replay", format!("FAILED: {d}")),
            }
            report.code = if ok && v.holds { 0 } else { 1 };
            report.push(Record::Verdict {
                source: file.clone(),
                instance: inst.to_text(),
                verdict: v,
            });
            report.push(Record::Replay {
                property: p.to_string(),
                oracle_holds: o.holds,
                agrees,
                ok,
                detail: replayed.err(),
            });
        }
        Command::Phi { file } => {
            let inst = load(file)?;
            let profile = phi_profile(&inst)?;
            let dense = profile.finite_set_is_dense();
            report.heading(format!("phi {file}"));
            phi_lines(report, &profile, dense);
            report.push(Record::Phi {
                source: file.clone(),
                instance: inst.to_text(),
                profile,
                dense,
            });
        }
        Command::Complete { file, set } => {
            let inst = load(file)?;
            let a = inst.space.parse_set(set)?;
            let (member, sandwich) = inst.space.pj_membership(&a);
            let charge = if member { Some(inst.space.pj_charge(&a)?) } else { None };
            let name = inst.space.fmt_set(&a);
            report.heading(format!("complete {file} {name}"));
            report.line("member", member);
            report.line("lower", inst.space.fmt_set(&sandwich.lower));
            report.line("upper", inst.space.fmt_set(&sandwich.upper));
            report.line("gap", sandwich.gap_infimum);
            if let Some(c) = &charge {
                report.line("charge", c);
            }
            report.code = if member { 0 } else { 1 };
            report.push(Record::Completion {
                source: file.clone(),
                instance: inst.to_text(),
                set: name,
                member,
                sandwich,
                charge,
            });
        }
        Command::Suite { id, bounds } => {
            let suites: Vec<Suite> = if id.eq_ignore_ascii_case("all") {
                Suite::ALL.to_vec()
            } else {
                vec![id.parse()?]
            };
            let instances = enumerate_instances(&params(bounds))?;
            for (k, s) in suites.into_iter().enumerate() {
                let r = run_suite_on(s, &instances, opts);
                if k > 0 {
                    report.heading("");
                }
                report.heading(r.to_string().trim_end());
                if !r.passed() {
                    report.code = 1;
                }
                report.push(Record::Suite { report: r });
            }
        }
        Command::Search { claim, bounds } => {
            let c: Claim = claim.parse()?;
            let instances = enumerate_instances(&params(bounds))?;
            match search_on(c, &instances, opts)? {
                Some(w) => {
                    report.heading(w.to_string().trim_end());
                    report.code = if w.confirmed() { 0 } else { 1 };
                    report.push(Record::Witness { witness: w });
                }
                None => {
                    report.heading(format!("claim      {c} ({})", c.describe()));
                    report.line("exhausted", format!("{} instances, no witness", instances.len()));
                    report.code = 1;
                    report.push(Record::Exhausted {
                        claim: c.to_string(),
                        instances: instances.len(),
                    });
                }
            }
        }
    }
    Ok(())
}
