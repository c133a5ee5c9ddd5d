//! Acceptance run: one PASS/FAIL line per criterion over the default enumeration.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use unimeas::harness::{enumerate_instances, run_suite_on, search_on, Claim, InstanceParams, OracleOptions, Suite, SuiteReport};
use unimeas::Instance;

struct Line {
    ok: bool,
    name: String,
    detail: String,
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn suite_line(names: &str, reports: &[&SuiteReport]) -> Line {
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let parts: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {}/{} checks", r.suite, r.violations.len(), r.checks))
        .collect();
    if let Some(v) = reports.iter().flat_map(|r| &r.violations).next() {
        eprintln!("first violation: {}\n{}", v.detail, v.instance);
    }
    Line {
        ok: violations == 0 && reports.iter().all(|r| r.instances > 0),
        name: names.to_string(),
        detail: format!("violations/checks: {}", parts.join(", ")),
    }
}

fn main() -> ExitCode {
    let params = InstanceParams::default();
    let opts = OracleOptions::default();
    let instances = enumerate_instances(&params).expect("default enumeration fits the cap");
    let finite = instances.iter().filter(|i| i.space.is_finite()).count();
    println!(
        "enumerated {} instances ({} finite, {} on the naturals)",
        instances.len(),
        finite,
        instances.len() - finite
    );

    let reports: Vec<SuiteReport> = Suite::ALL
        .into_iter()
        .map(|s| {
            let t = Instant::now();
            let mut r = run_suite_on(s, &instances, opts);
            r.wall = t.elapsed();
            r
        })
        .collect();
    let get = |s: Suite| &reports[Suite::ALL.iter().position(|x| *x == s).unwrap()];

    let mut lines = Vec::new();
    let s1 = get(Suite::S1);
    let mut l = suite_line("S1 T1 iff T2, T2 implies smooth", &[s1]);
    l.detail.push_str(&format!(", {} (target < 60 s)", secs(s1.wall)));
    l.ok &= s1.wall < Duration::from_secs(60);
    lines.push(l);
    lines.push(suite_line("S3 ubm, base and T2", &[get(Suite::S3)]));
    lines.push(suite_line("S2 conventional, finite fields", &[get(Suite::S2)]));
    lines.push(suite_line("S8/S9 equivalences under density", &[get(Suite::S8), get(Suite::S9)]));

    let s10 = get(Suite::S10);
    let mut l = suite_line(
        "S4/S5/S6/S7/S10 scoped suites",
        &[get(Suite::S4), get(Suite::S5), get(Suite::S6), get(Suite::S7), s10],
    );
    let coarsenings = s10.tallies.get("coarsening").copied().unwrap_or(0);
    let products = s10.tallies.get("product").copied().unwrap_or(0);
    l.detail.push_str(&format!("; S10 {coarsenings} coarsenings, {products} products"));
    l.ok &= coarsenings > 0 && products > 0;
    lines.push(l);

    let s11 = get(Suite::S11);
    let mut l = suite_line("S11 deciders agree with oracles", &[s11]);
    let tally = |k: &str| s11.tallies.get(k).copied().unwrap_or(0);
    let fincof = instances.len() - finite;
    l.detail.push_str(&format!(
        "; {} finite, {} on the naturals at cutoff {} and {} at {}, {} (target < 300 s)",
        tally("finite"),
        tally("fincof-1x"),
        opts.cutoff,
        tally("fincof-4x"),
        4 * opts.cutoff,
        secs(s11.wall)
    ));
    l.ok &= tally("finite") >= 10_000
        && tally("fincof-1x") == fincof
        && tally("fincof-4x") == fincof
        && opts.cutoff == 16
        && s11.wall < Duration::from_secs(300);
    lines.push(l);

    for c in Claim::ALL {
        let w = search_on(c, &instances, opts).ok().flatten();
        let found = w.as_ref().and_then(|w| w.fixture.clone());
        lines.push(Line {
            ok: found.as_deref() == Some(c.expected()) && w.as_ref().is_some_and(|w| w.confirmed()),
            name: format!("{c} pinned witness"),
            detail: format!(
                "expected {}, found {}{}",
                c.expected(),
                found.as_deref().unwrap_or("none"),
                if w.is_some_and(|w| w.confirmed()) { ", decider, oracle and replay agree" } else { "" }
            ),
        });
    }

    let replayed: usize = reports.iter().map(|r| r.replayed).sum();
    let failures: usize = reports.iter().map(|r| r.replay_failures).sum();
    lines.push(Line {
        ok: failures == 0 && replayed > 0,
        name: "certificate and obstruction replay".to_string(),
        detail: format!("{} of {replayed} replayed verdicts validate", replayed - failures),
    });

    let fixtures_ok = (1..=6).all(|n| Instance::fixture(n).is_some_and(|f| instances.contains(&f)));
    lines.push(Line {
        ok: fixtures_ok,
        name: "fixtures FIX1-FIX6 enumerated".to_string(),
        detail: String::new(),
    });

    for l in &lines {
        println!("{}  {:<36} {}", if l.ok { "PASS" } else { "FAIL" }, l.name, l.detail);
    }
    if lines.iter().all(|l| l.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
