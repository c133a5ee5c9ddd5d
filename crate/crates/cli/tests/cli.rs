use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use unimeas::harness::{run_suite, InstanceParams, OracleOptions, Suite, SuiteReport, Witness};
use unimeas::measurability::{phi_profile, PhiProfile};
use unimeas::{decide, parse_instance, Instance, Property, Verdict};

fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unimeas"))
        .current_dir(instances_dir())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is one JSON record"))
        .collect()
}

fn record<'a>(rs: &'a [Value], kind: &str) -> &'a Value {
    rs.iter().find(|r| r["record"] == kind).unwrap_or_else(|| panic!("no {kind} record"))
}

fn load(name: &str) -> Instance {
    parse_instance(&std::fs::read_to_string(instances_dir().join(name)).unwrap()).unwrap()
}

#[test]
fn decide_t2_on_fix2_reports_the_obstruction() {
    let o = run(&["decide", "t2", "fix2.inst"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("holds        false"), "{text}");
    assert!(text.contains("entourage    d0<1/2"), "{text}");
    assert!(text.contains("infimum      2\n"), "{text}");
}

#[test]
fn phi_on_fix4_is_a_progression() {
    let o = run(&["phi", "fix4.inst"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("progression  start 0, step 1, value 1"));
}

#[test]
fn suite_s1_passes() {
    let o = run(&["suite", "S1", "--max-points", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("violations  0"));
}

#[test]
fn negative_weight_is_an_input_error_with_a_line() {
    let o = run(&["decide", "t2", "bad_winf.inst"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn unknown_names_are_input_errors() {
    for args in [
        &["decide", "t3", "fix2.inst"][..],
        &["suite", "S12"],
        &["search", "C9"],
        &["decide", "t2", "missing.inst"],
        &["complete", "fix2.inst", "{z}"],
        &["phi", "path.inst"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn enumeration_cap_is_a_resource_error() {
    let o = run(&["suite", "S1", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn completion_membership() {
    let o = run(&["complete", "fix2.inst", "{b}"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("gap          2"));
    let o = run(&["complete", "fix2.inst", "{c,b}"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("charge       2"));
}

#[test]
fn certify_replays_the_evidence() {
    for p in ["t2", "base", "greco", "regular"] {
        let o = run(&["--machine", "certify", p, "fix2.inst"]);
        let rs = records(&o);
        assert_eq!(record(&rs, "replay")["ok"], true, "{p}");
    }
}

#[test]
fn search_finds_the_pinned_witnesses() {
    for (claim, fixture) in [("C1", "FIX3"), ("C2", "FIX4"), ("C3", "FIX5")] {
        let o = run(&["--machine", "search", claim]);
        assert_eq!(o.status.code(), Some(0), "{claim}");
        let w: Witness = serde_json::from_value(record(&records(&o), "witness")["witness"].clone()).unwrap();
        assert_eq!(w.fixture.as_deref(), Some(fixture));
        assert!(w.confirmed());
    }
}

#[test]
fn exhausted_search_exits_nonzero() {
    let o = run(&["search", "C2", "--max-points", "1", "--no-fincof", "--no-fixtures"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("exhausted"));
}

#[test]
fn machine_records_parse_back_losslessly() {
    let o = run(&["--machine", "decide", "greco", "fix2.inst"]);
    let rs = records(&o);
    let rec = record(&rs, "verdict");
    let v: Verdict = serde_json::from_value(rec["verdict"].clone()).unwrap();
    assert_eq!(v, decide(Property::Greco, &load("fix2.inst")).unwrap());
    assert_eq!(serde_json::to_value(&v).unwrap(), rec["verdict"]);
    let again = parse_instance(rec["instance"].as_str().unwrap()).unwrap();
    assert_eq!(again, load("fix2.inst"));
    assert_eq!(record(&rs, "exit")["code"], 1);

    let rs = records(&run(&["--machine", "phi", "fix4.inst"]));
    let p: PhiProfile = serde_json::from_value(record(&rs, "phi")["profile"].clone()).unwrap();
    assert_eq!(p, phi_profile(&load("fix4.inst")).unwrap());

    let rs = records(&run(&["--machine", "suite", "S3", "--max-points", "2"]));
    let r: SuiteReport = serde_json::from_value(record(&rs, "suite")["report"].clone()).unwrap();
    let direct = run_suite(Suite::S3, &InstanceParams::with_max_points(2), OracleOptions::default()).unwrap();
    assert_eq!(r, SuiteReport { wall: r.wall, ..direct });

    let cmd = record(&rs, "command");
    assert_eq!(cmd["args"][2], "S3");
    assert_eq!(cmd["cutoff"], 16);
}

#[test]
fn output_is_byte_stable() {
    for args in [&["--machine", "suite", "all", "--max-points", "2"][..], &["certify", "ray", "fix5.inst"]] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

/// Every example instance parses, and its report for every applicable property
/// matches the pinned `.golden` file. `UPDATE_GOLDEN=1` rewrites them.
#[test]
fn example_reports_match_golden() {
    let mut files: Vec<PathBuf> = std::fs::read_dir(instances_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "inst"))
        .collect();
    files.sort();
    assert!(files.len() >= 6);
    for path in files {
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let mut report = String::new();
        match parse_instance(&std::fs::read_to_string(&path).unwrap()) {
            Ok(inst) => {
                for p in Property::ALL {
                    if p.needs_real() && !inst.is_real() {
                        continue;
                    }
                    let o = run(&["certify", p.name(), &name]);
                    report.push_str(&stdout(&o));
                    report.push_str(&String::from_utf8(o.stderr).unwrap());
                    report.push_str(&format!("exit {}\n\n", o.status.code().unwrap()));
                }
            }
            Err(_) => {
                let o = run(&["decide", "t2", &name]);
                report.push_str(&String::from_utf8(o.stderr).unwrap());
                report.push_str(&format!("exit {}\n", o.status.code().unwrap()));
            }
        }
        let golden = path.with_extension("golden");
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&golden, &report).unwrap();
        }
        let want = std::fs::read_to_string(&golden).unwrap_or_else(|_| panic!("missing {}", golden.display()));
        assert_eq!(report, want, "{name}");
    }
}
