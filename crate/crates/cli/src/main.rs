//! `unimeas`: decide, certify and cross-check measurability of functions on
//! finitely presented charge spaces.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{Record, Report};

#[derive(Parser)]
#[command(name = "unimeas", version, about)]
struct Cli {
    /// Emit JSON-lines records only.
    #[arg(long, global = true)]
    machine: bool,
    /// Truncation point of the oracle's model of ℕ.
    #[arg(long, global = true, default_value_t = 16)]
    cutoff: u64,
    /// Dyadic depth of the oracle's ε-grid.
    #[arg(long, global = true, default_value_t = 10)]
    grid: u32,
    /// Report wall-clock time (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Bounds {
    /// Largest finite ground set to enumerate.
    #[arg(long, default_value_t = 3)]
    max_points: usize,
    /// Skip the instances on ℕ.
    #[arg(long)]
    no_fincof: bool,
    /// Skip the built-in fixtures.
    #[arg(long)]
    no_fixtures: bool,
    /// Abort when the enumeration exceeds this many instances.
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a property.
    Decide { property: String, file: String },
    /// Decide a property and replay its evidence against the oracle.
    Certify { property: String, file: String },
    /// Closed form of the boundary mass limit of a real-valued function.
    Phi { file: String },
    /// Peano-Jordan membership of a set, with its sandwich.
    Complete { file: String, set: String },
    /// Run a verification suite (S1..S11, or `all`).
    Suite {
        id: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Search for the first witness of a separating claim (C1..C3).
    Search {
        claim: String,
        #[command(flatten)]
        bounds: Bounds,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let start = std::time::Instant::now();
    let mut report = Report::default();
    report.push(Record::Command {
        args,
        cutoff: cli.cutoff,
        grid: cli.grid,
    });
    let opts = unimeas::harness::OracleOptions {
        grid: cli.grid,
        cutoff: cli.cutoff,
    };
    let result = commands::run(&cli.command, opts, &mut report);
    if let Err(e) = &result {
        report.push(Record::Error {
            code: e.code,
            message: e.message.clone(),
        });
        report.code = e.code;
    }
    if cli.timing {
        let millis = start.elapsed().as_millis();
        report.line("time", format!("{millis} ms"));
        report.push(Record::Timing { millis });
    }
    report.push(Record::Exit { code: report.code });

    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(report.render(cli.machine).as_bytes());
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
    }
    ExitCode::from(report.code as u8)
}
