//! Differential test harness: definitional oracles, certificate replay and the
//! cross-checking suites.

pub mod enumerate;
pub mod model;
pub mod oracle;
pub mod replay;
pub mod search;
pub mod suites;

pub use enumerate::{enumerate_instances, InstanceParams};
pub use model::{CellValue, Mask, Model};
pub use replay::replay;
pub use search::{search_counterexample, search_on, Claim, ClaimVerdict, Witness};
pub use suites::{run_suite, run_suite_on, Suite, SuiteReport, Violation};
pub use oracle::{oracle_decide, Oracle, OracleOptions, OracleVerdict};
