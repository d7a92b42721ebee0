//! Experiment driver behind the command-line front end: run configuration,
//! CSV and JSON artifacts, the parameter scan and the self-test suites.

pub mod config;
pub mod csvio;
pub mod scan;
pub mod selftest;

pub use config::{FieldSpec, KeyValues, RunConfig, ScanMode};
pub use csvio::{disc_report, gen_csv, multigen_csv, parse_points_csv, DiscrepancyReport};
pub use scan::{run_scan, ScanOutcome, ScanRecord, ScanSummary};
pub use selftest::{run_selftest, SuiteResult};
