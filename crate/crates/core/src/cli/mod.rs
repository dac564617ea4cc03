//! Batch front end: scenario files, pulse and trace tables, gate reports and
//! the random-case verification suite.

pub mod io;
pub mod report;
pub mod scenario;
pub mod verify;

pub use scenario::{run_scenario, Scenario, ScenarioOutcome};
pub use verify::{run_verify_suite, VerifyOptions, VerifySummary};
