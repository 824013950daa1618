//! Scenario runner for the `nlpb-core` checkers.
//!
//! A scenario is a JSON document naming a truncation, an ε-sequence, a basis
//! pair and a list of checks. [`runner::run`] builds the operator system once,
//! runs the checks (optionally on a worker pool) and assembles a
//! [`runner::RunReport`] in declaration order.

pub mod catalog;
pub mod error;
pub mod runner;
pub mod scenario;

pub use error::CliError;
pub use runner::{list_checks, render_table, run, run_scenario, RunOptions, RunReport, Verdict};
pub use scenario::Scenario;

/// Exit code for a run whose gated checks all pass.
pub const EXIT_PASS: i32 = 0;
/// Exit code when a gated check fails or errors.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for malformed scenarios and bad arguments.
pub const EXIT_CONFIG: i32 = 2;
