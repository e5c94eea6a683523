//! Curve documents, reports and the `residuum` commands.

mod commands;
mod document;
mod report;
mod selftest;

pub use commands::{
    cmd_check_balance, cmd_conductor, cmd_construct, cmd_graph_invariants, cmd_span,
    ConductorRequest,
};
pub use document::{
    parse_params, BranchDecl, ComponentDecl, CurveDocument, CustomDecl, DifferentialDecl, EdgeDecl,
    EndDecl, SingularityDecl, FORMAT_VERSION,
};
pub use report::{digest, Report, Status, Values, Verdict, Warning};
pub use selftest::{cmd_selftest, random_split_function, run_criteria, SEED};

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::TruncationTooSmall { .. } => EXIT_TRUNCATION,
        _ => EXIT_INPUT,
    }
}
