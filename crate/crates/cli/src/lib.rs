//! Command-line driver for weatlab: configuration, subcommands and exit
//! codes. The binary in `main.rs` only parses arguments and dispatches here.

pub mod cli;
pub mod commands;
pub mod config;

use serde_json::json;
use weatlab_core::{Error, ErrorKind};

pub use commands::{cmd_inventory, cmd_run, cmd_synth, cmd_train_baseline, cmd_train_updated, cmd_weat};
pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Config => EXIT_CONFIG,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::Numerical => EXIT_NUMERICAL,
    }
}

/// Structured error report printed to stderr on failure.
pub fn error_report(e: &Error) -> serde_json::Value {
    let kind = match e.kind() {
        ErrorKind::Config => "config",
        ErrorKind::Data => "data",
        ErrorKind::Numerical => "numerical",
    };
    let mut report = json!({
        "error": kind,
        "message": e.to_string(),
        "exit_code": exit_code(e),
    });
    if let Error::Pipeline { group, rep, .. } = e {
        if !group.is_empty() {
            report["group"] = json!(group);
        }
        report["repetition"] = json!(rep + 1);
    }
    if let Error::Parse { line, .. } = e {
        report["line"] = json!(line);
    }
    report
}
