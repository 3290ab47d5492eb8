//! File format, report serialization and shared plumbing for the `crn`
//! command-line tool.

pub mod parse;
pub mod report;

pub use parse::{parse, DocumentError, NetworkDocument, ParseError};
pub use report::{build_report, replay_witnesses, Report};
