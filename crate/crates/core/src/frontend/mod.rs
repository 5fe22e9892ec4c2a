//! Clause-language parser, report formatting and Graphviz export.

mod dot;
mod parser;
mod report;

pub use dot::export_dot;
pub use parser::{parse_program, parse_query, SourceError};
pub use report::{report_line, reports_to_json, REPORT_SCHEMA};
