//! Dynamic termination analysis of general logic programs.
//!
//! Programs are parsed with [`frontend::parse_program`], queries (optionally
//! moded with `@Name` input markers) with [`frontend::parse_query`], and
//! [`analyzer::analyze`] builds a loop-checked generalized SLDNF-tree to
//! decide one of four [`Verdict`]s.

pub mod analyzer;
pub mod config;
pub mod engine;
pub mod frontend;
pub mod loopcheck;
pub mod model;
pub mod oracle;
pub mod unify;

pub use analyzer::{analyze, analyze_all, analyze_queries, AnalysisReport, Prune};
pub use config::{Algorithm, Config, Growth};
pub use frontend::{parse_program, parse_query, SourceError};
pub use model::{Program, Query, Verdict};
