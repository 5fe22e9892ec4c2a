use crate::analyzer::AnalysisReport;

/// JSON schema for the array written by [`reports_to_json`].
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

pub fn reports_to_json(reports: &[AnalysisReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Tab-separated line: query, verdict token (or `ERROR`), nodes, cuts.
pub fn report_line(r: &AnalysisReport) -> String {
    let verdict = r.verdict.map_or("ERROR", |v| v.token());
    format!("{}\t{}\t{}\t{}", r.query, verdict, r.stats.nodes, r.stats.cuts)
}
