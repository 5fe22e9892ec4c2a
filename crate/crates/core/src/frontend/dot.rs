use std::fmt::Write;

use crate::engine::{NegationOutcome, Trace, TraceEdge};
use crate::model::Program;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of a retained tree: solid edges carry clause names,
/// negation arcs are dashed, cuts and unexplored clauses annotate their node.
pub fn export_dot(program: &Program, trace: &Trace) -> String {
    let mut out = String::from("digraph gtree {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in &trace.nodes {
        let mut label = format!("N{}: {}", n.id, n.goal);
        let names =
            |cs: &mut dyn Iterator<Item = usize>| cs.map(|c| program.clause_name(c)).collect::<Vec<_>>().join(", ");
        if !n.skipped.is_empty() {
            let _ = write!(label, "\ncut: {}", names(&mut n.skipped.iter().map(|s| s.clause)));
        }
        if !n.pruned.is_empty() {
            let _ = write!(label, "\nnot extended: {}", names(&mut n.pruned.iter().copied()));
        }
        if let Some((c, exact)) = n.aborted {
            let kind = if exact { "non-terminating" } else { "most likely non-terminating" };
            let _ = write!(label, "\nabort at {}: {kind}", program.clause_name(c));
        }
        match n.negation {
            Some(NegationOutcome::Fails) => label.push_str("\nnegation fails"),
            Some(NegationOutcome::Succeeds) => label.push_str("\nnegation succeeds"),
            Some(NegationOutcome::ApproxSucceeds) => label.push_str("\nnegation succeeds (after cuts)"),
            None => {}
        }
        let mut attrs = format!("label=\"{}\"", escape(&label));
        if n.goal.is_empty() {
            attrs.push_str(", style=rounded");
        } else if !n.skipped.is_empty() || n.aborted.is_some() {
            attrs.push_str(", color=red");
        }
        let _ = writeln!(out, "  n{} [{attrs}];", n.id);
    }
    for n in &trace.nodes {
        let (Some(p), Some(via)) = (n.parent, &n.via) else { continue };
        let attrs = match via {
            TraceEdge::Resolve { clause, .. } => format!("label=\"{}\"", program.clause_name(*clause)),
            TraceEdge::NegationArc => "style=dashed".to_string(),
            TraceEdge::NegationSucceeded => "label=\"\\\\+\"".to_string(),
        };
        let _ = writeln!(out, "  n{p} -> n{} [{attrs}];", n.id);
    }
    out.push_str("}\n");
    out
}
