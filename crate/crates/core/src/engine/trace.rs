use serde::Serialize;

use super::node::{Goal, NodeId, Step, TreeId};
use crate::model::{Clause, Query};
use crate::unify::{InputVarSet, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NegationOutcome {
    /// The subsidiary tree reached a success leaf.
    Fails,
    /// The subsidiary tree was exhausted.
    Succeeds,
    /// Exhausted, but only because some of its derivations were cut.
    ApproxSucceeds,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEdge {
    Resolve { clause: usize, renamed: Clause, bindings: Substitution },
    NegationArc,
    NegationSucceeded,
}

impl TraceEdge {
    pub fn step(&self) -> Step {
        match self {
            TraceEdge::Resolve { clause, .. } => Step::Clause(*clause),
            TraceEdge::NegationArc => Step::NegationArc,
            TraceEdge::NegationSucceeded => Step::NegationSucceeded,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkippedClause {
    pub clause: usize,
    pub set_l: bool,
}

#[derive(Clone, Debug)]
pub struct TraceNode {
    pub id: NodeId,
    pub tree: TreeId,
    pub parent: Option<NodeId>,
    pub via: Option<TraceEdge>,
    pub goal: Goal,
    pub inputs: InputVarSet,
    /// Clauses cut by the loop check at this node.
    pub skipped: Vec<SkippedClause>,
    /// Clauses never tried because the enclosing subsidiary tree already succeeded.
    pub pruned: Vec<usize>,
    /// Clause whose candidacy triggered an early abort, with the exactness flag.
    pub aborted: Option<(usize, bool)>,
    pub negation: Option<NegationOutcome>,
    pub children: Vec<NodeId>,
}

impl TraceNode {
    pub fn is_success(&self) -> bool {
        self.goal.is_empty()
    }
}

/// The whole generalized tree, indexed by node id.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub nodes: Vec<TraceNode>,
}

impl Trace {
    pub fn node(&self, id: NodeId) -> &TraceNode {
        &self.nodes[id as usize]
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut TraceNode {
        &mut self.nodes[id as usize]
    }

    /// Node ids from the main root down to `id`, crossing negation arcs.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.node(cur).parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TraceNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// The resolution-only derivation from the main root to `id`; `None` if the
    /// path crosses a negation arc.
    pub fn derivation_to(&self, query: &Query, id: NodeId) -> Option<Derivation> {
        let mut steps = Vec::new();
        let mut log = Vec::new();
        for n in self.path_to(id).into_iter().skip(1) {
            match &self.node(n).via {
                Some(TraceEdge::Resolve { clause, renamed, bindings }) => {
                    steps.push(*clause);
                    log.push((renamed.clone(), bindings.clone()));
                }
                _ => return None,
            }
        }
        Some(Derivation { query: query.clone(), steps, log })
    }
}

/// A retained derivation of a moded tree: the query, the clause sequence and
/// the renamed clause plus mgu of each step.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub query: Query,
    pub steps: Vec<usize>,
    pub log: Vec<(Clause, Substitution)>,
}
