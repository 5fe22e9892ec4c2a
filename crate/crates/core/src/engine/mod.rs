//! Depth-first, left-most construction of generalized SLDNF-trees.
//!
//! The current derivation is kept as an explicit path from the main root to the
//! node being expanded. Subsidiary trees for negative literals are explored on
//! the same path, right after the negation arc that spawned them, so ancestry
//! and the substitution log naturally cross arcs.

mod node;
mod trace;

use serde::Serialize;

pub use node::{
    expand_step, initial_goal, path_position, Ancestor, AncestorList, Edge, Expansion, Goal, GoalLiteral, LogEntry,
    NodeId, PathNode, Step, SubstitutionLog, TreeId, VarGen, MAIN_TREE,
};
pub use trace::{Derivation, NegationOutcome, SkippedClause, Trace, TraceEdge, TraceNode};

use crate::config::{Config, ConfigError};
use crate::loopcheck::Window;
use crate::model::{Literal, Program, Query};
use crate::unify::InputVarSet;

/// The current derivation, root first.
pub type PathView<'a> = &'a [PathNode];

/// What the cut policy may do with a unifying clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CutDecision {
    Allow,
    /// Cut the derivation by not applying the clause, optionally setting L.
    Skip {
        set_l: bool,
    },
    /// Stop the whole analysis with a non-termination answer.
    AbortNonTerminating {
        exact: bool,
    },
}

/// A clause about to be applied at the last node of `path`.
pub struct Candidate<'a> {
    pub program: &'a Program,
    pub path: PathView<'a>,
    pub clause: usize,
    pub l_flag: bool,
}

pub trait CutPolicy {
    fn decide(&mut self, candidate: &Candidate<'_>) -> CutDecision;

    fn windows_found(&self) -> usize {
        0
    }

    /// Window behind the most recent non-`Allow` decision.
    fn last_window(&self) -> Option<&Window> {
        None
    }
}

/// Never cuts; the tree is built as is (bounded only by `max_nodes`).
#[derive(Clone, Copy, Debug, Default)]
pub struct NoLoopCheck;

impl CutPolicy for NoLoopCheck {
    fn decide(&mut self, _: &Candidate<'_>) -> CutDecision {
        CutDecision::Allow
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Statistics {
    pub nodes: usize,
    pub cuts: usize,
    /// Cuts that set L.
    pub flagged_cuts: usize,
    pub windows: usize,
    pub negation_arcs: usize,
    pub success_leaves: usize,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbortInfo {
    pub node: NodeId,
    pub clause: usize,
    pub exact: bool,
    pub window: Option<Window>,
}

#[derive(Clone, Debug)]
pub struct TreeResult {
    pub root: NodeId,
    pub stats: Statistics,
    pub l_flag: bool,
    pub abort: Option<AbortInfo>,
    pub trace: Option<Trace>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("floundering at N{node}: {literal} has non-input variables")]
    Floundering { node: NodeId, literal: String },
    #[error("node limit of {limit} exceeded")]
    ResourceExceeded { limit: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

enum Frame<'p> {
    Clauses { candidates: &'p [usize], next: usize },
    Negation(NegState),
    Leaf,
}

#[derive(Clone, Copy)]
enum NegState {
    Start,
    Running { tree: TreeId, cuts_before: usize },
    Done,
}

struct Builder<'p, 'c, P: CutPolicy> {
    program: &'p Program,
    cfg: &'c Config,
    policy: &'c mut P,
    vars: VarGen,
    path: Vec<PathNode>,
    frames: Vec<Frame<'p>>,
    next_id: NodeId,
    next_tree: TreeId,
    stats: Statistics,
    l_flag: bool,
    trace: Option<Trace>,
}

/// Builds the generalized tree for `query`, consulting `policy` before every
/// clause application.
pub fn construct<P: CutPolicy>(
    program: &Program,
    query: &Query,
    cfg: &Config,
    policy: &mut P,
) -> Result<TreeResult, EngineError> {
    cfg.validate()?;
    let first_free = program.max_var_id().into_iter().chain(query.atom.max_var_id()).max().map_or(0, |m| m + 1);
    let mut b = Builder {
        program,
        cfg,
        policy,
        vars: VarGen::starting_at(first_free),
        path: Vec::new(),
        frames: Vec::new(),
        next_id: 0,
        next_tree: MAIN_TREE + 1,
        stats: Statistics::default(),
        l_flag: false,
        trace: cfg.trace.then(Trace::default),
    };
    let abort = b.run(query)?;
    let mut stats = b.stats;
    stats.windows = b.policy.windows_found();
    Ok(TreeResult { root: 0, stats, l_flag: b.l_flag, abort, trace: b.trace })
}

impl<'p, P: CutPolicy> Builder<'p, '_, P> {
    fn run(&mut self, query: &Query) -> Result<Option<AbortInfo>, EngineError> {
        let (goal, inputs) = initial_goal(query);
        self.push_node(goal, inputs, MAIN_TREE, None)?;
        while let Some(top) = self.frames.len().checked_sub(1) {
            match &mut self.frames[top] {
                Frame::Leaf | Frame::Negation(NegState::Done) => self.pop(),
                Frame::Clauses { candidates, next } => {
                    let Some(&ci) = candidates.get(*next) else {
                        self.pop();
                        continue;
                    };
                    *next += 1;
                    if let Some(abort) = self.try_clause(top, ci)? {
                        return Ok(Some(abort));
                    }
                }
                Frame::Negation(NegState::Start) => self.open_negation(top)?,
                Frame::Negation(NegState::Running { cuts_before, .. }) => {
                    // subsidiary tree exhausted without a success leaf
                    let outcome = if self.stats.cuts > *cuts_before {
                        NegationOutcome::ApproxSucceeds
                    } else {
                        NegationOutcome::Succeeds
                    };
                    self.frames[top] = Frame::Negation(NegState::Done);
                    self.close_negation(top, outcome)?;
                }
            }
        }
        Ok(None)
    }

    fn try_clause(&mut self, top: usize, ci: usize) -> Result<Option<AbortInfo>, EngineError> {
        let node = &self.path[top];
        let Ok(exp) = expand_step(node, self.program.clause(ci), &mut self.vars, self.cfg.occurs_check) else {
            return Ok(None);
        };
        let candidate = Candidate { program: self.program, path: &self.path, clause: ci, l_flag: self.l_flag };
        match self.policy.decide(&candidate) {
            CutDecision::Allow => {
                let tree = self.path[top].tree;
                let via = self.trace.as_ref().map(|_| TraceEdge::Resolve {
                    clause: ci,
                    renamed: exp.renamed,
                    bindings: exp.bindings.clone(),
                });
                self.path[top].edge = Some(Edge::Resolve { clause: ci, bindings: exp.bindings });
                self.push_node(exp.goal, exp.inputs, tree, via)?;
                Ok(None)
            }
            CutDecision::Skip { set_l } => {
                self.stats.cuts += 1;
                if set_l {
                    self.stats.flagged_cuts += 1;
                    self.l_flag = true;
                }
                let id = self.path[top].id;
                if let Some(t) = &mut self.trace {
                    t.node_mut(id).skipped.push(SkippedClause { clause: ci, set_l });
                }
                Ok(None)
            }
            CutDecision::AbortNonTerminating { exact } => {
                let id = self.path[top].id;
                if let Some(t) = &mut self.trace {
                    t.node_mut(id).aborted = Some((ci, exact));
                }
                let window = self.policy.last_window().cloned();
                Ok(Some(AbortInfo { node: id, clause: ci, exact, window }))
            }
        }
    }

    fn open_negation(&mut self, top: usize) -> Result<(), EngineError> {
        let tree = self.next_tree;
        self.next_tree += 1;
        self.stats.negation_arcs += 1;
        self.frames[top] = Frame::Negation(NegState::Running { tree, cuts_before: self.stats.cuts });
        let node = &mut self.path[top];
        node.edge = Some(Edge::NegationArc);
        let sel = &node.goal.literals[0];
        let goal = Goal {
            literals: vec![GoalLiteral {
                literal: Literal::pos(sel.literal.atom.clone()),
                ancestors: sel.ancestors.clone(),
            }],
        };
        let inputs = node.inputs.clone();
        let via = self.trace.as_ref().map(|_| TraceEdge::NegationArc);
        self.push_node(goal, inputs, tree, via)
    }

    fn close_negation(&mut self, top: usize, outcome: NegationOutcome) -> Result<(), EngineError> {
        let id = self.path[top].id;
        if let Some(t) = &mut self.trace {
            t.node_mut(id).negation = Some(outcome);
        }
        if outcome == NegationOutcome::Fails {
            return Ok(());
        }
        let node = &mut self.path[top];
        node.edge = Some(Edge::NegationSucceeded);
        let goal = Goal { literals: node.goal.literals[1..].to_vec() };
        let (inputs, tree) = (node.inputs.clone(), node.tree);
        let via = self.trace.as_ref().map(|_| TraceEdge::NegationSucceeded);
        self.push_node(goal, inputs, tree, via)
    }

    fn push_node(
        &mut self,
        goal: Goal,
        inputs: InputVarSet,
        tree: TreeId,
        via: Option<TraceEdge>,
    ) -> Result<(), EngineError> {
        let id = self.next_id;
        self.next_id += 1;
        self.stats.nodes += 1;
        if self.stats.nodes > self.cfg.max_nodes {
            return Err(EngineError::ResourceExceeded { limit: self.cfg.max_nodes });
        }
        if let Some(t) = &mut self.trace {
            let parent = self.path.last().map(|n| n.id);
            if let Some(p) = parent {
                t.node_mut(p).children.push(id);
            }
            t.nodes.push(TraceNode {
                id,
                tree,
                parent,
                via,
                goal: goal.clone(),
                inputs: inputs.clone(),
                skipped: Vec::new(),
                pruned: Vec::new(),
                aborted: None,
                negation: None,
                children: Vec::new(),
            });
        }
        let frame = match goal.selected() {
            None => {
                self.stats.success_leaves += 1;
                Frame::Leaf
            }
            Some(sel) if sel.literal.is_positive() => {
                Frame::Clauses { candidates: self.program.clauses_for(&sel.literal.atom.key()), next: 0 }
            }
            Some(sel) => {
                let atom = &sel.literal.atom;
                let mut flounders = false;
                atom.for_each_var(&mut |v| flounders |= !inputs.contains(v.id));
                if flounders {
                    return Err(EngineError::Floundering { node: id, literal: sel.literal.to_string() });
                }
                Frame::Negation(NegState::Start)
            }
        };
        let success = goal.is_empty();
        self.path.push(PathNode { id, tree, goal, inputs, edge: None });
        self.frames.push(frame);
        self.stats.max_depth = self.stats.max_depth.max(self.path.len() - 1);
        if success && tree != MAIN_TREE {
            self.subsidiary_success(tree)?;
        }
        Ok(())
    }

    /// First success leaf of subsidiary tree `tree`: abandon the rest of it and
    /// fail the owning negative literal.
    fn subsidiary_success(&mut self, tree: TreeId) -> Result<(), EngineError> {
        let owner = self
            .frames
            .iter()
            .rposition(|f| matches!(f, Frame::Negation(NegState::Running { tree: t, .. }) if *t == tree))
            .expect("subsidiary tree has an owning negation node");
        while self.frames.len() > owner + 1 {
            if let (Some(t), Some(Frame::Clauses { candidates, next })) = (&mut self.trace, self.frames.last()) {
                let id = self.path.last().map(|n| n.id).unwrap_or_default();
                t.node_mut(id).pruned.extend_from_slice(&candidates[*next..]);
            }
            self.pop();
        }
        self.frames[owner] = Frame::Negation(NegState::Done);
        self.close_negation(owner, NegationOutcome::Fails)
    }

    fn pop(&mut self) {
        self.path.pop();
        self.frames.pop();
        if let Some(last) = self.path.last_mut() {
            last.edge = None;
        }
    }
}
