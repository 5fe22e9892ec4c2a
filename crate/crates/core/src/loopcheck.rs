//! The LP-check cut policy: repetition windows, the growth heuristic, the
//! input-consumption test and the two optimization shortcuts.

use std::collections::HashMap;

use serde::Serialize;

use crate::config::{Algorithm, Config, Growth};
use crate::engine::{path_position, Candidate, CutDecision, CutPolicy, Edge, NodeId, PathView, Step, SubstitutionLog};
use crate::model::{
    is_variant, loops_into_strings, nesting_depth, pmax_table, Atom, PmaxTable, Program, SymbolString, Symbolic, Term,
    VarId,
};

/// `r` loop goals on one derivation, each the ancestor of and looping into the
/// next, with the same clause applied at all but the last (where it is the
/// candidate).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub nodes: Vec<NodeId>,
    pub clause: usize,
    /// Some negation arc lies on the derivation up to the last node.
    pub negation_arc: bool,
}

impl Window {
    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("window is nonempty")
    }
}

fn position(path: PathView<'_>, id: NodeId) -> usize {
    path_position(path, id).expect("window node lies on the path")
}

fn selected_atom(path: PathView<'_>, id: NodeId) -> &Atom {
    &path[position(path, id)].goal.literals[0].literal.atom
}

fn clause_at(path: PathView<'_>, id: NodeId) -> Option<usize> {
    path_position(path, id).and_then(|p| path[p].edge.as_ref()).and_then(Edge::clause)
}

/// Most recent window ending at the last node of `path` with `clause` as the
/// candidate, if any.
pub fn detect_window(path: PathView<'_>, clause: usize, r: usize) -> Option<Window> {
    let node = path.last()?;
    let sel = node.goal.selected()?;
    if !sel.literal.is_positive() {
        return None;
    }
    let atom = &sel.literal.atom;
    let sym = atom.symbol_string();
    // loops-into is transitive, so every window member loops into the candidate atom
    let mut chain: Vec<(NodeId, &Atom, &SymbolString)> = sel
        .ancestors
        .iter()
        .filter(|a| clause_at(path, a.node) == Some(clause))
        .filter(|a| loops_into_strings(a.atom, a.symbols, atom, &sym))
        .map(|a| (a.node, a.atom, a.symbols))
        .collect();
    if chain.len() + 1 < r {
        return None;
    }
    chain.reverse();
    chain.push((node.id, atom, &sym));
    let m = chain.len();
    let links = |i: usize, j: usize| loops_into_strings(chain[i].1, chain[i].2, chain[j].1, chain[j].2);
    // longest loop-goal chain from i that ends at the candidate node
    let mut len = vec![1usize; m];
    for i in (0..m - 1).rev() {
        len[i] = 1 + (i + 1..m).filter(|&j| links(i, j)).map(|j| len[j]).max().unwrap_or(0);
    }
    let g1 = (0..m - 1).rev().find(|&i| len[i] >= r)?;
    let mut picked = vec![g1];
    let mut cur = g1;
    for need in (2..r).rev() {
        cur = (cur + 1..m - 1).find(|&j| len[j] >= need && links(cur, j))?;
        picked.push(cur);
    }
    picked.push(m - 1);
    let nodes: Vec<NodeId> = picked.iter().map(|&i| chain[i].0).collect();
    let last = position(path, node.id);
    let negation_arc = path[..last].iter().any(|n| n.edge == Some(Edge::NegationArc));
    Some(Window { nodes, clause, negation_arc })
}

/// Every argument that grows along the window has reached its deepest
/// clause-head nesting at the last loop goal.
pub fn heuristic1_holds(path: PathView<'_>, w: &Window, pmax: &PmaxTable, growth: Growth) -> bool {
    let atoms: Vec<&Atom> = w.nodes.iter().map(|&id| selected_atom(path, id)).collect();
    let last = atoms[atoms.len() - 1];
    let row = pmax.row(&last.key());
    (0..last.args.len()).all(|i| {
        let sizes: Vec<usize> = atoms.iter().map(|a| a.args[i].size()).collect();
        let grows = match growth {
            Growth::Strict => sizes.windows(2).all(|p| p[0] < p[1]),
            Growth::Some => sizes.windows(2).all(|p| p[0] <= p[1]) && sizes.windows(2).any(|p| p[0] < p[1]),
        };
        !grows || nesting_depth(&last.args[i]) >= row[i]
    })
}

/// Longest chain of variable-containing compound bindings starting at each
/// variable; variable-to-variable bindings are followed without counting.
struct ChainLengths {
    bound: HashMap<VarId, Term>,
    memo: HashMap<VarId, usize>,
}

impl ChainLengths {
    fn new(log: &SubstitutionLog) -> Self {
        let mut bound = HashMap::new();
        for e in &log.entries {
            bound.entry(e.var.id).or_insert_with(|| e.term.clone());
        }
        ChainLengths { bound, memo: HashMap::new() }
    }

    fn from(&mut self, v: VarId) -> usize {
        if let Some(&n) = self.memo.get(&v) {
            return n;
        }
        // provisional entry breaks cycles left by a disabled occurs check
        self.memo.insert(v, 0);
        let n = match self.bound.get(&v).cloned() {
            Some(Term::Var(w)) => self.from(w.id),
            Some(t @ Term::Compound(..)) if !t.is_ground() => {
                let mut vars = Vec::new();
                t.for_each_var(&mut |x| vars.push(x.id));
                1 + vars.into_iter().map(|x| self.from(x)).max().unwrap_or(0)
            }
            _ => 0,
        };
        self.memo.insert(v, n);
        n
    }
}

/// Length of the longest consumption chain rooted at `var` among the bindings
/// made at nodes `[from, to)`.
pub fn chain_length(path: PathView<'_>, from: NodeId, to: NodeId, var: VarId) -> usize {
    let lo = position(path, from);
    let hi = position(path, to);
    ChainLengths::new(&SubstitutionLog::from_path(&path[lo..hi])).from(var)
}

/// No input variable of the first loop goal is consumed (`threshold` or more
/// chained compound bindings) inside the window.
pub fn cprime_holds(path: PathView<'_>, w: &Window, threshold: usize) -> bool {
    let lo = position(path, w.first());
    let hi = position(path, w.last());
    let first = &path[lo];
    let inputs: Vec<VarId> =
        first.goal.vars().into_iter().map(|v| v.id).filter(|&id| first.inputs.contains(id)).collect();
    if inputs.is_empty() {
        return true;
    }
    let mut chains = ChainLengths::new(&SubstitutionLog::from_path(&path[lo..hi]));
    inputs.into_iter().all(|i| chains.from(i) < threshold)
}

/// Shared precondition of both optimization strategies: no negation arc up to
/// the last loop goal, variant loop atoms and one repeated step sequence.
pub fn strategy_preamble(path: PathView<'_>, w: &Window) -> bool {
    if w.negation_arc {
        return false;
    }
    let variants = w.nodes.windows(2).all(|p| is_variant(selected_atom(path, p[0]), selected_atom(path, p[1])));
    if !variants {
        return false;
    }
    let steps = |a: NodeId, b: NodeId| -> Vec<Step> {
        path[position(path, a)..position(path, b)].iter().filter_map(|n| n.edge.as_ref().map(Edge::step)).collect()
    };
    let seqs: Vec<Vec<Step>> = w.nodes.windows(2).map(|p| steps(p[0], p[1])).collect();
    seqs.windows(2).all(|p| p[0] == p[1])
}

/// The cut decision for a candidate clause given its window (if any).
pub fn decide(path: PathView<'_>, w: Option<&Window>, cfg: &Config, l_flag: bool, pmax: &PmaxTable) -> CutDecision {
    let Some(w) = w else {
        return CutDecision::Allow;
    };
    if cfg.heuristic1 && !heuristic1_holds(path, w, pmax, cfg.growth) {
        return CutDecision::Allow;
    }
    let optimized = cfg.algorithm == Algorithm::Two && strategy_preamble(path, w);
    if cprime_holds(path, w, cfg.cprime_threshold()) {
        CutDecision::AbortNonTerminating { exact: optimized && !l_flag }
    } else {
        let single = w.nodes.iter().all(|&id| path[position(path, id)].goal.len() == 1);
        CutDecision::Skip { set_l: !(optimized && single) }
    }
}

/// LP-check as an engine cut policy.
#[derive(Clone, Debug)]
pub struct LpCheck {
    cfg: Config,
    pmax: PmaxTable,
    windows: usize,
    last: Option<Window>,
}

impl LpCheck {
    pub fn new(program: &Program, cfg: &Config) -> Self {
        LpCheck { cfg: cfg.clone(), pmax: pmax_table(program), windows: 0, last: None }
    }
}

impl CutPolicy for LpCheck {
    fn decide(&mut self, c: &Candidate<'_>) -> CutDecision {
        let w = detect_window(c.path, c.clause, self.cfg.repetition);
        if w.is_some() {
            self.windows += 1;
        }
        let d = decide(c.path, w.as_ref(), &self.cfg, c.l_flag, &self.pmax);
        if d != CutDecision::Allow {
            self.last = w;
        }
        d
    }

    fn windows_found(&self) -> usize {
        self.windows
    }

    fn last_window(&self) -> Option<&Window> {
        self.last.as_ref()
    }
}
