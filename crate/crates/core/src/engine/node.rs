use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::model::{Atom, Clause, Literal, Query, SymbolString, Symbolic, Term, Var, VarId};
use crate::unify::{mgu, InputVarSet, NoUnifier, Substitute, Substitution};

pub type NodeId = u32;
pub type TreeId = u32;

/// Tree id of the top-level tree; subsidiary trees get fresh ids.
pub const MAIN_TREE: TreeId = 0;

struct AncestorCell {
    node: NodeId,
    atom: Atom,
    symbols: SymbolString,
    next: AncestorList,
}

/// Persistent list of `(node, atom)` pairs naming the ancestor subgoals of a
/// literal, newest first. Ids strictly decrease along the list.
#[derive(Clone, Default)]
pub struct AncestorList(Option<Arc<AncestorCell>>);

#[derive(Clone, Copy, Debug)]
pub struct Ancestor<'a> {
    pub node: NodeId,
    pub atom: &'a Atom,
    pub symbols: &'a SymbolString,
}

impl AncestorList {
    pub fn new() -> Self {
        Self::default()
    }

    /// A new list with `(node, atom)` added; `node` must be newer than every entry.
    pub fn push(&self, node: NodeId, atom: Atom) -> AncestorList {
        debug_assert!(self.iter().next().is_none_or(|a| a.node < node));
        let symbols = atom.symbol_string();
        AncestorList(Some(Arc::new(AncestorCell { node, atom, symbols, next: self.clone() })))
    }

    pub fn iter(&self) -> impl Iterator<Item = Ancestor<'_>> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let cell = cur?;
            cur = cell.next.0.as_deref();
            Some(Ancestor { node: cell.node, atom: &cell.atom, symbols: &cell.symbols })
        })
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.iter().any(|a| a.node == node)
    }

    /// Entries in ascending node order.
    pub fn to_vec(&self) -> Vec<(NodeId, Atom)> {
        let mut v: Vec<_> = self.iter().map(|a| (a.node, a.atom.clone())).collect();
        v.reverse();
        v
    }
}

impl Drop for AncestorList {
    fn drop(&mut self) {
        // unlink iteratively so long chains do not recurse
        let mut cur = self.0.take();
        while let Some(cell) = cur {
            match Arc::try_unwrap(cell) {
                Ok(mut cell) => cur = cell.next.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl PartialEq for AncestorList {
    fn eq(&self, other: &Self) -> bool {
        self.iter().map(|a| (a.node, a.atom)).eq(other.iter().map(|a| (a.node, a.atom)))
    }
}

impl fmt::Debug for AncestorList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_vec().iter().map(|(n, a)| format!("(N{n},{a})"))).finish()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoalLiteral {
    pub literal: Literal,
    pub ancestors: AncestorList,
}

/// Ordered literal list; the selected literal is always the first one and the
/// empty goal is a success leaf.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Goal {
    pub literals: Vec<GoalLiteral>,
}

impl Goal {
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn selected(&self) -> Option<&GoalLiteral> {
        self.literals.first()
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.literals.iter().map(|g| &g.literal)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for l in self.literals() {
            l.atom.for_each_var(&mut |v| {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            });
        }
        out
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("□");
        }
        for (i, l) in self.literals().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// The edge a path node takes toward the next node of the current derivation.
#[derive(Clone, Debug, PartialEq)]
pub enum Edge {
    Resolve {
        clause: usize,
        bindings: Substitution,
    },
    /// Link from a node selecting `\+ A` to the root of the subsidiary tree for `A`.
    NegationArc,
    /// Continuation after `\+ A` succeeded.
    NegationSucceeded,
}

/// Label of an edge without its bindings; used to compare clause sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Step {
    Clause(usize),
    NegationArc,
    NegationSucceeded,
}

impl Edge {
    pub fn step(&self) -> Step {
        match self {
            Edge::Resolve { clause, .. } => Step::Clause(*clause),
            Edge::NegationArc => Step::NegationArc,
            Edge::NegationSucceeded => Step::NegationSucceeded,
        }
    }

    pub fn clause(&self) -> Option<usize> {
        match self {
            Edge::Resolve { clause, .. } => Some(*clause),
            _ => None,
        }
    }
}

/// One node on the current root-to-node derivation.
#[derive(Clone, Debug)]
pub struct PathNode {
    pub id: NodeId,
    pub tree: TreeId,
    pub goal: Goal,
    pub inputs: InputVarSet,
    /// Edge toward the next node on the path; `None` for the last node.
    pub edge: Option<Edge>,
}

/// Position lookup on a path (node ids strictly increase along it).
pub fn path_position(path: &[PathNode], id: NodeId) -> Option<usize> {
    path.binary_search_by_key(&id, |n| n.id).ok()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogEntry {
    pub node: NodeId,
    pub var: Var,
    pub term: Term,
}

/// Ordered binding history of a derivation, one entry per mgu binding.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SubstitutionLog {
    pub entries: Vec<LogEntry>,
}

impl SubstitutionLog {
    pub fn from_path(path: &[PathNode]) -> Self {
        let entries = path
            .iter()
            .filter_map(|n| match &n.edge {
                Some(Edge::Resolve { bindings, .. }) => Some((n.id, bindings)),
                _ => None,
            })
            .flat_map(|(node, s)| {
                s.bindings().iter().map(move |(v, t)| LogEntry { node, var: v.clone(), term: t.clone() })
            })
            .collect();
        SubstitutionLog { entries }
    }

    /// Entries recorded at nodes `from <= node < to`.
    pub fn between(&self, from: NodeId, to: NodeId) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(move |e| e.node >= from && e.node < to)
    }
}

/// Fresh-variable supply; identifiers are never reused within one analysis.
#[derive(Clone, Debug)]
pub struct VarGen {
    next: VarId,
}

impl VarGen {
    pub fn starting_at(next: VarId) -> Self {
        VarGen { next }
    }

    pub fn fresh(&mut self, base: &str) -> Var {
        let id = self.next;
        self.next += 1;
        let base = base.split('_').next().filter(|b| !b.is_empty()).unwrap_or("G");
        Var::new(id, format!("{base}_{id}"))
    }

    pub fn peek(&self) -> VarId {
        self.next
    }

    /// Copy of `clause` with all variables replaced by fresh ones.
    pub fn rename(&mut self, clause: &Clause) -> Clause {
        let mut map: HashMap<VarId, Var> = HashMap::new();
        let mut rn = |t: &Term| rename_term(t, &mut map, self);
        let head = Atom { pred: clause.head.pred.clone(), args: clause.head.args.iter().map(&mut rn).collect() };
        let body = clause
            .body
            .iter()
            .map(|l| Literal {
                polarity: l.polarity,
                atom: Atom { pred: l.atom.pred.clone(), args: l.atom.args.iter().map(&mut rn).collect() },
            })
            .collect();
        Clause { head, body, index: clause.index }
    }
}

fn rename_term(t: &Term, map: &mut HashMap<VarId, Var>, gen: &mut VarGen) -> Term {
    match t {
        Term::Var(v) => Term::Var(map.entry(v.id).or_insert_with(|| gen.fresh(&v.name)).clone()),
        Term::Const(_) => t.clone(),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| rename_term(a, map, gen)).collect()),
    }
}

/// Root goal of the (moded) tree for `q` and its input variables.
pub fn initial_goal(q: &Query) -> (Goal, InputVarSet) {
    let goal =
        Goal { literals: vec![GoalLiteral { literal: Literal::pos(q.atom.clone()), ancestors: AncestorList::new() }] };
    let inputs = q.input_vars().iter().map(|v| v.id).collect();
    (goal, inputs)
}

/// Result of one resolution step.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub goal: Goal,
    pub inputs: InputVarSet,
    pub bindings: Substitution,
    pub renamed: Clause,
}

/// Resolves the selected (positive) literal of `node` with `clause`.
///
/// Body literals inherit the selected literal's ancestors plus the selected atom
/// itself; the remaining literals keep their ancestor lists.
pub fn expand_step(
    node: &PathNode,
    clause: &Clause,
    fresh: &mut VarGen,
    occurs_check: bool,
) -> Result<Expansion, NoUnifier> {
    let selected = node.goal.selected().ok_or(NoUnifier)?;
    if !selected.literal.is_positive() || !selected.literal.atom.same_predicate(&clause.head) {
        return Err(NoUnifier);
    }
    let renamed = fresh.rename(clause);
    let (bindings, inputs) = mgu(&selected.literal.atom, &renamed.head, &node.inputs, occurs_check)?;
    let body_ancestors = selected.ancestors.push(node.id, selected.literal.atom.clone());
    let literals = renamed
        .body
        .iter()
        .map(|l| GoalLiteral { literal: l.substitute(&bindings), ancestors: body_ancestors.clone() })
        .chain(
            node.goal.literals[1..]
                .iter()
                .map(|g| GoalLiteral { literal: g.literal.substitute(&bindings), ancestors: g.ancestors.clone() }),
        )
        .collect();
    Ok(Expansion { goal: Goal { literals }, inputs, bindings, renamed })
}
