//! Brute-force ground truth: bounded Herbrand universes, a plain SLDNF
//! interpreter without loop checking, bounded moded-query forests and replay of
//! derivations under ground input assignments.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{Derivation, Step, VarGen};
use crate::model::{nesting_depth, Atom, Literal, Program, Query, Term, VarId};
use crate::unify::{unify_args, Substitute, Substitution};

/// Ground terms over the program's signature with nesting depth at most
/// `depth`, ordered by depth and then by printed form.
pub fn herbrand_terms(program: &Program, depth: usize) -> Vec<Term> {
    let mut layers: Vec<Vec<Term>> = vec![program.constants().iter().map(|c| Term::constant(c)).collect()];
    layers[0].sort_by_key(Term::to_string);
    for d in 1..=depth {
        let below: Vec<Term> = layers.iter().flatten().cloned().collect();
        let mut layer = Vec::new();
        for (f, arity) in program.functions() {
            for args in tuples(&below, *arity) {
                if args.iter().any(|a| nesting_depth(a) == d - 1) {
                    layer.push(Term::compound(f, args));
                }
            }
        }
        layer.sort_by_key(Term::to_string);
        layers.push(layer);
    }
    layers.into_iter().flatten().collect()
}

fn tuples(pool: &[Term], n: usize) -> Vec<Vec<Term>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect()
    })
}

/// Every substitution of `terms` into the input positions of `q`; the results
/// are concrete queries.
pub fn ground_instances(q: &Query, terms: &[Term]) -> Vec<Query> {
    let inputs = q.input_vars();
    tuples(terms, inputs.len())
        .into_iter()
        .map(|choice| {
            let s = Substitution::from_bindings(inputs.iter().cloned().zip(choice).collect());
            Query::concrete(q.atom.substitute(&s))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("floundering on {0}")]
    Floundering(String),
    #[error("query has input modes; instantiate it first")]
    Moded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    /// Edges on the longest derivation seen.
    pub longest: usize,
    pub reached_cap: bool,
    pub nodes: usize,
    /// False when the node budget ran out before the tree was exhausted.
    pub complete: bool,
}

/// Internal unwinding reasons of the interpreter.
enum Stop {
    Budget,
    Capped,
    Error(OracleError),
}

/// Node budget of one bounded search.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Bounds of one bounded search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Derivations are abandoned after this many edges.
    pub max_len: usize,
    pub budget: usize,
    /// End the search at the first derivation reaching `max_len`.
    pub stop_at_cap: bool,
}

impl SearchLimits {
    pub fn new(max_len: usize) -> Self {
        SearchLimits { max_len, budget: DEFAULT_BUDGET, stop_at_cap: false }
    }
}

struct Interp<'a, V: FnMut(&[Step])> {
    program: &'a Program,
    limits: SearchLimits,
    vars: VarGen,
    summary: SearchSummary,
    steps: Vec<Step>,
    visit: V,
}

impl<V: FnMut(&[Step])> Interp<'_, V> {
    /// Explores the tree below `goal`; returns whether a success leaf was found.
    /// With `first_only` (inside subsidiary trees) it stops at that leaf.
    fn solve(&mut self, goal: Vec<Literal>, first_only: bool) -> Result<bool, Stop> {
        self.summary.nodes += 1;
        if self.summary.nodes > self.limits.budget {
            return Err(Stop::Budget);
        }
        (self.visit)(&self.steps);
        let depth = self.steps.len();
        self.summary.longest = self.summary.longest.max(depth);
        let Some(sel) = goal.first() else {
            return Ok(true);
        };
        if depth >= self.limits.max_len {
            self.summary.reached_cap = true;
            return if self.limits.stop_at_cap { Err(Stop::Capped) } else { Ok(false) };
        }
        if !sel.is_positive() {
            if !sel.atom.is_ground() {
                return Err(Stop::Error(OracleError::Floundering(sel.to_string())));
            }
            self.steps.push(Step::NegationArc);
            let found = self.solve(vec![Literal::pos(sel.atom.clone())], true);
            self.steps.pop();
            if found? {
                return Ok(false);
            }
            self.steps.push(Step::NegationSucceeded);
            let r = self.solve(goal[1..].to_vec(), first_only);
            self.steps.pop();
            return r;
        }
        let mut any = false;
        for &ci in self.program.clauses_for(&sel.atom.key()) {
            let renamed = self.vars.rename(self.program.clause(ci));
            let Ok(s) = unify_args(&sel.atom.args, &renamed.head.args, true) else { continue };
            let child: Vec<Literal> = renamed.body.iter().chain(&goal[1..]).map(|l| l.substitute(&s)).collect();
            self.steps.push(Step::Clause(ci));
            let r = self.solve(child, first_only);
            self.steps.pop();
            if r? {
                any = true;
                if first_only {
                    return Ok(true);
                }
            }
        }
        Ok(any)
    }
}

const STACK_BYTES: usize = 256 << 20;

/// Exhaustive depth-first search without loop checking, within `limits`.
/// `visit` sees the step sequence of every node.
pub fn bounded_search_with(
    program: &Program,
    q: &Query,
    limits: SearchLimits,
    visit: impl FnMut(&[Step]) + Send,
) -> Result<SearchSummary, OracleError> {
    if q.is_moded() {
        return Err(OracleError::Moded);
    }
    let first_free = program.max_var_id().into_iter().chain(q.atom.max_var_id()).max().map_or(0, |m| m + 1);
    let mut interp = Interp {
        program,
        limits,
        vars: VarGen::starting_at(first_free),
        summary: SearchSummary::default(),
        steps: Vec::new(),
        visit,
    };
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, move || {
                match interp.solve(vec![Literal::pos(q.atom.clone())], false) {
                    Ok(_) => interp.summary.complete = true,
                    Err(Stop::Budget | Stop::Capped) => interp.summary.complete = false,
                    Err(Stop::Error(e)) => return Err(e),
                }
                Ok(interp.summary)
            })
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    })
}

pub fn bounded_search(program: &Program, q: &Query, max_len: usize) -> Result<SearchSummary, OracleError> {
    bounded_search_with(program, q, SearchLimits::new(max_len), |_| {})
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundedForestSummary {
    pub instances: usize,
    /// Longest derivation per instance, keyed by the printed instance.
    pub longest: BTreeMap<String, usize>,
    pub reached_cap: bool,
    /// Instances with a derivation at the cap.
    pub capped: Vec<String>,
    /// Every instance's tree was searched to completion below the cap.
    pub all_finite: bool,
    /// Instances whose search ran out of node budget.
    pub incomplete: Vec<String>,
    pub errors: Vec<(String, String)>,
}

/// Bounded searches over every ground instance of `q` with input terms up to
/// nesting depth `depth`.
pub fn forest_probe(program: &Program, q: &Query, depth: usize, max_len: usize) -> BoundedForestSummary {
    forest_probe_with(program, q, depth, SearchLimits::new(max_len))
}

/// [`forest_probe`] with explicit limits for every instance.
pub fn forest_probe_with(program: &Program, q: &Query, depth: usize, limits: SearchLimits) -> BoundedForestSummary {
    let instances = ground_instances(q, &herbrand_terms(program, depth));
    let results: Vec<(String, Result<SearchSummary, OracleError>)> =
        instances.par_iter().map(|i| (i.to_string(), bounded_search_with(program, i, limits, |_| {}))).collect();
    let mut out = BoundedForestSummary { instances: results.len(), ..Default::default() };
    for (name, r) in results {
        match r {
            Ok(s) => {
                if s.reached_cap {
                    out.capped.push(name.clone());
                }
                if !s.complete {
                    out.incomplete.push(name.clone());
                }
                out.longest.insert(name, s.longest);
            }
            Err(e) => out.errors.push((name, e.to_string())),
        }
    }
    out.reached_cap = !out.capped.is_empty();
    out.all_finite = !out.reached_cap && out.errors.is_empty() && out.incomplete.is_empty();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("no ground term assigned to input variable {0}")]
    MissingInput(String),
    #[error("term assigned to {0} is not ground")]
    NotGround(String),
}

/// A derivation replayed on a ground instance of its root.
#[derive(Clone, Debug, PartialEq)]
pub struct ModedInstance {
    pub query: Query,
    pub steps: Vec<usize>,
    pub goals: Vec<Vec<Literal>>,
    /// Index of the first step whose clause no longer unifies.
    pub truncated_at: Option<usize>,
}

/// Replays the clause steps of `d` from the root instantiated by `assignment`,
/// stopping at the first step that no longer applies.
pub fn instantiate_derivation(
    program: &Program,
    d: &Derivation,
    assignment: &HashMap<VarId, Term>,
) -> Result<ModedInstance, ReplayError> {
    let mut bindings = Vec::new();
    for v in d.query.input_vars() {
        let t = assignment.get(&v.id).ok_or_else(|| ReplayError::MissingInput(v.name.to_string()))?;
        if !t.is_ground() {
            return Err(ReplayError::NotGround(v.name.to_string()));
        }
        bindings.push((v, t.clone()));
    }
    let root: Atom = d.query.atom.substitute(&Substitution::from_bindings(bindings));
    let query = Query::concrete(root.clone());
    let first_free = program.max_var_id().into_iter().chain(root.max_var_id()).max().map_or(0, |m| m + 1);
    let mut vars = VarGen::starting_at(first_free);
    let mut goal = vec![Literal::pos(root)];
    let mut goals = vec![goal.clone()];
    let mut steps = Vec::new();
    for (k, &ci) in d.steps.iter().enumerate() {
        let unified = goal.first().filter(|l| l.is_positive()).and_then(|sel| {
            let renamed = vars.rename(program.clause(ci));
            if !sel.atom.same_predicate(&renamed.head) {
                return None;
            }
            let s = unify_args(&sel.atom.args, &renamed.head.args, true).ok()?;
            Some(renamed.body.iter().chain(&goal[1..]).map(|l| l.substitute(&s)).collect::<Vec<_>>())
        });
        match unified {
            Some(next) => {
                steps.push(ci);
                goal = next;
                goals.push(goal.clone());
            }
            None => return Ok(ModedInstance { query, steps, goals, truncated_at: Some(k) }),
        }
    }
    Ok(ModedInstance { query, steps, goals, truncated_at: None })
}
