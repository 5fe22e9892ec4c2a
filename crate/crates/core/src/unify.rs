//! Most general unifiers with goal-variable preference and input-variable tracking.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::model::{Atom, Literal, Term, Var, VarId};

/// An ordered list of bindings. Bindings produced by [`mgu`] are idempotent: no
/// bound variable occurs in any right-hand side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: Vec<(Var, Term)>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bindings(bindings: Vec<(Var, Term)>) -> Self {
        Substitution { bindings }
    }

    pub fn bindings(&self) -> &[(Var, Term)] {
        &self.bindings
    }

    pub fn get(&self, id: VarId) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| v.id == id).map(|(_, t)| t)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn push(&mut self, var: Var, term: Term) {
        self.bindings.push((var, term));
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}

/// Simultaneous application of a substitution.
pub trait Substitute {
    fn substitute(&self, s: &Substitution) -> Self;
}

impl Substitute for Term {
    fn substitute(&self, s: &Substitution) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => s.get(v.id).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| a.substitute(s)).collect()),
        }
    }
}

impl Substitute for Atom {
    fn substitute(&self, s: &Substitution) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.substitute(s)).collect() }
    }
}

impl Substitute for Literal {
    fn substitute(&self, s: &Substitution) -> Literal {
        Literal { polarity: self.polarity, atom: self.atom.substitute(s) }
    }
}

impl<T: Substitute> Substitute for Vec<T> {
    fn substitute(&self, s: &Substitution) -> Vec<T> {
        self.iter().map(|x| x.substitute(s)).collect()
    }
}

pub fn apply_subst<T: Substitute>(s: &Substitution, t: &T) -> T {
    t.substitute(s)
}

/// Variables currently standing for (parts of) ground input terms. Only grows
/// along a derivation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InputVarSet(Arc<BTreeSet<VarId>>);

impl InputVarSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: VarId) -> bool {
        self.0.contains(&id)
    }

    pub fn insert(&mut self, id: VarId) {
        if !self.0.contains(&id) {
            Arc::make_mut(&mut self.0).insert(id);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<VarId> for InputVarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        InputVarSet(Arc::new(iter.into_iter().collect()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("atoms do not unify")]
pub struct NoUnifier;

/// Unifies a selected goal atom with a renamed-apart clause head.
///
/// Variable–variable ties: a head variable is always bound to the goal variable;
/// between two goal variables an input variable survives, otherwise the smaller
/// id survives. Every variable occurring in a term bound to an input variable
/// is added to the returned input set.
pub fn mgu(
    goal_atom: &Atom,
    head_atom: &Atom,
    inputs: &InputVarSet,
    occurs_check: bool,
) -> Result<(Substitution, InputVarSet), NoUnifier> {
    if !goal_atom.same_predicate(head_atom) {
        return Err(NoUnifier);
    }
    let mut head_vars = HashSet::new();
    head_atom.for_each_var(&mut |v| {
        head_vars.insert(v.id);
    });
    let mut u = Unifier { head_vars, inputs, map: HashMap::new(), order: Vec::new(), occurs_check };
    for (g, h) in goal_atom.args.iter().zip(&head_atom.args) {
        u.unify(g, h)?;
    }
    let subst = u.solved();
    let mut out = inputs.clone();
    for (v, t) in subst.bindings() {
        if inputs.contains(v.id) {
            t.for_each_var(&mut |w| out.insert(w.id));
        }
    }
    Ok((subst, out))
}

/// Plain most general unifier of two term lists, no input bookkeeping; the right
/// side plays the role of the clause head in tie-breaks.
pub fn unify_args(left: &[Term], right: &[Term], occurs_check: bool) -> Result<Substitution, NoUnifier> {
    if left.len() != right.len() {
        return Err(NoUnifier);
    }
    let mut head_vars = HashSet::new();
    for t in right {
        t.for_each_var(&mut |v| {
            head_vars.insert(v.id);
        });
    }
    let inputs = InputVarSet::new();
    let mut u = Unifier { head_vars, inputs: &inputs, map: HashMap::new(), order: Vec::new(), occurs_check };
    for (l, r) in left.iter().zip(right) {
        u.unify(l, r)?;
    }
    Ok(u.solved())
}

struct Unifier<'a> {
    head_vars: HashSet<VarId>,
    inputs: &'a InputVarSet,
    map: HashMap<VarId, Term>,
    order: Vec<Var>,
    occurs_check: bool,
}

impl Unifier<'_> {
    fn walk(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = &cur {
            match self.map.get(&v.id) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, id: VarId, t: &Term) -> bool {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match self.walk(&t) {
                Term::Var(v) if v.id == id => return true,
                Term::Compound(_, args) => stack.extend(args),
                _ => {}
            }
        }
        false
    }

    fn bind(&mut self, v: Var, t: Term) -> Result<(), NoUnifier> {
        if self.occurs_check && self.occurs(v.id, &t) {
            return Err(NoUnifier);
        }
        self.map.insert(v.id, t);
        self.order.push(v);
        Ok(())
    }

    /// Which of two distinct unbound variables gets bound: returns (bound, survivor).
    fn orient(&self, x: Var, y: Var) -> (Var, Var) {
        let xh = self.head_vars.contains(&x.id);
        let yh = self.head_vars.contains(&y.id);
        match (xh, yh) {
            (true, false) => (x, y),
            (false, true) => (y, x),
            (true, true) => {
                if x.id > y.id {
                    (x, y)
                } else {
                    (y, x)
                }
            }
            (false, false) => {
                let xi = self.inputs.contains(x.id);
                let yi = self.inputs.contains(y.id);
                match (xi, yi) {
                    (true, false) => (y, x),
                    (false, true) => (x, y),
                    _ if x.id > y.id => (x, y),
                    _ => (y, x),
                }
            }
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Result<(), NoUnifier> {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((a, b)) = stack.pop() {
            let a = self.walk(&a);
            let b = self.walk(&b);
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    if x.id != y.id {
                        let (bound, survivor) = self.orient(x, y);
                        self.bind(bound, Term::Var(survivor))?;
                    }
                }
                (Term::Var(x), t) | (t, Term::Var(x)) => self.bind(x, t)?,
                (Term::Const(c), Term::Const(d)) => {
                    if c != d {
                        return Err(NoUnifier);
                    }
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return Err(NoUnifier);
                    }
                    stack.extend(xs.into_iter().zip(ys).rev());
                }
                _ => return Err(NoUnifier),
            }
        }
        Ok(())
    }

    fn resolve(&self, t: &Term, visiting: &mut Vec<VarId>) -> Term {
        match t {
            Term::Var(v) => match self.map.get(&v.id) {
                // Without the occurs check a binding may be cyclic; leave the
                // variable in place at the point the cycle closes.
                Some(next) if !visiting.contains(&v.id) => {
                    visiting.push(v.id);
                    let r = self.resolve(next, visiting);
                    visiting.pop();
                    r
                }
                _ => t.clone(),
            },
            Term::Const(_) => t.clone(),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.resolve(a, visiting)).collect())
            }
        }
    }

    fn solved(&self) -> Substitution {
        let bindings = self
            .order
            .iter()
            .map(|v| {
                let mut visiting = vec![v.id];
                (v.clone(), self.resolve(&self.map[&v.id], &mut visiting))
            })
            .collect();
        Substitution { bindings }
    }
}
