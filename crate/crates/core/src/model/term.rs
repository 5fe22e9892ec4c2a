use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Interned-by-sharing symbol name (predicate, functor or constant).
pub type Symbol = Arc<str>;

/// Reserved functor used for list cells `[H|T]`.
pub const LIST_CONS: &str = "[|]";
/// Constant used for the empty list `[]`.
pub const LIST_NIL: &str = "[]";

pub type VarId = u32;

/// A logic variable. Identity is the numeric id; the name is only for printing.
#[derive(Clone, Debug)]
pub struct Var {
    pub id: VarId,
    pub name: Symbol,
}

impl Var {
    pub fn new(id: VarId, name: impl Into<Symbol>) -> Self {
        Var { id, name: name.into() }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(Symbol),
    /// Functor applied to at least one argument.
    Compound(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(id: VarId, name: &str) -> Term {
        Term::Var(Var::new(id, name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.into())
    }

    /// Builds `f(args..)`; an empty argument list yields a constant.
    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Const(functor.into())
        } else {
            Term::Compound(functor.into(), args)
        }
    }

    pub fn nil() -> Term {
        Term::Const(LIST_NIL.into())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(LIST_CONS.into(), vec![head, tail])
    }

    /// Builds a proper list from its elements, optionally with an explicit tail.
    pub fn list(items: Vec<Term>, tail: Option<Term>) -> Term {
        let mut acc = tail.unwrap_or_else(Term::nil);
        for item in items.into_iter().rev() {
            acc = Term::cons(item, acc);
        }
        acc
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Visits every variable occurrence, left to right.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::Const(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn contains_var(&self, id: VarId) -> bool {
        match self {
            Term::Var(v) => v.id == id,
            Term::Const(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.contains_var(id)),
        }
    }

    pub fn max_var_id(&self) -> Option<VarId> {
        let mut max = None;
        self.for_each_var(&mut |v| max = max.max(Some(v.id)));
        max
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => f.write_str(c),
            Term::Compound(functor, args) if &**functor == LIST_CONS && args.len() == 2 => {
                f.write_str("[")?;
                write!(f, "{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Term::Compound(g, rest) if &**g == LIST_CONS && rest.len() == 2 => {
                            write!(f, ",{}", rest[0])?;
                            tail = &rest[1];
                        }
                        Term::Const(c) if &**c == LIST_NIL => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Term::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// Predicate key: name plus arity (`p/2` and `p/3` are different predicates).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Symbol,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn key(&self) -> PredKey {
        PredKey { name: self.pred.clone(), arity: self.args.len() }
    }

    pub fn same_predicate(&self, other: &Atom) -> bool {
        self.pred == other.pred && self.args.len() == other.args.len()
    }

    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a Var)) {
        self.args.iter().for_each(|a| a.for_each_var(f));
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn max_var_id(&self) -> Option<VarId> {
        self.args.iter().filter_map(Term::max_var_id).max()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_args(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub polarity: Polarity,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { polarity: Polarity::Positive, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { polarity: Polarity::Negative, atom }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.atom),
            Polarity::Negative => write!(f, "\\+ {}", self.atom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Literal>,
    /// Position of the clause in the program text (0-based).
    pub index: usize,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn max_var_id(&self) -> Option<VarId> {
        self.body.iter().filter_map(|l| l.atom.max_var_id()).chain(self.head.max_var_id()).max()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

/// Total order used when comparing answers across runs:
/// `NonTerminating < MostLikelyNonTerminating < MostLikelyTerminating < Terminating`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    NonTerminating,
    MostLikelyNonTerminating,
    MostLikelyTerminating,
    Terminating,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::NonTerminating,
        Verdict::MostLikelyNonTerminating,
        Verdict::MostLikelyTerminating,
        Verdict::Terminating,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Verdict::Terminating => "TERMINATING",
            Verdict::MostLikelyTerminating => "MOST_LIKELY_TERMINATING",
            Verdict::NonTerminating => "NON_TERMINATING",
            Verdict::MostLikelyNonTerminating => "MOST_LIKELY_NON_TERMINATING",
        }
    }

    pub fn from_token(token: &str) -> Option<Verdict> {
        Verdict::ALL.into_iter().find(|v| v.token() == token)
    }

    pub fn is_terminating_side(self) -> bool {
        matches!(self, Verdict::Terminating | Verdict::MostLikelyTerminating)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl serde::Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}
