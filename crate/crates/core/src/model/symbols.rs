//! Size, depth and symbol-string machinery used by the loop check.
//!
//! A symbol string reads the symbols of a term or atom left to right, with every
//! variable collapsed to one anonymous token. One atom *loops into* another when
//! both share a predicate and the first string is a (not necessarily contiguous)
//! subsequence of the second.

use std::collections::HashMap;
use std::fmt;

use super::program::Program;
use super::term::{Atom, PredKey, Symbol, Term, VarId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Symbol(Symbol),
    /// Stands for any variable.
    Var,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolString(pub Vec<Token>);

impl SymbolString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match t {
                Token::Symbol(s) => f.write_str(s)?,
                Token::Var => f.write_str("𝒳")?,
            }
        }
        Ok(())
    }
}

/// Terms and atoms both have a size and a symbol string.
pub trait Symbolic {
    /// Occurrences of function symbols, constants and variables. An atom's
    /// predicate symbol is not counted.
    fn size(&self) -> usize;
    fn push_symbols(&self, out: &mut Vec<Token>);

    fn symbol_string(&self) -> SymbolString {
        let mut out = Vec::new();
        self.push_symbols(&mut out);
        SymbolString(out)
    }
}

impl Symbolic for Term {
    fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Symbolic::size).sum::<usize>(),
        }
    }

    fn push_symbols(&self, out: &mut Vec<Token>) {
        match self {
            Term::Var(_) => out.push(Token::Var),
            Term::Const(c) => out.push(Token::Symbol(c.clone())),
            Term::Compound(f, args) => {
                out.push(Token::Symbol(f.clone()));
                args.iter().for_each(|a| a.push_symbols(out));
            }
        }
    }
}

impl Symbolic for Atom {
    fn size(&self) -> usize {
        self.args.iter().map(Symbolic::size).sum()
    }

    fn push_symbols(&self, out: &mut Vec<Token>) {
        out.push(Token::Symbol(self.pred.clone()));
        self.args.iter().for_each(|a| a.push_symbols(out));
    }
}

pub fn term_size<T: Symbolic + ?Sized>(t: &T) -> usize {
    t.size()
}

pub fn symbol_string<T: Symbolic + ?Sized>(t: &T) -> SymbolString {
    t.symbol_string()
}

/// Layers of nested function symbols; variables and constants have depth 0.
pub fn nesting_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 0,
        Term::Compound(_, args) => 1 + args.iter().map(nesting_depth).max().unwrap_or(0),
    }
}

/// `small` is obtained from `big` by deleting zero or more tokens.
pub fn is_projection(small: &SymbolString, big: &SymbolString) -> bool {
    let mut rest = big.0.iter();
    small.0.iter().all(|tok| rest.any(|t| t == tok))
}

pub fn loops_into(a1: &Atom, a2: &Atom) -> bool {
    a1.same_predicate(a2) && is_projection(&a1.symbol_string(), &a2.symbol_string())
}

/// Same as [`loops_into`] with precomputed symbol strings.
pub fn loops_into_strings(a1: &Atom, s1: &SymbolString, a2: &Atom, s2: &SymbolString) -> bool {
    a1.same_predicate(a2) && is_projection(s1, s2)
}

/// True iff a bijective variable renaming maps `a1` onto `a2`.
pub fn is_variant(a1: &Atom, a2: &Atom) -> bool {
    if !a1.same_predicate(a2) {
        return false;
    }
    let mut fwd: HashMap<VarId, VarId> = HashMap::new();
    let mut bwd: HashMap<VarId, VarId> = HashMap::new();
    a1.args.iter().zip(&a2.args).all(|(x, y)| variant_terms(x, y, &mut fwd, &mut bwd))
}

fn variant_terms(x: &Term, y: &Term, fwd: &mut HashMap<VarId, VarId>, bwd: &mut HashMap<VarId, VarId>) -> bool {
    match (x, y) {
        (Term::Var(v), Term::Var(w)) => {
            let f = *fwd.entry(v.id).or_insert(w.id);
            let b = *bwd.entry(w.id).or_insert(v.id);
            f == w.id && b == v.id
        }
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| variant_terms(a, b, fwd, bwd))
        }
        _ => false,
    }
}

/// Per predicate, the maximum nesting depth of each argument over all clause heads.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PmaxTable(pub HashMap<PredKey, Vec<usize>>);

impl PmaxTable {
    /// Row for `key`; unknown predicates get an all-zero row.
    pub fn row(&self, key: &PredKey) -> Vec<usize> {
        self.0.get(key).cloned().unwrap_or_else(|| vec![0; key.arity])
    }
}

pub fn pmax_table(program: &Program) -> PmaxTable {
    let mut table: HashMap<PredKey, Vec<usize>> = program.predicates().map(|k| (k.clone(), vec![0; k.arity])).collect();
    for clause in program.clauses() {
        let row = table.entry(clause.head.key()).or_insert_with(|| vec![0; clause.head.args.len()]);
        for (slot, arg) in row.iter_mut().zip(&clause.head.args) {
            *slot = (*slot).max(nesting_depth(arg));
        }
    }
    PmaxTable(table)
}
