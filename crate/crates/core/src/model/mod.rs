//! Syntax of the clause language and the measures defined over it.

mod program;
mod symbols;
mod term;

pub use program::{Mode, ModePattern, Program, Query, QueryError, SYNTHETIC_CONSTANT};
pub use symbols::{
    is_projection, is_variant, loops_into, loops_into_strings, nesting_depth, pmax_table, symbol_string, term_size,
    PmaxTable, SymbolString, Symbolic, Token,
};
pub use term::{Atom, Clause, Literal, Polarity, PredKey, Symbol, Term, Var, VarId, Verdict, LIST_CONS, LIST_NIL};
