use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::term::{Atom, Clause, PredKey, Symbol, Term, Var, VarId};

/// Name given to the constant seeded into a Herbrand universe when the program has none.
pub const SYNTHETIC_CONSTANT: &str = "c0";

/// An ordered list of clauses plus derived lookup tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    clauses: Vec<Clause>,
    predicates: Vec<(PredKey, Vec<usize>)>,
    pred_index: HashMap<PredKey, usize>,
    constants: BTreeSet<Symbol>,
    functions: BTreeSet<(Symbol, usize)>,
    synthetic_constant: Option<Symbol>,
}

impl Program {
    pub fn new(mut clauses: Vec<Clause>) -> Self {
        for (i, c) in clauses.iter_mut().enumerate() {
            c.index = i;
        }
        let mut predicates: Vec<(PredKey, Vec<usize>)> = Vec::new();
        let mut pred_index = HashMap::new();
        let mut constants = BTreeSet::new();
        let mut functions = BTreeSet::new();

        let mut note_pred = |key: PredKey, clause: Option<usize>| {
            let slot = *pred_index.entry(key.clone()).or_insert_with(|| {
                predicates.push((key, Vec::new()));
                predicates.len() - 1
            });
            if let Some(c) = clause {
                predicates[slot].1.push(c);
            }
        };
        for c in &clauses {
            note_pred(c.head.key(), Some(c.index));
            for l in &c.body {
                note_pred(l.atom.key(), None);
            }
        }
        for c in &clauses {
            let atoms = std::iter::once(&c.head).chain(c.body.iter().map(|l| &l.atom));
            for a in atoms {
                for t in &a.args {
                    collect_signature(t, &mut constants, &mut functions);
                }
            }
        }
        let synthetic_constant = if constants.is_empty() {
            let s: Symbol = SYNTHETIC_CONSTANT.into();
            constants.insert(s.clone());
            Some(s)
        } else {
            None
        };
        Program { clauses, predicates, pred_index, constants, functions, synthetic_constant }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &Clause {
        &self.clauses[index]
    }

    /// Predicates in order of first appearance in the program text.
    pub fn predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.predicates.iter().map(|(k, _)| k)
    }

    /// Clause indices defining `key`, in textual order; empty for undefined predicates.
    pub fn clauses_for(&self, key: &PredKey) -> &[usize] {
        match self.pred_index.get(key) {
            Some(&slot) => &self.predicates[slot].1,
            None => &[],
        }
    }

    pub fn is_defined(&self, key: &PredKey) -> bool {
        !self.clauses_for(key).is_empty()
    }

    /// Constants of the Herbrand universe (includes the synthetic one if seeded).
    pub fn constants(&self) -> &BTreeSet<Symbol> {
        &self.constants
    }

    /// Function symbols with their arities.
    pub fn functions(&self) -> &BTreeSet<(Symbol, usize)> {
        &self.functions
    }

    pub fn synthetic_constant(&self) -> Option<&Symbol> {
        self.synthetic_constant.as_ref()
    }

    pub fn max_var_id(&self) -> Option<VarId> {
        self.clauses.iter().filter_map(Clause::max_var_id).max()
    }

    /// Short clause label in the `C_p2` style: initial of the predicate name and the
    /// 1-based ordinal among that predicate's clauses.
    pub fn clause_name(&self, index: usize) -> String {
        let clause = &self.clauses[index];
        let ordinal = self.clauses_for(&clause.head.key()).iter().position(|&i| i == index).map_or(0, |p| p + 1);
        let initial: String = clause.head.pred.chars().take(1).collect();
        format!("C_{initial}{ordinal}")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn collect_signature(t: &Term, constants: &mut BTreeSet<Symbol>, functions: &mut BTreeSet<(Symbol, usize)>) {
    match t {
        Term::Var(_) => {}
        Term::Const(c) => {
            constants.insert(c.clone());
        }
        Term::Compound(f, args) => {
            functions.insert((f.clone(), args.len()));
            for a in args {
                collect_signature(a, constants, functions);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Input,
    Open,
}

/// Per-argument mode flags of a query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModePattern(pub Vec<Mode>);

impl ModePattern {
    pub fn all_open(arity: usize) -> Self {
        ModePattern(vec![Mode::Open; arity])
    }

    /// Bit `i` set means argument `i` is an input mode.
    pub fn from_mask(arity: usize, mask: u64) -> Self {
        ModePattern((0..arity).map(|i| if mask >> i & 1 == 1 { Mode::Input } else { Mode::Open }).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().enumerate().filter(|(_, m)| **m == Mode::Input).fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn input_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, m)| **m == Mode::Input).map(|(i, _)| i)
    }

    pub fn is_moded(&self) -> bool {
        self.0.contains(&Mode::Input)
    }

    pub fn is_subset_of(&self, other: &ModePattern) -> bool {
        self.0.len() == other.0.len() && self.mask() & !other.mask() == 0
    }

    /// True if the input positions are exactly `0..k` for some k.
    pub fn is_prefix(&self) -> bool {
        let m = self.mask();
        m & (m + 1) == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("mode pattern has {pattern} flags but the atom has {arity} arguments")]
    ArityMismatch { pattern: usize, arity: usize },
    #[error("input-mode argument {position} is not a variable")]
    InputNotVariable { position: usize },
    #[error("input variable {name} occurs more than once in the query")]
    InputNotDistinct { name: String },
}

/// A query atom together with the input modes of its arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub atom: Atom,
    pub pattern: ModePattern,
}

impl Query {
    /// Input positions must hold distinct variables that occur nowhere else in the atom.
    pub fn new(atom: Atom, pattern: ModePattern) -> Result<Self, QueryError> {
        if pattern.0.len() != atom.args.len() {
            return Err(QueryError::ArityMismatch { pattern: pattern.0.len(), arity: atom.args.len() });
        }
        for pos in pattern.input_positions() {
            let Term::Var(v) = &atom.args[pos] else {
                return Err(QueryError::InputNotVariable { position: pos });
            };
            let occurrences: usize = atom
                .args
                .iter()
                .map(|t| {
                    let mut n = 0;
                    t.for_each_var(&mut |w| n += usize::from(w.id == v.id));
                    n
                })
                .sum();
            if occurrences != 1 {
                return Err(QueryError::InputNotDistinct { name: v.name.to_string() });
            }
        }
        Ok(Query { atom, pattern })
    }

    pub fn concrete(atom: Atom) -> Self {
        let pattern = ModePattern::all_open(atom.args.len());
        Query { atom, pattern }
    }

    pub fn is_moded(&self) -> bool {
        self.pattern.is_moded()
    }

    pub fn input_vars(&self) -> Vec<Var> {
        self.pattern.input_positions().filter_map(|p| self.atom.args[p].as_var().cloned()).collect()
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.atom.pred)?;
        if self.atom.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, (arg, mode)) in self.atom.args.iter().zip(&self.pattern.0).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if *mode == Mode::Input {
                f.write_str("@")?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str(")")
    }
}
