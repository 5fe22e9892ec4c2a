//! End-to-end termination testing for single queries and whole query sets.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Algorithm, Config};
use crate::engine::{construct, EngineError, Statistics, TreeResult};
use crate::loopcheck::{LpCheck, Window};
use crate::model::{Atom, Mode, ModePattern, Program, Query, Term, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Floundering,
    ResourceExceeded,
    Config,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportError {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<&EngineError> for ReportError {
    fn from(e: &EngineError) -> Self {
        let kind = match e {
            EngineError::Floundering { .. } => ErrorKind::Floundering,
            EngineError::ResourceExceeded { .. } => ErrorKind::ResourceExceeded,
            EngineError::Config(_) => ErrorKind::Config,
        };
        ReportError { kind, message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub query: String,
    pub predicate: String,
    /// Input positions as a bitmask, bit `i` for argument `i`.
    pub mode_mask: u64,
    pub algorithm: u8,
    /// `None` when the analysis ended in an error.
    pub verdict: Option<Verdict>,
    pub stats: Statistics,
    pub floundered: bool,
    pub l_flag: bool,
    pub abort_window: Option<Window>,
    /// Query whose verdict was reused instead of running the analysis.
    pub inherited_from: Option<String>,
    pub warnings: Vec<String>,
    pub error: Option<ReportError>,
    pub elapsed_ms: f64,
}

impl AnalysisReport {
    fn blank(q: &Query, cfg: &Config) -> Self {
        AnalysisReport {
            query: q.to_string(),
            predicate: q.atom.key().to_string(),
            mode_mask: q.pattern.mask(),
            algorithm: match cfg.algorithm {
                Algorithm::One => 1,
                Algorithm::Two => 2,
            },
            verdict: None,
            stats: Statistics::default(),
            floundered: false,
            l_flag: false,
            abort_window: None,
            inherited_from: None,
            warnings: Vec::new(),
            error: None,
            elapsed_ms: 0.0,
        }
    }
}

/// Verdict for a finished construction.
pub fn verdict_of(tree: &TreeResult) -> Verdict {
    match &tree.abort {
        Some(a) if a.exact => Verdict::NonTerminating,
        Some(_) => Verdict::MostLikelyNonTerminating,
        None if tree.l_flag => Verdict::MostLikelyTerminating,
        None => Verdict::Terminating,
    }
}

pub fn analyze(program: &Program, query: &Query, cfg: &Config) -> AnalysisReport {
    analyze_with_tree(program, query, cfg).0
}

/// Like [`analyze`], also handing back the constructed tree (with its trace when
/// `cfg.trace` is set).
pub fn analyze_with_tree(program: &Program, query: &Query, cfg: &Config) -> (AnalysisReport, Option<TreeResult>) {
    let start = Instant::now();
    let mut report = AnalysisReport::blank(query, cfg);
    if !program.is_defined(&query.atom.key()) {
        report.warnings.push(format!("predicate {} has no clauses", query.atom.key()));
    }
    let mut policy = LpCheck::new(program, cfg);
    let tree = match construct(program, query, cfg, &mut policy) {
        Ok(tree) => {
            report.verdict = Some(verdict_of(&tree));
            report.stats = tree.stats.clone();
            report.l_flag = tree.l_flag;
            report.abort_window = tree.abort.as_ref().and_then(|a| a.window.clone());
            Some(tree)
        }
        Err(e) => {
            report.floundered = matches!(e, EngineError::Floundering { .. });
            report.error = Some(ReportError::from(&e));
            None
        }
    };
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    (report, tree)
}

/// Most general moded query for `pred` with the given input positions: `@I<k>`
/// at inputs and `V<k>` elsewhere, `k` the 1-based position.
pub fn moded_query(name: &str, pattern: ModePattern) -> Query {
    let args = pattern
        .0
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let k = i + 1;
            match m {
                Mode::Input => Term::var(i as u32, &format!("I{k}")),
                Mode::Open => Term::var(i as u32, &format!("V{k}")),
            }
        })
        .collect();
    Query::new(Atom::new(name, args), pattern).expect("distinct fresh variables")
}

/// All nonempty input-position subsets per predicate, in predicate order and
/// ascending bitmask.
pub fn enumerate_moded_queries(program: &Program) -> Vec<Query> {
    program
        .predicates()
        .flat_map(|k| (1..1u64 << k.arity).map(move |mask| moded_query(&k.name, ModePattern::from_mask(k.arity, mask))))
        .collect()
}

pub fn enumerate_concrete_queries(program: &Program) -> Vec<Query> {
    program
        .predicates()
        .map(|k| {
            let args = (0..k.arity).map(|i| Term::var(i as u32, &format!("X{}", i + 1))).collect();
            Query::concrete(Atom::new(&k.name, args))
        })
        .collect()
}

/// Reuse of terminating verdicts from input-position subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prune {
    Off,
    /// Only under Algorithm 1.
    On,
    /// Under either algorithm.
    Forced,
}

impl Prune {
    fn active(self, cfg: &Config) -> bool {
        match self {
            Prune::Off => false,
            Prune::On => cfg.algorithm == Algorithm::One,
            Prune::Forced => true,
        }
    }
}

/// Analyzes MQ(P) followed by CQ(P); report order follows the enumeration.
pub fn analyze_all(program: &Program, cfg: &Config, prune: Prune) -> Vec<AnalysisReport> {
    let queries: Vec<Query> =
        enumerate_moded_queries(program).into_iter().chain(enumerate_concrete_queries(program)).collect();
    analyze_queries(program, &queries, cfg, prune)
}

/// Analyzes `queries` in order. With pruning active, a moded query whose input
/// positions include those of an earlier query answered terminating (or most
/// likely so) on the same predicate inherits that answer.
pub fn analyze_queries(program: &Program, queries: &[Query], cfg: &Config, prune: Prune) -> Vec<AnalysisReport> {
    if !prune.active(cfg) {
        return queries.par_iter().map(|q| analyze(program, q, cfg)).collect();
    }
    let mut done: Vec<(&Query, AnalysisReport)> = Vec::with_capacity(queries.len());
    for q in queries {
        let donor = done
            .iter()
            .filter(|(d, _)| {
                d.atom.key() == q.atom.key()
                    && d.is_moded()
                    && d.pattern != q.pattern
                    && d.pattern.is_subset_of(&q.pattern)
            })
            .filter(|(_, r)| r.verdict.is_some_and(Verdict::is_terminating_side))
            .fold(None::<&(&Query, AnalysisReport)>, |best, cur| match best {
                Some(b) if b.1.verdict >= cur.1.verdict => Some(b),
                _ => Some(cur),
            });
        let report = match donor {
            Some((d, r)) => {
                let mut rep = AnalysisReport::blank(q, cfg);
                rep.verdict = r.verdict;
                rep.inherited_from = Some(d.to_string());
                rep
            }
            None => analyze(program, q, cfg),
        };
        done.push((q, report));
    }
    done.into_iter().map(|(_, r)| r).collect()
}
