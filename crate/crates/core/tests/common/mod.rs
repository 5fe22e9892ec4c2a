#![allow(dead_code)]

use std::path::PathBuf;

use dynterm::frontend::{parse_program, parse_query};
use dynterm::{Program, Query};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_source(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

/// Parses `p<k>.pl`.
pub fn fixture(k: usize) -> Program {
    parse_program(&fixture_source(&format!("p{k}.pl"))).unwrap_or_else(|e| panic!("p{k}.pl: {e:?}"))
}

pub fn query(text: &str) -> Query {
    parse_query(text).unwrap_or_else(|e| panic!("query {text}: {e}"))
}

pub fn p5_queries() -> Vec<String> {
    fixture_source("p5_queries.txt").lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
}

const PREDS: [&str; 4] = ["p", "q", "r", "s"];
const CONSTS: [&str; 2] = ["a", "b"];
const FUNCS: [(&str, usize); 2] = [("f", 1), ("g", 2)];
const VARS: [&str; 3] = ["X", "Y", "Z"];

/// Shape bounds of generated programs.
pub struct Shape {
    pub max_preds: usize,
    pub max_arity: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    pub max_depth: usize,
    /// Probability that a body literal is negative.
    pub negation: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_preds: 4, max_arity: 2, max_clauses: 6, max_body: 2, max_depth: 2, negation: 0.2 }
    }
}

/// Source text of a random program: up to four predicates of arity at most two,
/// up to two function symbols, up to six clauses with at most two body literals.
pub fn random_source(rng: &mut impl Rng, shape: &Shape) -> String {
    let n_preds = rng.gen_range(1..=shape.max_preds);
    let preds: Vec<(&str, usize)> = PREDS[..n_preds].iter().map(|p| (*p, rng.gen_range(0..=shape.max_arity))).collect();
    let n_funcs = rng.gen_range(0..=FUNCS.len());
    let mut funcs = FUNCS.to_vec();
    funcs.shuffle(rng);
    funcs.truncate(n_funcs);
    let consts = &CONSTS[..rng.gen_range(1..=CONSTS.len())];
    let n_clauses = rng.gen_range(1..=shape.max_clauses);
    let mut out = String::new();
    for _ in 0..n_clauses {
        let (hp, ha) = *preds.choose(rng).unwrap();
        out.push_str(&atom(rng, hp, ha, &funcs, consts, shape.max_depth));
        let body = rng.gen_range(0..=shape.max_body);
        for i in 0..body {
            out.push_str(if i == 0 { " :- " } else { ", " });
            if rng.gen_bool(shape.negation) {
                out.push_str("\\+ ");
            }
            // Bias toward recursion so loops are common.
            let (bp, ba) = if rng.gen_bool(0.5) { (hp, ha) } else { *preds.choose(rng).unwrap() };
            out.push_str(&atom(rng, bp, ba, &funcs, consts, shape.max_depth));
        }
        out.push_str(".\n");
    }
    out
}

fn atom(
    rng: &mut impl Rng,
    pred: &str,
    arity: usize,
    funcs: &[(&str, usize)],
    consts: &[&str],
    depth: usize,
) -> String {
    if arity == 0 {
        return pred.to_string();
    }
    let args: Vec<String> = (0..arity).map(|_| term(rng, funcs, consts, depth)).collect();
    format!("{pred}({})", args.join(", "))
}

fn term(rng: &mut impl Rng, funcs: &[(&str, usize)], consts: &[&str], depth: usize) -> String {
    if depth > 0 && !funcs.is_empty() && rng.gen_bool(0.45) {
        let (f, n) = *funcs.choose(rng).unwrap();
        let args: Vec<String> = (0..n).map(|_| term(rng, funcs, consts, depth - 1)).collect();
        return format!("{f}({})", args.join(", "));
    }
    if rng.gen_bool(0.6) {
        VARS.choose(rng).unwrap().to_string()
    } else {
        consts.choose(rng).unwrap().to_string()
    }
}

/// `count` random programs from a fixed seed.
pub fn random_corpus(seed: u64, count: usize) -> Vec<(String, Program)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::default();
    (0..count)
        .map(|_| {
            let src = random_source(&mut rng, &shape);
            let p = parse_program(&src).unwrap_or_else(|e| panic!("generated source failed to parse: {e:?}\n{src}"));
            (src, p)
        })
        .collect()
}

/// Seed of the random corpus used across the suites.
pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const CORPUS_SIZE: usize = 200;

/// Random term over `a`, `b`, `f/1`, `g/2` and the variables `vars`.
pub fn random_term(rng: &mut impl Rng, depth: usize, vars: &[(u32, &str)]) -> dynterm::model::Term {
    use dynterm::model::Term;
    let roll = rng.gen_range(0..10);
    if depth > 0 && roll < 4 {
        return if rng.gen_bool(0.5) {
            Term::compound("f", vec![random_term(rng, depth - 1, vars)])
        } else {
            Term::compound("g", vec![random_term(rng, depth - 1, vars), random_term(rng, depth - 1, vars)])
        };
    }
    if !vars.is_empty() && roll < 8 {
        let (id, name) = *vars.choose(rng).unwrap();
        return Term::var(id, name);
    }
    Term::constant(if rng.gen_bool(0.5) { "a" } else { "b" })
}

/// Ground terms over `a`, `f/1`, `g/2` up to nesting depth 2.
pub fn ground_pool() -> Vec<dynterm::model::Term> {
    use dynterm::model::{nesting_depth, Term};
    let mut all = vec![Term::constant("a")];
    for d in 1..=2 {
        let below = all.clone();
        for x in &below {
            if nesting_depth(x) == d - 1 {
                all.push(Term::compound("f", vec![x.clone()]));
            }
        }
        for x in &below {
            for y in &below {
                if nesting_depth(x).max(nesting_depth(y)) == d - 1 {
                    all.push(Term::compound("g", vec![x.clone(), y.clone()]));
                }
            }
        }
    }
    all
}
