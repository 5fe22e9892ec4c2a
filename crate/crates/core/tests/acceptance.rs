//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; positional arguments select criteria by
//! number (`cargo test --test acceptance -- 2 3`).

mod common;

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use dynterm::analyzer::{analyze_with_tree, enumerate_concrete_queries, enumerate_moded_queries};
use dynterm::engine::{Step, TraceEdge, MAIN_TREE};
use dynterm::model::{is_projection, loops_into, nesting_depth, symbol_string, term_size, Atom, Term, Var, VarId};
use dynterm::oracle::{bounded_search_with, forest_probe_with, instantiate_derivation, SearchLimits};
use dynterm::unify::{apply_subst, mgu, unify_args, InputVarSet, Substitution};
use dynterm::{analyze, analyze_queries, Algorithm, Config, Program, Prune, Query, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock bound for a single analysis, in milliseconds.
const RUN_LIMIT_MS: f64 = 5_000.0;
/// Herbrand depth and derivation cap of the oracle probes.
const PROBE_DEPTH: usize = 3;
const PROBE_CAP: usize = 500;
/// Nesting depth the second argument of P5 must reach before the first cut.
const P5_CUT_DEPTH: usize = 100;
const MGU_PAIRS: usize = 1000;
const LAW_SEED: u64 = 0x1a55;

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, notes: Vec<String>) -> Self {
        Outcome { pass, summary: summary.into(), notes }
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let picked: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 6] = [
        (1, "golden verdict table", golden_table),
        (2, "moded-instance replay of the P0 loop", replay),
        (3, "oracle consistency of terminating and non-terminating verdicts", oracle_consistency),
        (4, "loop-check completeness on the random corpus", completeness),
        (5, "mode monotonicity under Algorithm 1", monotonicity),
        (6, "unit laws: symbol strings, mgu, ancestor lists", unit_laws),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !picked.is_empty() && !picked.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n}: {name} [{}] ({:.1}s)", out.summary, start.elapsed().as_secs_f64());
        for note in &out.notes {
            println!("    {note}");
        }
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn alg_no(a: Algorithm) -> u8 {
    match a {
        Algorithm::One => 1,
        Algorithm::Two => 2,
    }
}

fn cfg(alg: Algorithm, h1: bool) -> Config {
    Config::default().with_algorithm(alg).with_heuristic1(h1)
}

use Verdict::{MostLikelyNonTerminating as Mlnt, MostLikelyTerminating as Mlt, NonTerminating as Nt, Terminating as T};

struct Row {
    program: usize,
    query: Query,
    alg: Algorithm,
    heuristic1: bool,
    expect: Verdict,
}

fn row(program: usize, query: &str, alg: Algorithm, expect: Verdict) -> Row {
    Row { program, query: common::query(query), alg, heuristic1: true, expect }
}

fn golden_rows() -> Vec<Row> {
    use Algorithm::{One, Two};
    let mut rows = vec![
        row(0, "p(@I)", One, Mlt),
        row(0, "p(@I)", Two, T),
        row(1, "p(@I)", One, Mlnt),
        row(1, "p(@I)", Two, Mlnt),
        row(2, "p(@I)", One, T),
        row(2, "p(@I)", Two, T),
        row(2, "q", One, Mlnt),
        row(2, "q", Two, Nt),
        row(3, "append(@I,V2,V3)", One, Mlt),
        row(3, "append(@I,V2,V3)", Two, T),
        row(3, "append(V1,@I,V3)", One, Mlnt),
        row(3, "append(V1,@I,V3)", Two, Nt),
        row(3, "append(V1,V2,@I)", Two, T),
    ];
    let p4 = common::fixture(4);
    for alg in [One, Two] {
        for q in enumerate_moded_queries(&p4) {
            let mask = q.pattern.mask();
            let expect = match &*q.atom.pred {
                "add" if mask == 0b010 => Mlnt,
                "add" => Mlt,
                _ if mask == 0b011 || mask == 0b111 => Mlt,
                _ => Mlnt,
            };
            rows.push(Row { program: 4, query: q, alg, heuristic1: true, expect });
        }
    }
    let p5 = common::p5_queries();
    for alg in [One, Two] {
        rows.push(row(5, &p5[0], alg, Mlnt));
        rows.push(row(5, &p5[1], alg, Mlt));
        rows.push(Row { heuristic1: false, ..row(5, &p5[0], alg, Mlt) });
    }
    rows.push(row(5, &p5[2], Two, Nt));
    rows
}

struct RowResult {
    row: Row,
    got: Option<Verdict>,
    elapsed_ms: f64,
}

fn run_rows() -> Vec<RowResult> {
    let programs: Vec<Program> = (0..=5).map(common::fixture).collect();
    golden_rows()
        .into_iter()
        .map(|row| {
            let r = analyze(&programs[row.program], &row.query, &cfg(row.alg, row.heuristic1));
            RowResult { got: r.verdict, elapsed_ms: r.elapsed_ms, row }
        })
        .collect()
}

fn golden_table() -> Outcome {
    let results = run_rows();
    let mut notes = Vec::new();
    let mut ok = 0;
    for r in &results {
        let slow = r.elapsed_ms >= RUN_LIMIT_MS;
        if r.got == Some(r.row.expect) && !slow {
            ok += 1;
        } else {
            notes.push(format!(
                "P{} {} alg{}{}: expected {}, got {}{}",
                r.row.program,
                r.row.query,
                alg_no(r.row.alg),
                if r.row.heuristic1 { "" } else { " h1-off" },
                r.row.expect.token(),
                r.got.map_or("error", Verdict::token),
                if slow { format!(" after {:.0}ms", r.elapsed_ms) } else { String::new() },
            ));
        }
    }
    let depth_ok = match p5_first_cut_depth() {
        Ok(d) if d >= P5_CUT_DEPTH => true,
        Ok(d) => {
            notes.push(format!("P5 p(@I,0): first cut at second-argument depth {d}, needs {P5_CUT_DEPTH}"));
            false
        }
        Err(e) => {
            notes.push(format!("P5 p(@I,0): {e}"));
            false
        }
    };
    let total = results.len();
    Outcome::new(
        ok == total && depth_ok,
        format!("{ok}/{total} rows, P5 first-cut depth {}", if depth_ok { "ok" } else { "wrong" }),
        notes,
    )
}

/// Nesting depth of the second argument at the first cut of P5 p(@I,0).
fn p5_first_cut_depth() -> Result<usize, String> {
    let p5 = common::fixture(5);
    let q = common::query(&common::p5_queries()[0]);
    let (_, tree) = analyze_with_tree(&p5, &q, &Config::default().with_trace(true));
    let trace = tree.and_then(|t| t.trace).ok_or("no trace")?;
    let cut = trace.nodes.iter().find(|n| !n.skipped.is_empty()).ok_or("no cut")?;
    let sel = cut.goal.selected().ok_or("cut at an empty goal")?;
    Ok(nesting_depth(&sel.literal.atom.args[1]))
}

fn replay() -> Outcome {
    let p0 = common::fixture(0);
    let q = common::query("p(@I)");
    let (_, tree) = analyze_with_tree(&p0, &q, &cfg(Algorithm::One, true).with_trace(true));
    let Some(trace) = tree.and_then(|t| t.trace) else {
        return Outcome::new(false, "no trace", Vec::new());
    };
    let Some(cut) = trace.nodes.iter().find(|n| !n.skipped.is_empty()) else {
        return Outcome::new(false, "no cut node", Vec::new());
    };
    let path = trace.path_to(cut.id);
    let Some(d) = trace.derivation_to(&q, cut.id) else {
        return Outcome::new(false, "loop crosses a negation arc", Vec::new());
    };
    let mut notes = Vec::new();
    let mut pass = path == [0, 2, 4] && d.steps == [1, 1];
    if !pass {
        notes.push(format!("looping derivation {path:?} via {:?}, expected [0, 2, 4] via C_p2 C_p2", d.steps));
    }
    let input = q.input_vars()[0].id;
    let a = Term::constant("a");
    let fa = Term::compound("f", vec![a.clone()]);
    let ffa = Term::compound("f", vec![fa.clone()]);
    let expected: [(&Term, &[usize], &[&str]); 3] =
        [(&a, &[], &["p(a)"]), (&fa, &[1], &["p(f(a))", "p(a)"]), (&ffa, &[1, 1], &["p(f(f(a)))", "p(f(a))", "p(a)"])];
    for (term, steps, goals) in expected {
        let inst = match instantiate_derivation(&p0, &d, &HashMap::from([(input, term.clone())])) {
            Ok(i) => i,
            Err(e) => {
                notes.push(format!("I := {term}: {e}"));
                pass = false;
                continue;
            }
        };
        let shown: Vec<String> = inst.goals.iter().map(|g| g[0].to_string()).collect();
        let names: Vec<String> = inst.steps.iter().map(|&c| p0.clause_name(c)).collect();
        if inst.steps != steps || shown != goals {
            notes.push(format!("I := {term}: got {} via [{}]", shown.join(" => "), names.join(", ")));
            pass = false;
        }
        // The instance is a derivation of the concrete tree.
        let want: Vec<Step> = steps.iter().map(|&c| Step::Clause(c)).collect();
        let mut seen = false;
        let search =
            bounded_search_with(&p0, &inst.query, SearchLimits::new(PROBE_CAP), |s| seen |= s == want.as_slice());
        if search.is_err() || !seen {
            notes.push(format!("I := {term}: replayed steps not found in the concrete tree"));
            pass = false;
        } else {
            notes.push(format!("I := {term}: {} via [{}]", shown.join(" => "), names.join(", ")));
        }
    }
    Outcome::new(pass, "3 instances of N0 -> N2 -> N4", notes)
}

fn oracle_consistency() -> Outcome {
    let programs: Vec<Program> = (0..=5).map(common::fixture).collect();
    let mut probed: BTreeMap<(usize, String), (Query, bool)> = BTreeMap::new();
    for r in run_rows() {
        for v in [Some(r.row.expect), r.got] {
            if let Some(v @ (T | Nt)) = v {
                probed.insert((r.row.program, r.row.query.to_string()), (r.row.query.clone(), v == T));
            }
        }
    }
    let mut notes = Vec::new();
    let mut bad = 0;
    for ((k, name), (q, terminating)) in &probed {
        // A cap hit settles a non-terminating probe; the rest of that tree is not needed.
        let limits = SearchLimits { stop_at_cap: !*terminating, ..SearchLimits::new(PROBE_CAP) };
        let f = forest_probe_with(&programs[*k], q, PROBE_DEPTH, limits);
        let ok = if *terminating { f.all_finite } else { f.reached_cap };
        if !ok {
            bad += 1;
            notes.push(format!(
                "P{k} {name}: {} over {} instances, capped {:?}, incomplete {:?}, errors {:?}",
                if *terminating { "expected no cap hit" } else { "expected a cap hit" },
                f.instances,
                f.capped,
                f.incomplete,
                f.errors
            ));
        }
    }
    let n = probed.len();
    Outcome::new(bad == 0, format!("{}/{n} probes agree, depth {PROBE_DEPTH}, cap {PROBE_CAP}", n - bad), notes)
}

fn all_queries(p: &Program) -> Vec<Query> {
    enumerate_moded_queries(p).into_iter().chain(enumerate_concrete_queries(p)).collect()
}

fn completeness() -> Outcome {
    let corpus = common::random_corpus(common::CORPUS_SEED, common::CORPUS_SIZE);
    let fixtures: Vec<(String, Program)> = (0..=5).map(|k| (format!("P{k}"), common::fixture(k))).collect();
    let mut notes = Vec::new();
    let (mut runs, mut floundered, mut worst) = (0, 0, 0.0f64);
    for (name, p) in fixtures.iter().chain(&corpus) {
        for alg in [Algorithm::One, Algorithm::Two] {
            for r in analyze_queries(p, &all_queries(p), &cfg(alg, true), Prune::Off) {
                runs += 1;
                worst = worst.max(r.elapsed_ms);
                floundered += usize::from(r.floundered);
                let exceeded = r.error.is_some() && !r.floundered;
                if exceeded || r.elapsed_ms >= RUN_LIMIT_MS {
                    notes.push(format!(
                        "{} alg{}: {:?} in {:.0}ms\n{name}",
                        r.query,
                        alg_no(alg),
                        r.error,
                        r.elapsed_ms
                    ));
                }
            }
        }
    }
    Outcome::new(
        notes.is_empty(),
        format!("{runs} runs over P0-P5 + {} programs, {floundered} floundered, slowest {worst:.1}ms", corpus.len()),
        notes,
    )
}

fn monotonicity() -> Outcome {
    let corpus = common::random_corpus(common::CORPUS_SEED, common::CORPUS_SIZE);
    let fixtures: Vec<(String, Program)> = (0..=5).map(|k| (format!("P{k}"), common::fixture(k))).collect();
    let cfg1 = cfg(Algorithm::One, true);
    let (mut prefix_pairs, mut subset_pairs) = (0, 0);
    let mut notes = Vec::new();
    let mut fatal = 0;
    for (name, p) in fixtures.iter().chain(&corpus) {
        let qs = enumerate_moded_queries(p);
        let rs = analyze_queries(p, &qs, &cfg1, Prune::Off);
        for (a, ra) in qs.iter().zip(&rs) {
            for (b, rb) in qs.iter().zip(&rs) {
                if a.atom.key() != b.atom.key() || a.pattern == b.pattern || !a.pattern.is_subset_of(&b.pattern) {
                    continue;
                }
                let prefix = a.pattern.is_prefix() && b.pattern.is_prefix();
                if prefix {
                    prefix_pairs += 1;
                } else {
                    subset_pairs += 1;
                }
                let (Some(va), Some(vb)) = (ra.verdict, rb.verdict) else { continue };
                if va.is_terminating_side() && !vb.is_terminating_side() {
                    let kind = if prefix { "prefix" } else { "subset (reported only)" };
                    notes.push(format!("{kind}: {a} {} but {b} {} in {name}", va.token(), vb.token()));
                    fatal += usize::from(prefix);
                }
            }
        }
    }
    Outcome::new(
        fatal == 0,
        format!("{prefix_pairs} prefix pairs, {subset_pairs} subset pairs, {} violations", notes.len()),
        notes,
    )
}

fn unit_laws() -> Outcome {
    let mut notes = Vec::new();
    let sym = symbol_laws(&mut notes);
    let uni = mgu_laws(&mut notes);
    let anc = ancestor_laws(&mut notes);
    Outcome::new(sym && uni && anc, format!("symbols {sym}, mgu {uni}, ancestors {anc}"), notes)
}

fn x(id: VarId, name: &str) -> Term {
    Term::var(id, name)
}

fn symbol_laws(notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    let a = Term::constant("a");
    let t2 = Term::compound(
        "f",
        vec![x(0, "X"), Term::compound("g", vec![x(0, "X"), Term::compound("f", vec![a.clone(), x(1, "Y")])])],
    );
    let t3 = Term::list(vec![x(0, "X"), a.clone()], None);
    for (t, want) in [(&a, "a"), (&t2, "f 𝒳 g 𝒳 f a 𝒳"), (&t3, "[|] 𝒳 [|] a []")] {
        let got = symbol_string(t).to_string();
        if got != want {
            notes.push(format!("symbol string of {t}: {got}, expected {want}"));
            ok = false;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LAW_SEED);
    let vars = [(0, "X"), (1, "Y"), (2, "Z")];
    for _ in 0..500 {
        let arity = rng.gen_range(0..=2);
        let atom =
            |rng: &mut ChaCha8Rng| Atom::new("p", (0..arity).map(|_| common::random_term(rng, 3, &vars)).collect());
        let (a1, a2, a3) = (atom(&mut rng), atom(&mut rng), atom(&mut rng));
        let (s1, s2, s3) = (symbol_string(&a1), symbol_string(&a2), symbol_string(&a3));
        let laws = [
            ("length = size + 1", s1.len() == term_size(&a1) + 1),
            ("projection is reflexive", is_projection(&s1, &s1)),
            ("loop-into is reflexive", loops_into(&a1, &a1)),
            (
                "projection is transitive",
                !(is_projection(&s1, &s2) && is_projection(&s2, &s3)) || is_projection(&s1, &s3),
            ),
            ("projection never lengthens", !is_projection(&s2, &s1) || s2.len() <= s1.len()),
            ("loop-into needs the predicate", !loops_into(&a1, &Atom::new("q", a2.args.clone()))),
        ];
        for (law, holds) in laws {
            if !holds {
                notes.push(format!("{law} fails on {a1}, {a2}, {a3}"));
                ok = false;
            }
        }
    }
    ok
}

fn assignments(vars: &[Var], pool: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Vec::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(Var, Term)>| {
                pool.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push((v.clone(), t.clone()));
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(Substitution::from_bindings).collect()
}

fn mgu_laws(notes: &mut Vec<String>) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(LAW_SEED + 1);
    let pool = common::ground_pool();
    let vars = [(0, "X"), (1, "Y"), (2, "Z")];
    let mut failures = 0;
    let (mut unifiable, mut general_checks) = (0, 0);
    for _ in 0..MGU_PAIRS {
        let arity = rng.gen_range(1..=2);
        let left: Vec<Term> = (0..arity).map(|_| common::random_term(&mut rng, 3, &vars)).collect();
        let right: Vec<Term> = (0..arity).map(|_| common::random_term(&mut rng, 3, &vars)).collect();
        let l = Atom::new("p", left.clone());
        let r = Atom::new("p", right.clone());
        let mut all_vars: Vec<Var> = l.vars().union(&r.vars()).cloned().collect();
        all_vars.sort_by_key(|v| v.id);
        let theta = unify_args(&left, &right, true).ok();
        if let Some(th) = &theta {
            unifiable += 1;
            let (tl, tr) = (apply_subst(th, &l), apply_subst(th, &r));
            if tl != tr || apply_subst(th, &tl) != tl {
                notes.push(format!("mgu {th} of {l} and {r} is not an idempotent unifier"));
                failures += 1;
            }
        }
        for sigma in assignments(&all_vars, &pool) {
            if apply_subst(&sigma, &l) != apply_subst(&sigma, &r) {
                continue;
            }
            general_checks += 1;
            let general = theta.as_ref().is_some_and(|th| {
                all_vars.iter().all(|v| {
                    apply_subst(&sigma, &apply_subst(th, &Term::Var(v.clone())))
                        == apply_subst(&sigma, &Term::Var(v.clone()))
                })
            });
            if !general {
                notes.push(format!("ground unifier {sigma} of {l} and {r} is not an instance of {theta:?}"));
                failures += 1;
                break;
            }
        }
        if failures > 5 {
            break;
        }
    }
    // Goal-side preference and input closure of the engine's unifier.
    for _ in 0..MGU_PAIRS {
        let goal = Atom::new("p", (0..2).map(|_| common::random_term(&mut rng, 2, &vars)).collect());
        let head_vars = [(10, "U"), (11, "W")];
        let head = Atom::new("p", (0..2).map(|_| common::random_term(&mut rng, 2, &head_vars)).collect());
        let inputs = InputVarSet::from_iter(goal.vars().into_iter().map(|v| v.id).filter(|_| rng.gen_bool(0.5)));
        let Ok((s, out)) = mgu(&goal, &head, &inputs, true) else { continue };
        let sound = apply_subst(&s, &goal) == apply_subst(&s, &head);
        let closed = s
            .bindings()
            .iter()
            .filter(|(v, _)| inputs.contains(v.id))
            .all(|(_, t)| t.vars().iter().all(|w| out.contains(w.id)));
        let goal_side = s.bindings().iter().all(|(v, t)| match t {
            Term::Var(w) => !(v.id < 10 && w.id >= 10),
            _ => true,
        });
        if !(sound && closed && goal_side) {
            notes.push(format!("mgu {s} of {goal} and {head}: sound {sound}, closed {closed}, goal-side {goal_side}"));
            failures += 1;
        }
    }
    notes.push(format!("mgu: {unifiable}/{MGU_PAIRS} pairs unifiable, {general_checks} ground unifiers checked"));
    failures == 0
}

fn ancestor_laws(notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    for (k, q) in [(1, "p(@I)"), (2, "p(@I)"), (2, "q")] {
        let p = common::fixture(k);
        let q = common::query(q);
        for alg in [Algorithm::One, Algorithm::Two] {
            let (_, tree) = analyze_with_tree(&p, &q, &cfg(alg, true).with_trace(true));
            let Some(trace) = tree.and_then(|t| t.trace) else {
                notes.push(format!("P{k} {q}: no trace"));
                ok = false;
                continue;
            };
            let ids =
                |l: &dynterm::engine::GoalLiteral| l.ancestors.to_vec().into_iter().map(|(n, _)| n).collect::<Vec<_>>();
            let mut successes: BTreeMap<u32, usize> = BTreeMap::new();
            for n in &trace.nodes {
                if n.is_success() && n.tree != MAIN_TREE {
                    *successes.entry(n.tree).or_default() += 1;
                }
                let (Some(pid), Some(via)) = (n.parent, &n.via) else { continue };
                let parent = trace.node(pid);
                let lits = &parent.goal.literals;
                let child = &n.goal.literals;
                let expected: Vec<Vec<u32>> = match via {
                    TraceEdge::Resolve { renamed, .. } => {
                        let mut own = ids(&lits[0]);
                        own.push(pid);
                        std::iter::repeat_n(own, renamed.body.len()).chain(lits[1..].iter().map(ids)).collect()
                    }
                    TraceEdge::NegationArc => vec![ids(&lits[0])],
                    TraceEdge::NegationSucceeded => lits[1..].iter().map(ids).collect(),
                };
                let got: Vec<Vec<u32>> = child.iter().map(ids).collect();
                if got != expected {
                    notes.push(format!("P{k} {q} node {}: ancestor ids {got:?}, expected {expected:?}", n.id));
                    ok = false;
                }
            }
            if let Some((t, c)) = successes.iter().find(|(_, c)| **c > 1) {
                notes.push(format!("P{k} {q}: subsidiary tree {t} has {c} success leaves"));
                ok = false;
            }
            if k == 1 {
                // p(I) at the root must be an ancestor of p(f(I)) across the negation arc.
                let crossed = trace.nodes.iter().any(|n| {
                    matches!(n.via, Some(TraceEdge::NegationArc))
                        && n.goal.selected().is_some_and(|l| {
                            l.literal.to_string() == "p(f(I))"
                                && l.ancestors.to_vec().iter().any(|(id, a)| *id == 0 && a.to_string() == "p(I)")
                        })
                });
                if !crossed {
                    notes.push(format!("P1 alg{}: p(I) is not an ancestor of p(f(I))", alg_no(alg)));
                    ok = false;
                }
            }
        }
    }
    ok
}
