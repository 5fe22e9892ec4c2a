use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynterm::analyzer::{analyze_queries, analyze_with_tree, enumerate_concrete_queries, enumerate_moded_queries};
use dynterm::frontend::{export_dot, parse_program, parse_query, report_line, reports_to_json};
use dynterm::oracle::forest_probe;
use dynterm::{Algorithm, AnalysisReport, Config, Prune, Query};

#[derive(Parser)]
#[command(name = "dynterm", version, about = "Dynamic termination analysis of general logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze queries against a program file.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Program source file.
    file: PathBuf,
    /// Query to analyze; `@Name` marks an input mode. May be repeated.
    #[arg(short = 'q', long = "query", required_unless_present_any = ["all_moded", "all_concrete"])]
    queries: Vec<String>,
    /// Analyze every most general moded query, then the concrete ones.
    #[arg(long)]
    all_moded: bool,
    /// Analyze one all-variable query per predicate.
    #[arg(long)]
    all_concrete: bool,
    /// Repetition number (at least 3).
    #[arg(short = 'r', long, default_value_t = 3)]
    repetition: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    algorithm: u8,
    #[arg(long)]
    no_heuristic1: bool,
    #[arg(long)]
    no_occurs_check: bool,
    #[arg(long, default_value_t = 100_000)]
    max_nodes: usize,
    /// Chain length at which an input variable counts as consumed.
    #[arg(long)]
    cprime_steps: Option<usize>,
    /// Reuse terminating answers for supersets of input positions (Algorithm 1 only).
    #[arg(long)]
    prune: bool,
    /// Like --prune, under either algorithm.
    #[arg(long)]
    prune_force: bool,
    /// Bounded ground-instance search for each moded query: DEPTH,LEN.
    #[arg(long, value_parser = parse_probe)]
    probe: Option<(usize, usize)>,
    /// Write the generalized tree of the (single) query as Graphviz.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print reports as a JSON array.
    #[arg(long)]
    json: bool,
}

fn parse_probe(s: &str) -> Result<(usize, usize), String> {
    let (d, l) = s.split_once(',').ok_or("expected DEPTH,LEN")?;
    let d = d.trim().parse().map_err(|e| format!("bad depth: {e}"))?;
    let l = l.trim().parse().map_err(|e| format!("bad length: {e}"))?;
    Ok((d, l))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
    }
}

fn run_analyze(args: AnalyzeArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return ExitCode::from(1);
        }
    };
    let program = match parse_program(&text) {
        Ok(p) => p,
        Err(errors) => {
            for e in errors {
                eprintln!("{}:{e}", args.file.display());
            }
            return ExitCode::from(1);
        }
    };
    let mut queries: Vec<Query> = Vec::new();
    for q in &args.queries {
        match parse_query(q) {
            Ok(q) => queries.push(q),
            Err(e) => {
                eprintln!("query '{q}': {e}");
                return ExitCode::from(1);
            }
        }
    }
    if args.all_moded {
        queries.extend(enumerate_moded_queries(&program));
    }
    if args.all_moded || args.all_concrete {
        queries.extend(enumerate_concrete_queries(&program));
    }
    let cfg = Config {
        repetition: args.repetition,
        algorithm: if args.algorithm == 1 { Algorithm::One } else { Algorithm::Two },
        heuristic1: !args.no_heuristic1,
        occurs_check: !args.no_occurs_check,
        max_nodes: args.max_nodes,
        cprime_steps: args.cprime_steps,
        ..Config::default()
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let reports: Vec<AnalysisReport> = match &args.trace {
        Some(path) => {
            let [q] = queries.as_slice() else {
                eprintln!("error: --trace needs exactly one query");
                return ExitCode::from(1);
            };
            let (report, tree) = analyze_with_tree(&program, q, &cfg.clone().with_trace(true));
            if let Some(trace) = tree.and_then(|t| t.trace) {
                if let Err(e) = std::fs::write(path, export_dot(&program, &trace)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            vec![report]
        }
        None => {
            let prune = if args.prune_force {
                Prune::Forced
            } else if args.prune {
                Prune::On
            } else {
                Prune::Off
            };
            analyze_queries(&program, &queries, &cfg, prune)
        }
    };
    if args.json {
        println!("{}", reports_to_json(&reports));
    } else {
        for r in &reports {
            println!("{}", report_line(r));
        }
    }
    if let Some((depth, len)) = args.probe {
        for q in queries.iter().filter(|q| q.is_moded()) {
            let s = forest_probe(&program, q, depth, len);
            let longest = s.longest.values().max().copied().unwrap_or(0);
            let line = format!(
                "probe\t{q}\tinstances={}\treached_cap={}\tlongest={longest}\terrors={}",
                s.instances,
                s.reached_cap,
                s.errors.len()
            );
            if args.json {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
        }
    }
    let mut failed = false;
    for r in &reports {
        if let Some(e) = &r.error {
            eprintln!("{}: {}", r.query, e.message);
            failed = true;
        }
    }
    if failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
