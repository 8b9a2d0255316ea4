//! Command-line front end for the evaluator and its validation suites.

mod config;

use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bvalid::eval::{check_machine, evaluate, solve, Classification, Env, Prepared, SolveError};
use bvalid::harness::coverage::coverage_report;
use bvalid::harness::generate::{gen_unit_tests, parse_seed, run_test};
use bvalid::harness::{compute_matrix, run_suite_with, Suite, SuiteOptions};
use bvalid::kernel::{EvalContext, MutationId};
use bvalid::laws::{bundled_corpus, check_corpus, load_corpus, CheckOptions};
use bvalid::syntax::{parse_any, parse_machine, parse_pred, print_ast, roundtrip_check, Ast};
use bvalid::typecheck::{crosscheck_typing_with, TypeEnv};
use bvalid::value::BType;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{parse_carrier, parse_ints, Config};

#[derive(Parser, Debug)]
#[command(name = "bvalid", version, about = "Self-validating evaluator for finite B-style set theory")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Carrier size override, e.g. EL=3 (repeatable).
    #[arg(long = "scope", value_name = "CARRIER=N", global = true, value_parser = parse_carrier)]
    scope: Vec<(String, usize)>,
    /// Integer range, e.g. -3:3.
    #[arg(long = "int", value_name = "LO:HI", global = true, value_parser = parse_ints, allow_hyphen_values = true)]
    ints: Option<(i64, i64)>,
    /// Evaluation fuel per predicate.
    #[arg(long, global = true)]
    fuel: Option<u64>,
    /// Largest set enumerated for a variable.
    #[arg(long = "max-card", global = true)]
    max_card: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for law checking; 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Kernel mutation to enable (M1..M5).
    #[arg(long, global = true)]
    mutation: Option<MutationId>,
    /// Output directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Shell command fed the typed print on stdin; nonzero exit fails the check.
    #[arg(long = "external-typecheck", value_name = "CMD", global = true)]
    external_typecheck: Option<String>,
    /// key=value configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an input and show its syntax tree.
    Parse { input: String },
    /// Pretty-print an input.
    Pp { input: String },
    /// Type-check an input and cross-check the typed print.
    Typecheck { input: String },
    /// Classify a predicate; free variables are solved for.
    Eval { pred: String },
    /// List assignments of VARS (comma separated) satisfying a predicate.
    Solve {
        pred: String,
        vars: String,
        /// Stop after this many solutions.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Check the assertions of a machine file.
    CheckMachine { file: PathBuf },
    /// Search for counterexamples to a law corpus (bundled when omitted).
    CheckLaws {
        corpus: Option<PathBuf>,
        /// Report every counterexample, not just the first per law.
        #[arg(long)]
        all_counterexamples: bool,
    },
    /// Check print/parse round-trips of a file or every file in a directory.
    Roundtrip { path: PathBuf },
    /// Generate and run unit tests from a seed such as `union({1}, {2}) == {1,2}`.
    GenTests { seed: String },
    /// Run one suite under a mutation.
    Mutate {
        #[arg(long = "id")]
        id: MutationId,
        suite: Suite,
    },
    /// Run every mutation against every suite.
    Matrix,
    /// Measure kernel branch coverage.
    Coverage {
        /// Suites to run, comma separated.
        #[arg(long, default_value = "unit,generated,laws", value_delimiter = ',')]
        suites: Vec<Suite>,
    },
}

/// Exit status of a command that ran to completion.
enum Status {
    Clean,
    Findings,
}

type Outcome = Result<Status, String>;

fn status(findings: bool) -> Status {
    if findings {
        Status::Findings
    } else {
        Status::Clean
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &cfg) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Findings) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn build_config(f: &Flags) -> Result<Config, String> {
    let base = match &f.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    Ok(base.merge(Config {
        carriers: f.scope.clone(),
        ints: f.ints,
        fuel: f.fuel,
        max_card: f.max_card,
        json: f.json,
        jobs: f.jobs,
        mutation: f.mutation,
        out: f.out.clone(),
        external_typecheck: f.external_typecheck.clone(),
    }))
}

/// `-` reads stdin, an existing file is read, anything else is literal text.
fn read_input(arg: &str) -> Result<String, String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        return Ok(s);
    }
    let p = Path::new(arg);
    if p.is_file() {
        return std::fs::read_to_string(p).map_err(|e| format!("{arg}: {e}"));
    }
    Ok(arg.to_string())
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn sort_name(a: &Ast) -> &'static str {
    match a {
        Ast::Machine(_) => "machine",
        Ast::Pred(_) => "predicate",
        Ast::Expr(_) => "expression",
    }
}

fn run(cmd: Command, cfg: &Config) -> Outcome {
    let scope = cfg.scope();
    match cmd {
        Command::Parse { input } => {
            let ast = parse_any(&read_input(&input)?).map_err(|e| e.to_string())?;
            if cfg.json {
                print_json(&json!({ "sort": sort_name(&ast), "printed": print_ast(&ast), "tree": format!("{ast:?}") }));
            } else {
                println!("{ast:#?}");
            }
            Ok(Status::Clean)
        }
        Command::Pp { input } => {
            let ast = parse_any(&read_input(&input)?).map_err(|e| e.to_string())?;
            println!("{}", print_ast(&ast));
            Ok(Status::Clean)
        }
        Command::Typecheck { input } => {
            let text = read_input(&input)?;
            let rep = crosscheck_typing_with(&text, &TypeEnv::new(), cfg.external_typecheck.as_deref());
            if cfg.json {
                print_json(&serde_json::to_value(&rep).expect("json"));
            } else if rep.pass {
                println!("{}\n== typed cross-check passed ({} nodes)", rep.typed_text, rep.nodes_compared);
            } else {
                println!(
                    "{}\n== typed cross-check failed at {}: {}",
                    rep.typed_text,
                    rep.failed_stage.as_deref().unwrap_or("?"),
                    rep.detail.as_deref().unwrap_or("")
                );
            }
            Ok(status(!rep.pass))
        }
        Command::Eval { pred } => eval(&read_input(&pred)?, cfg),
        Command::Solve { pred, vars, limit } => solve_cmd(&read_input(&pred)?, &vars, limit, cfg),
        Command::CheckMachine { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let m = parse_machine(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            let rep = check_machine(&m, &scope, cfg.mutation, None).map_err(|e| e.to_string())?;
            if cfg.json {
                print_json(&rep.to_json());
            } else {
                print!("{}", rep.to_text());
            }
            Ok(status(rep.findings() > 0))
        }
        Command::CheckLaws { corpus, all_counterexamples } => {
            let laws = match corpus {
                Some(p) => load_corpus(&p).map_err(|e| e.to_string())?,
                None => bundled_corpus(),
            };
            let opts = CheckOptions { mutation: cfg.mutation, coverage: None, all_counterexamples };
            let report = check_corpus(&laws, &scope, cfg.parallelism(), &opts);
            if cfg.json {
                print_json(&report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(status(report.failed().next().is_some() || !report.errors.is_empty()))
        }
        Command::Roundtrip { path } => roundtrip(&path, cfg.json),
        Command::GenTests { seed } => {
            let seed = parse_seed(&seed, &scope)?;
            let tests = gen_unit_tests(&seed, &scope).map_err(|e| e.to_string())?;
            let ctx = EvalContext::new(scope.clone()).with_mutation(cfg.mutation);
            let results: Vec<(String, String, Result<(), String>)> =
                tests.iter().map(|t| (t.name.clone(), t.text.clone(), run_test(t, &ctx))).collect();
            let failed = results.iter().filter(|r| r.2.is_err()).count();
            if cfg.json {
                let items: Vec<_> = results
                    .iter()
                    .map(|(n, t, r)| json!({ "name": n, "test": t, "passed": r.is_ok(), "error": r.as_ref().err() }))
                    .collect();
                print_json(&json!({ "generated": results.len(), "failed": failed, "tests": items }));
            } else {
                for (n, t, r) in &results {
                    match r {
                        Ok(()) => println!("ok    {n}: {t}"),
                        Err(e) => println!("FAIL  {n}: {t}: {e}"),
                    }
                }
                println!("{} tests generated, {} failed", results.len(), failed);
            }
            Ok(status(failed > 0))
        }
        Command::Mutate { id, suite } => {
            let opts = SuiteOptions { scope, coverage: None, parallelism: cfg.parallelism() };
            let r = run_suite_with(suite, Some(id), &opts);
            if cfg.json {
                print_json(&serde_json::to_value(&r).expect("json"));
            } else {
                print!("{}", r.to_text());
            }
            Ok(status(!r.ok()))
        }
        Command::Matrix => {
            let opts = SuiteOptions { scope, coverage: None, parallelism: cfg.parallelism() };
            let m = compute_matrix(&opts);
            let undetected = m.undetected();
            if cfg.json {
                print_json(&json!({ "rows": m.rows, "undetected": undetected }));
            } else {
                print!("{}", m.to_text());
                for id in &undetected {
                    println!("undetected: {id}");
                }
            }
            Ok(status(!undetected.is_empty()))
        }
        Command::Coverage { suites } => {
            let opts = SuiteOptions { scope, coverage: None, parallelism: cfg.parallelism() };
            let report = coverage_report(&suites, &opts);
            if let Some(dir) = &cfg.out {
                for p in report.write_to(dir).map_err(|e| format!("{}: {e}", dir.display()))? {
                    eprintln!("wrote {}", p.display());
                }
            }
            if cfg.json {
                print_json(&report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(status(report.internal_hits > 0))
        }
    }
}

/// Findings for `eval` are the verdicts other than plain true or false.
fn eval(text: &str, cfg: &Config) -> Outcome {
    let pred = parse_pred(text).map_err(|e| e.to_string())?;
    let unknowns: Vec<String> = pred.free_vars().into_iter().collect();
    let prep = Prepared::pred_with_unknowns(&pred, &TypeEnv::new(), &unknowns).map_err(|e| e.to_string())?;
    let ctx = EvalContext::new(prep.scope_for(&cfg.scope())).with_mutation(cfg.mutation);
    let (classification, env) = if unknowns.is_empty() {
        (evaluate(&prep, &Env::new(), &ctx).map_err(|e| e.to_string())?.classification, None)
    } else {
        let vars: Vec<(String, BType)> = unknowns.iter().map(|n| (n.clone(), prep.free_types[n].clone())).collect();
        let mut solver = solve(&prep, &vars, &Env::new(), &ctx).map_err(|e| e.to_string())?;
        match solver.next() {
            None => (Classification::FalseP, None),
            Some(Ok(env)) => (Classification::TrueP, Some(env)),
            Some(Err(SolveError::Internal(e))) => return Err(e),
            Some(Err(e)) => {
                let env = match e {
                    SolveError::Undefined(env) | SolveError::Timeout(env) | SolveError::Bug(env) => env,
                    SolveError::Internal(_) => unreachable!(),
                };
                let c = evaluate(&prep, &env, &ctx).map_err(|e| e.to_string())?.classification;
                (c, Some(env))
            }
        }
    };
    let at = env.as_ref().map(|e| e.render(&ctx.scope));
    if cfg.json {
        print_json(&json!({ "verdict": classification.label(), "classification": classification, "at": at }));
    } else {
        match &at {
            Some(at) => println!("{} at {at}", classification.label()),
            None => println!("{}", classification.label()),
        }
    }
    Ok(status(!matches!(classification, Classification::TrueP | Classification::FalseP)))
}

fn solve_cmd(text: &str, vars: &str, limit: Option<usize>, cfg: &Config) -> Outcome {
    let pred = parse_pred(text).map_err(|e| e.to_string())?;
    let names: Vec<String> =
        vars.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    let prep = Prepared::pred_with_unknowns(&pred, &TypeEnv::new(), &names).map_err(|e| e.to_string())?;
    let ctx = EvalContext::new(prep.scope_for(&cfg.scope())).with_mutation(cfg.mutation);
    let typed: Vec<(String, BType)> = names
        .iter()
        .map(|n| prep.free_types.get(n).cloned().map(|t| (n.clone(), t)).ok_or_else(|| format!("{n} does not occur")))
        .collect::<Result<_, _>>()?;
    let mut solutions = Vec::new();
    let mut problems = Vec::new();
    for r in solve(&prep, &typed, &Env::new(), &ctx).map_err(|e| e.to_string())? {
        match r {
            Ok(env) => {
                solutions.push(env.render(&ctx.scope));
                if limit.is_some_and(|l| solutions.len() >= l) {
                    break;
                }
            }
            Err(SolveError::Internal(e)) => return Err(e),
            Err(e) => problems.push(match e {
                SolveError::Undefined(env) => format!("undefined at {}", env.render(&ctx.scope)),
                SolveError::Timeout(env) => format!("timeout at {}", env.render(&ctx.scope)),
                SolveError::Bug(env) => format!("both true and false at {}", env.render(&ctx.scope)),
                SolveError::Internal(_) => unreachable!(),
            }),
        }
    }
    if cfg.json {
        print_json(&json!({ "solutions": solutions, "problems": problems }));
    } else {
        for s in &solutions {
            println!("{s}");
        }
        for p in &problems {
            println!("warning: {p}");
        }
        println!("{} solutions", solutions.len());
    }
    Ok(status(!problems.is_empty()))
}

/// Texts to round-trip from one file: each law of a corpus, or the file.
fn roundtrip_units(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path.display().to_string();
    if text.lines().any(|l| l.trim_start().starts_with("SECTION")) {
        let laws = load_corpus(path).map_err(|e| e.to_string())?;
        return Ok(laws.into_iter().map(|l| (format!("{name}:{}", l.name), l.text)).collect());
    }
    Ok(vec![(name, text)])
}

fn roundtrip(path: &Path, as_json: bool) -> Outcome {
    let mut files = Vec::new();
    if path.is_dir() {
        collect_files(path, &mut files).map_err(|e| format!("{}: {e}", path.display()))?;
    } else {
        files.push(path.to_path_buf());
    }
    let mut results = Vec::new();
    for f in &files {
        for (name, text) in roundtrip_units(f)? {
            let r = roundtrip_check(&text).map_err(|e| e.to_string()).and_then(|rep| {
                if rep.pass {
                    Ok(())
                } else {
                    Err(rep.divergence.unwrap_or_default())
                }
            });
            results.push((name, r));
        }
    }
    let failed = results.iter().filter(|r| r.1.is_err()).count();
    if as_json {
        let items: Vec<_> =
            results.iter().map(|(n, r)| json!({ "input": n, "passed": r.is_ok(), "error": r.as_ref().err() })).collect();
        print_json(&json!({ "checked": results.len(), "failed": failed, "results": items }));
    } else {
        for (n, r) in &results {
            match r {
                Ok(()) => println!("ok    {n}"),
                Err(e) => println!("FAIL  {n}: {e}"),
            }
        }
        println!("{} inputs, {} failed", results.len(), failed);
    }
    Ok(status(failed > 0))
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_files(&p, out)?;
        } else {
            out.push(p);
        }
    }
    Ok(())
}
