//! The acceptance criteria, one reported line each.

use std::time::{Duration, Instant};

use bvalid::eval::{
    check_machine, classify, eval_expr, evaluate, solve, Classification, Env, Outcome, Prepared, SolveError,
};
use bvalid::harness::coverage::coverage_report;
use bvalid::harness::{compute_matrix, Suite, SuiteOptions, BUNDLED_MACHINES};
use bvalid::kernel::{Coverage, EvalContext, MutationId, Polarity};
use bvalid::laws::{bundled_corpus, check_corpus, check_law_with, Category, CheckOptions, Verdict};
use bvalid::syntax::{parse_expr, parse_machine, parse_pred, print_expr, print_pred, roundtrip_check, Child};
use bvalid::typecheck::{crosscheck_typing, TypeEnv};
use bvalid::value::{BType, Scope, Value};
use bvalid::Parallelism;

mod common;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn general_union_example() -> Check {
    let start = Instant::now();
    let e = parse_expr("union({{0,5,2,4},{2,4,5},{2,1,7,5}})").map_err(|e| e.to_string())?;
    let prep = Prepared::expr(&e, &TypeEnv::new()).map_err(|e| e.to_string())?;
    let v = eval_expr(&prep, &Env::new(), &EvalContext::new(Scope::default())).map_err(|e| e.to_string())?;
    ensure(v == Value::int_set([0, 1, 2, 4, 5, 7]), format!("got {v}"))?;
    ensure(start.elapsed() < Duration::from_secs(1), "slower than 1s")?;
    Ok(format!("{v}"))
}

fn law_corpus_baseline() -> Check {
    let laws = bundled_corpus();
    ensure(laws.len() >= 60, format!("only {} laws", laws.len()))?;
    for c in Category::ALL {
        ensure(laws.iter().any(|l| l.category == c), format!("no {c} laws"))?;
    }
    let cov = Coverage::new();
    let opts = CheckOptions { coverage: Some(cov.clone()), ..CheckOptions::default() };
    let start = Instant::now();
    let report = check_corpus(&laws, &Scope::default(), Parallelism::Sequential, &opts);
    let t = &report.totals;
    ensure(t.counterexamples == 0 && t.bugs == 0 && t.errors == 0, report.to_text())?;
    let internal: u64 = bvalid::kernel::BRANCHES
        .iter()
        .zip(cov.snapshot())
        .filter(|(b, _)| b.internal)
        .map(|(_, n)| n)
        .sum();
    ensure(internal == 0, format!("{internal} internal branch hits"))?;
    ensure(start.elapsed() < Duration::from_secs(300), "slower than 5 minutes")?;
    Ok(format!("{} laws, {} cases, {:.1?} single-threaded", t.laws, t.cases, start.elapsed()))
}

fn double_evaluation_machine() -> Check {
    let (_, text) = BUNDLED_MACHINES.iter().find(|(n, _)| *n == "doubleeval.mch").ok_or("machine missing")?;
    let m = parse_machine(text).map_err(|e| e.to_string())?;
    let verdicts = |mutation| -> Result<Vec<(String, String)>, String> {
        let r = check_machine(&m, &Scope::default(), mutation, None).map_err(|e| e.to_string())?;
        Ok(r.assertions.into_iter().map(|a| (a.assertion, a.verdict)).collect())
    };
    let pair = |a: &str, v: &str| (a.to_string(), v.to_string());
    let mutated = verdicts(Some(MutationId::M5))?;
    ensure(
        mutated == [pair("iv : {aa}", "unknown"), pair("iv /: {bb}", "both_true_false")],
        format!("under M5: {mutated:?}"),
    )?;
    let clean = verdicts(None)?;
    ensure(clean == [pair("iv : {aa}", "true"), pair("iv /: {bb}", "true")], format!("unmutated: {clean:?}"))?;
    Ok("iv /: {bb} == both_true_false, iv : {aa} == unknown".into())
}

fn double_evaluation_law() -> Check {
    let laws = bundled_corpus();
    let law = laws.iter().find(|l| l.text == "{xx | xx : SS or xx : TT} = SS \\/ TT").ok_or("law missing")?;
    let opts = CheckOptions { mutation: Some(MutationId::M5), ..CheckOptions::default() };
    let report = check_law_with(law, &Scope::default(), &opts).map_err(|e| e.to_string())?;
    let Verdict::Counterexample { env, .. } = &report.verdict else {
        return Err(format!("verdict {:?}", report.verdict));
    };
    let scope = law.scope(&Scope::default());
    let ss = env.get("SS").and_then(Value::as_set).ok_or("SS unbound")?;
    let tt = env.get("TT").and_then(Value::as_set).ok_or("TT unbound")?;
    ensure(ss.len() == 1 && tt.is_empty(), format!("first counterexample {}", env.render(&scope)))?;
    let ctx = EvalContext::new(scope.clone()).with_mutation(Some(MutationId::M5));
    let again = evaluate(law.prepared(), env, &ctx).map_err(|e| e.to_string())?.classification;
    ensure(again == Classification::FalseP, format!("re-classified {again:?}"))?;
    Ok(env.render(&scope))
}

fn mutation_matrix() -> Check {
    let opts = SuiteOptions { parallelism: Parallelism::Threads(0), ..SuiteOptions::default() };
    let m = compute_matrix(&opts);
    let row = |id| m.row(id).ok_or(format!("no row for {id}"));
    let laws: Vec<bool> =
        [MutationId::M1, MutationId::M2, MutationId::M3, MutationId::M4].iter().map(|&id| row(id).map(|r| r.laws)).collect::<Result<_, _>>()?;
    ensure(laws == [false, false, false, true], format!("laws column {laws:?}\n{}", m.to_text()))?;
    ensure(!row(MutationId::M2)?.unit, "unit tests miss M2")?;
    ensure(!row(MutationId::M4)?.unit, "unit tests miss M4")?;
    ensure(!row(MutationId::M5)?.laws, "laws miss M5")?;
    ensure(m.undetected().is_empty(), format!("undetected {:?}", m.undetected()))?;
    Ok("laws column Failed, Failed, Failed, Passed; every mutation detected".into())
}

fn nine_row_table() -> Check {
    use Outcome::*;
    let fail = || Fail { pos: None, reason: String::new() };
    let table = [
        (True, True, "bug: both true and false"),
        (True, False, "true"),
        (False, True, "false"),
        (False, False, "unknown / not well-defined"),
        (True, Timeout, "probably true"),
        (False, Timeout, "false or undefined"),
        (Timeout, True, "probably false"),
        (Timeout, False, "true or undefined"),
        (Timeout, Timeout, "unknown"),
    ];
    for (p, n, label) in &table {
        let got = classify(p, n).label();
        ensure(got == *label, format!("({p:?}, {n:?}) gave {got}"))?;
    }
    ensure(classify(&fail(), &True) == Classification::FalseP, "failed chain is not false")?;

    // The same table through real evaluations, timeouts forced by the hook.
    let env = TypeEnv::new().with_carrier("ID", &["aa".into(), "bb".into()]);
    let run = |src: &str, m: Option<MutationId>, forced: &[Polarity]| -> Result<Classification, String> {
        let prep = Prepared::pred(&parse_pred(src).map_err(|e| e.to_string())?, &env).map_err(|e| e.to_string())?;
        let mut ctx = EvalContext::new(prep.scope_for(&Scope::default())).with_mutation(m);
        for &c in forced {
            ctx.force_timeout(c);
        }
        Ok(evaluate(&prep, &Env::new(), &ctx).map_err(|e| e.to_string())?.classification)
    };
    use Classification::*;
    use Polarity::{Neg, Pos};
    let cases: [(&str, Option<MutationId>, &[Polarity], Classification); 9] = [
        ("aa /: {bb}", Some(MutationId::M5), &[], BugBothTrueFalse),
        ("1 = 1", None, &[], TrueP),
        ("1 = 2", None, &[], FalseP),
        ("1 / 0 = 1", None, &[], NotWellDefined),
        ("1 = 1", None, &[Neg], ProbablyTrue),
        ("1 = 2", None, &[Neg], FalseOrUndefined),
        ("1 = 2", None, &[Pos], ProbablyFalse),
        ("1 = 1", None, &[Pos], TrueOrUndefined),
        ("1 = 1", None, &[Pos, Neg], Unknown),
    ];
    for (src, m, forced, want) in cases {
        let got = run(src, m, forced)?;
        ensure(got == want, format!("{src} with {forced:?}: {got:?}"))?;
    }
    Ok("9 of 9 rows".into())
}

fn round_trips() -> Check {
    let mut inputs: Vec<(String, String)> = bundled_corpus().into_iter().map(|l| (l.name, l.text)).collect();
    inputs.extend(BUNDLED_MACHINES.iter().map(|(n, t)| (n.to_string(), t.to_string())));
    for (name, text) in &inputs {
        let r = roundtrip_check(text).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.pass, format!("{name}: {:?}", r.divergence))?;
    }
    let mut g = common::Gen::new(0x5eed);
    for i in 0..1000 {
        if i % 2 == 0 {
            let p = g.pred(6);
            ensure(common::depth_of(Child::Pred(&p)) <= 6, "tree too deep")?;
            let text = print_pred(&p);
            ensure(parse_pred(&text).ok() == Some(p), format!("random predicate {text}"))?;
        } else {
            let e = g.expr(6);
            ensure(common::depth_of(Child::Expr(&e)) <= 6, "tree too deep")?;
            let text = print_expr(&e);
            ensure(parse_expr(&text).ok() == Some(e), format!("random expression {text}"))?;
        }
    }
    Ok(format!("{} corpus inputs, 1000 random trees", inputs.len()))
}

fn typed_crosscheck() -> Check {
    let laws = bundled_corpus();
    let mut n = 0;
    for l in &laws {
        let r = crosscheck_typing(&l.text, &l.type_env());
        ensure(r.applicable && r.pass, format!("{}: {:?} {:?}", l.name, r.failed_stage, r.detail))?;
        n += 1;
    }
    for (name, text) in BUNDLED_MACHINES {
        let r = crosscheck_typing(text, &TypeEnv::new());
        ensure(r.applicable && r.pass, format!("{name}: {:?} {:?}", r.failed_stage, r.detail))?;
        n += 1;
    }
    Ok(format!("{n} inputs"))
}

fn kernel_oracle() -> Check {
    let start = Instant::now();
    let bad = common::oracle::all_discrepancies();
    ensure(bad.is_empty(), format!("{} discrepancies, first: {}", bad.len(), bad.first().cloned().unwrap_or_default()))?;
    ensure(start.elapsed() < Duration::from_secs(120), "slower than 2 minutes")?;
    Ok(format!("0 discrepancies in {:.1?}", start.elapsed()))
}

fn coverage() -> Check {
    let opts = SuiteOptions { parallelism: Parallelism::Threads(0), ..SuiteOptions::default() };
    let r = coverage_report(&[Suite::Unit, Suite::Generated, Suite::Laws], &opts);
    ensure(r.percent() >= 90.0, format!("{:.1}% covered, missed {:?}", r.percent(), r.missed()))?;
    ensure(r.internal_hits == 0, format!("{} internal hits", r.internal_hits))?;
    Ok(format!("{}/{} branches ({:.1}%), 0 internal hits", r.covered, r.total, r.percent()))
}

fn undefinedness() -> Check {
    let pred = parse_pred("x = 2/y & y = x-x").map_err(|e| e.to_string())?;
    let names = ["x".to_string(), "y".to_string()];
    let prep = Prepared::pred_with_unknowns(&pred, &TypeEnv::new(), &names).map_err(|e| e.to_string())?;
    let ctx = EvalContext::new(Scope::default());
    let vars: Vec<(String, BType)> = names.iter().map(|n| (n.clone(), BType::Int)).collect();
    let mut solver = solve(&prep, &vars, &Env::new(), &ctx).map_err(|e| e.to_string())?;
    let env = match solver.next() {
        Some(Err(SolveError::Undefined(env))) => env,
        other => return Err(format!("solver returned {other:?}")),
    };
    let c = evaluate(&prep, &env, &ctx).map_err(|e| e.to_string())?.classification;
    ensure(c == Classification::NotWellDefined, format!("classified {c:?}"))?;
    let rest: Vec<_> = solver.collect();
    ensure(rest.iter().all(|r| matches!(r, Err(SolveError::Undefined(_)))), "some binding was not undefined")?;
    Ok(format!("{} at {}", c.label(), env.render(&ctx.scope)))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("general union example", general_union_example),
        ("law corpus baseline", law_corpus_baseline),
        ("double evaluation machine", double_evaluation_machine),
        ("double evaluation law counterexample", double_evaluation_law),
        ("mutation matrix", mutation_matrix),
        ("nine-row classification table", nine_row_table),
        ("print/parse round-trip", round_trips),
        ("typed cross-check", typed_crosscheck),
        ("kernel against oracle", kernel_oracle),
        ("kernel branch coverage", coverage),
        ("undefined division", undefinedness),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
