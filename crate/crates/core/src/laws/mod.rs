//! Exhaustive counterexample search over a corpus of mathematical laws.

mod corpus;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use corpus::{bundled_corpus, load_corpus, parse_corpus, BUNDLED_CORPUS, BUNDLED_NAME};

use crate::eval::{evaluate, Classification, Env, Prepared};
use crate::kernel::{ops, Coverage, EvalContext, EvalError, MutationId};
use crate::syntax::Pred;
use crate::typecheck::TypeEnv;
use crate::value::{BType, Scope, Value};
use crate::Parallelism;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Booleans,
    Arithmetic,
    Sets,
    Relations,
    Functions,
    Sequences,
    IntegerRanges,
    BasicIntegerSets,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::Booleans,
        Category::Arithmetic,
        Category::Sets,
        Category::Relations,
        Category::Functions,
        Category::Sequences,
        Category::IntegerRanges,
        Category::BasicIntegerSets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Booleans => "booleans",
            Category::Arithmetic => "arithmetic",
            Category::Sets => "sets",
            Category::Relations => "relations",
            Category::Functions => "functions",
            Category::Sequences => "sequences",
            Category::IntegerRanges => "integer-ranges",
            Category::BasicIntegerSets => "basic-integer-sets",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Category::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("law {name} (line {line}): syntax error: {message}")]
    Syntax { name: String, line: usize, message: String },
    #[error("law {name} (line {line}): type error: {message}")]
    Type { name: String, line: usize, message: String },
    #[error("law {name} (line {line}) is already defined")]
    DuplicateLaw { name: String, line: usize },
    #[error("law {name}: {size} assignments exceed the enumeration limit {limit}")]
    ScopeOverflow { name: String, size: String, limit: u64 },
    #[error("law {name}: internal error: {message}")]
    Internal { name: String, message: String },
}

/// A named property that must hold for every assignment of its variables.
#[derive(Debug, Clone)]
pub struct Law {
    pub name: String,
    pub category: Category,
    /// Declared variables that occur free in the body, in header order.
    pub vars: Vec<(String, BType)>,
    /// Source text of the body.
    pub text: String,
    pub origin: String,
    pub line: usize,
    /// Section-level cap on enumerated set cardinality.
    pub max_card: Option<usize>,
    env: TypeEnv,
    prep: Prepared,
}

impl Law {
    pub fn body(&self) -> &Pred {
        self.prep.as_pred().expect("law body is a predicate")
    }

    pub fn prepared(&self) -> &Prepared {
        &self.prep
    }

    /// Variables and carriers visible to the body.
    pub fn type_env(&self) -> TypeEnv {
        self.env.clone()
    }

    /// The scope the law is checked in.
    pub fn scope(&self, base: &Scope) -> Scope {
        let mut s = self.prep.scope_for(base);
        if let Some(c) = self.max_card {
            s.max_set_card = s.max_set_card.min(c);
        }
        s
    }

    /// Number of assignments an exhaustive check visits.
    pub fn case_count(&self, base: &Scope) -> u128 {
        let s = self.scope(base);
        self.vars.iter().map(|(_, t)| s.type_size(t)).fold(1u128, u128::saturating_mul)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    NoCounterexample { cases: u64 },
    Counterexample { env: Env, classification: Classification },
    UndefinedAt { env: Env },
    BugAt { env: Env },
    TimeoutAt { env: Env },
}

impl Verdict {
    pub fn is_finding(&self) -> bool {
        !matches!(self, Verdict::NoCounterexample { .. })
    }

    pub fn env(&self) -> Option<&Env> {
        match self {
            Verdict::NoCounterexample { .. } => None,
            Verdict::Counterexample { env, .. }
            | Verdict::UndefinedAt { env }
            | Verdict::BugAt { env }
            | Verdict::TimeoutAt { env } => Some(env),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::NoCounterexample { .. } => "ok",
            Verdict::Counterexample { .. } => "counterexample",
            Verdict::UndefinedAt { .. } => "undefined",
            Verdict::BugAt { .. } => "bug",
            Verdict::TimeoutAt { .. } => "timeout",
        }
    }

    fn from_classification(c: Classification, env: Env) -> Option<Verdict> {
        match c {
            Classification::TrueP => None,
            Classification::FalseP => Some(Verdict::Counterexample { env, classification: c }),
            Classification::NotWellDefined => Some(Verdict::UndefinedAt { env }),
            Classification::BugBothTrueFalse => Some(Verdict::BugAt { env }),
            _ => Some(Verdict::TimeoutAt { env }),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub mutation: Option<MutationId>,
    pub coverage: Option<Arc<Coverage>>,
    /// Keep enumerating after the first finding.
    pub all_counterexamples: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub name: String,
    pub category: Category,
    /// Assignments evaluated.
    pub cases: u64,
    /// First finding, or `NoCounterexample`.
    pub verdict: Verdict,
    /// Every finding, in enumeration order; only filled when all
    /// counterexamples were requested.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub all_findings: Vec<Verdict>,
    /// The first finding's assignment with element names.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
}

/// Checks one law with default options and returns the first finding.
pub fn check_law(law: &Law, scope: &Scope) -> Result<Verdict, LawError> {
    check_law_with(law, scope, &CheckOptions::default()).map(|r| r.verdict)
}

/// Enumerates every assignment of the law's variables, first variable
/// varying fastest, and classifies the body under each.
pub fn check_law_with(law: &Law, base: &Scope, opts: &CheckOptions) -> Result<LawReport, LawError> {
    let scope = law.scope(base);
    let total = law.case_count(base);
    if total > scope.enum_limit as u128 {
        return Err(LawError::ScopeOverflow { name: law.name.clone(), size: total.to_string(), limit: scope.enum_limit });
    }
    let internal = |e: EvalError| LawError::Internal { name: law.name.clone(), message: e.to_string() };
    let mut ctx = EvalContext::new(scope).with_mutation(opts.mutation);
    if let Some(c) = &opts.coverage {
        ctx = ctx.with_coverage(c.clone());
    }
    let mut candidates: Vec<Vec<Value>> = Vec::with_capacity(law.vars.len());
    for (_, t) in &law.vars {
        candidates.push(ops::enum_type(&ctx, t).map_err(internal)?);
    }
    let mut report = LawReport {
        name: law.name.clone(),
        category: law.category,
        cases: 0,
        verdict: Verdict::NoCounterexample { cases: 0 },
        all_findings: Vec::new(),
        at: None,
    };
    let mut first: Option<Verdict> = None;
    let mut idx = vec![0usize; law.vars.len()];
    let mut done = candidates.iter().any(Vec::is_empty);
    while !done {
        let env = Env::from_pairs(law.vars.iter().zip(&idx).zip(&candidates).map(|(((n, _), &i), c)| (n.clone(), c[i].clone())));
        report.cases += 1;
        let ev = evaluate(&law.prep, &env, &ctx).map_err(internal)?;
        if let Some(v) = Verdict::from_classification(ev.classification, env) {
            if opts.all_counterexamples {
                report.all_findings.push(v.clone());
            }
            if first.is_none() {
                first = Some(v);
                if !opts.all_counterexamples {
                    break;
                }
            }
        }
        done = true;
        for (k, i) in idx.iter_mut().enumerate() {
            *i += 1;
            if *i < candidates[k].len() {
                done = false;
                break;
            }
            *i = 0;
        }
    }
    report.verdict = first.unwrap_or(Verdict::NoCounterexample { cases: report.cases });
    report.at = report.verdict.env().map(|e| e.render(&ctx.scope));
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub laws: usize,
    pub cases: u64,
    pub passed: usize,
    pub counterexamples: usize,
    pub undefined: usize,
    pub timeouts: usize,
    pub bugs: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    /// Per-law results in corpus order.
    pub laws: Vec<LawReport>,
    pub errors: Vec<String>,
    pub totals: Totals,
    /// Set when any law produced a bug finding.
    pub bug: bool,
}

impl CorpusReport {
    fn new(results: Vec<Result<LawReport, LawError>>) -> CorpusReport {
        let mut laws = Vec::new();
        let mut errors = Vec::new();
        let mut totals = Totals { laws: results.len(), ..Totals::default() };
        for r in results {
            match r {
                Ok(l) => {
                    totals.cases += l.cases;
                    match l.verdict {
                        Verdict::NoCounterexample { .. } => totals.passed += 1,
                        Verdict::Counterexample { .. } => totals.counterexamples += 1,
                        Verdict::UndefinedAt { .. } => totals.undefined += 1,
                        Verdict::BugAt { .. } => totals.bugs += 1,
                        Verdict::TimeoutAt { .. } => totals.timeouts += 1,
                    }
                    laws.push(l);
                }
                Err(e) => {
                    totals.errors += 1;
                    errors.push(e.to_string());
                }
            }
        }
        let bug = totals.bugs > 0;
        CorpusReport { laws, errors, totals, bug }
    }

    /// Laws that did not pass, plus errors.
    pub fn findings(&self) -> usize {
        self.totals.laws - self.totals.passed
    }

    pub fn failed(&self) -> impl Iterator<Item = &LawReport> {
        self.laws.iter().filter(|l| l.verdict.is_finding())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.laws {
            match &l.verdict {
                Verdict::NoCounterexample { cases } => {
                    out.push_str(&format!("ok              {} ({}, {cases} cases)\n", l.name, l.category));
                }
                v => {
                    out.push_str(&format!(
                        "{:<15} {} ({}): {}\n",
                        v.kind(),
                        l.name,
                        l.category,
                        l.at.as_deref().unwrap_or("")
                    ));
                    if l.all_findings.len() > 1 {
                        out.push_str(&format!("                {} findings in total\n", l.all_findings.len()));
                    }
                }
            }
        }
        for e in &self.errors {
            out.push_str(&format!("error           {e}\n"));
        }
        let t = &self.totals;
        out.push_str(&format!(
            "{} laws, {} cases: {} ok, {} counterexamples, {} undefined, {} timeouts, {} bugs, {} errors\n",
            t.laws, t.cases, t.passed, t.counterexamples, t.undefined, t.timeouts, t.bugs, t.errors
        ));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("corpus report serializes")
    }
}

/// Checks every law. Results are in corpus order whatever the parallelism.
pub fn check_corpus(laws: &[Law], scope: &Scope, parallelism: Parallelism, opts: &CheckOptions) -> CorpusReport {
    let one = |l: &Law| check_law_with(l, scope, opts);
    let results = crate::par_map(laws, parallelism, one);
    CorpusReport::new(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(vars: &str, body: &str) -> Law {
        let text = format!("SECTION sets VARS {vars}\nl == {body}\n");
        parse_corpus(&text, "t").unwrap().remove(0)
    }

    #[test]
    fn pow1_over_three_elements() {
        let l = law("SS:POW(EL)", "POW1(SS) = POW(SS) - {{}}");
        let scope = Scope::default().with_carrier("EL", 3);
        assert_eq!(check_law(&l, &scope).unwrap(), Verdict::NoCounterexample { cases: 8 });
    }

    #[test]
    fn first_counterexample_in_enumeration_order() {
        let l = law("SS:POW(EL), TT:POW(EL)", "SS \\/ TT = SS /\\ TT");
        let r = check_law_with(&l, &Scope::default(), &CheckOptions::default()).unwrap();
        assert!(matches!(r.verdict, Verdict::Counterexample { classification: Classification::FalseP, .. }));
        assert_eq!(r.at.as_deref(), Some("SS={el1}, TT={}"));
        assert_eq!(r.cases, 2);
    }

    #[test]
    fn all_counterexamples_mode() {
        let l = law("SS:POW(EL), TT:POW(EL)", "SS \\/ TT = SS /\\ TT");
        let opts = CheckOptions { all_counterexamples: true, ..CheckOptions::default() };
        let r = check_law_with(&l, &Scope::default(), &opts).unwrap();
        assert_eq!(r.cases, 16);
        // Equal only when SS = TT.
        assert_eq!(r.all_findings.len(), 12);
    }

    #[test]
    fn undefined_and_overflow() {
        let l = law("xx:INTEGER", "1 / xx = 1 / xx");
        assert!(matches!(check_law(&l, &Scope::default()).unwrap(), Verdict::UndefinedAt { .. }));
        let l = law("rr:POW(INTEGER*INTEGER)", "rr = rr");
        let scope = Scope { enum_limit: 1000, ..Scope::default() };
        assert!(matches!(check_law(&l, &scope), Err(LawError::ScopeOverflow { .. })));
    }

    #[test]
    fn report_totals() {
        let text = "SECTION sets VARS SS:POW(EL)\nok1 == SS = SS\nbad == SS /= SS\n";
        let laws = parse_corpus(text, "t").unwrap();
        let r = check_corpus(&laws, &Scope::default(), Parallelism::Sequential, &CheckOptions::default());
        assert_eq!(r.totals.passed, 1);
        assert_eq!(r.totals.counterexamples, 1);
        assert_eq!(r.findings(), 1);
        assert!(r.to_text().contains("counterexample  bad (sets): SS={}"));
    }
}
