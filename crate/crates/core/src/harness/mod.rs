//! Unit-test generation, mutation matrix and coverage reports.

pub mod coverage;
pub mod generate;
pub mod unit;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use coverage::{coverage_report, CoverageReport};
pub use generate::{default_seeds, gen_unit_tests, SeedFact, TestCase, TestKind};

use crate::eval::check_machine;
use crate::kernel::{Coverage, EvalContext, MutationId};
use crate::laws::{bundled_corpus, check_corpus, CheckOptions};
use crate::syntax::{parse_machine, roundtrip_check};
use crate::typecheck::{crosscheck_typing, TypeEnv};
use crate::value::Scope;
use crate::Parallelism;

/// Machines shipped with the crate, as (file name, text).
pub const BUNDLED_MACHINES: &[(&str, &str)] = &[
    ("colours.mch", include_str!("../../corpus/machines/colours.mch")),
    ("counters.mch", include_str!("../../corpus/machines/counters.mch")),
    ("doubleeval.mch", include_str!("../../corpus/machines/doubleeval.mch")),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("no test generator for operator {0}")]
    UnsupportedOperator(String),
    #[error("mutation {0} is not detected by any suite")]
    UndetectedMutation(MutationId),
    #[error("unknown suite {0:?} (expected unit, generated, laws, roundtrip, crosscheck or machines)")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Unit,
    Generated,
    Laws,
    Roundtrip,
    Crosscheck,
    Machines,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Unit, Suite::Generated, Suite::Laws, Suite::Roundtrip, Suite::Crosscheck, Suite::Machines];

    /// The suites standing in for regression testing.
    pub const REGRESSION: [Suite; 3] = [Suite::Machines, Suite::Roundtrip, Suite::Crosscheck];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unit => "unit",
            Suite::Generated => "generated",
            Suite::Laws => "laws",
            Suite::Roundtrip => "roundtrip",
            Suite::Crosscheck => "crosscheck",
            Suite::Machines => "machines",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub scope: Scope,
    pub coverage: Option<Arc<Coverage>>,
    pub parallelism: Parallelism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub mutation: Option<MutationId>,
    pub passed: usize,
    pub failed: usize,
    /// Up to [`MAX_LISTED_FAILURES`] descriptions.
    pub first_failures: Vec<String>,
}

pub const MAX_LISTED_FAILURES: usize = 5;

impl SuiteResult {
    fn new(suite: Suite, mutation: Option<MutationId>) -> Self {
        SuiteResult { suite, mutation, passed: 0, failed: 0, first_failures: vec![] }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) => {
                self.failed += 1;
                if self.first_failures.len() < MAX_LISTED_FAILURES {
                    self.first_failures.push(msg);
                }
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn to_text(&self) -> String {
        let m = self.mutation.map(|m| format!(" under {m}")).unwrap_or_default();
        let mut out = format!(
            "suite {}{m}: {} passed, {} failed\n",
            self.suite, self.passed, self.failed
        );
        for f in &self.first_failures {
            out.push_str(&format!("  {f}\n"));
        }
        out
    }
}

/// Runs a suite on the default scope.
pub fn run_suite(suite: Suite, mutation: Option<MutationId>) -> SuiteResult {
    run_suite_with(suite, mutation, &SuiteOptions::default())
}

pub fn run_suite_with(suite: Suite, mutation: Option<MutationId>, opts: &SuiteOptions) -> SuiteResult {
    let mut ctx = EvalContext::new(opts.scope.clone()).with_mutation(mutation);
    if let Some(c) = &opts.coverage {
        ctx = ctx.with_coverage(c.clone());
    }
    let mut r = SuiteResult::new(suite, mutation);
    match suite {
        Suite::Unit => {
            for &c in unit::UNIT_CASES {
                r.record(unit::run_case(c, &ctx).map_err(|e| format!("{}: {e}", c.text())));
            }
        }
        Suite::Generated => {
            for t in generate::default_tests(&opts.scope) {
                r.record(generate::run_test(&t, &ctx).map_err(|e| format!("{}: {e}", generate::describe(&t, None))));
            }
        }
        Suite::Laws => {
            let laws = bundled_corpus();
            let check = CheckOptions { mutation, coverage: opts.coverage.clone(), all_counterexamples: false };
            let report = check_corpus(&laws, &opts.scope, opts.parallelism, &check);
            for l in &report.laws {
                r.record(if l.verdict.is_finding() {
                    Err(format!("{}: {} at {}", l.name, l.verdict.kind(), l.at.as_deref().unwrap_or("")))
                } else {
                    Ok(())
                });
            }
            for e in &report.errors {
                r.record(Err(e.clone()));
            }
        }
        Suite::Roundtrip => {
            for l in bundled_corpus() {
                r.record(roundtrip_outcome(&l.text).map_err(|e| format!("law {}: {e}", l.name)));
            }
            for (name, text) in BUNDLED_MACHINES {
                r.record(roundtrip_outcome(text).map_err(|e| format!("{name}: {e}")));
            }
        }
        Suite::Crosscheck => {
            for l in bundled_corpus() {
                r.record(crosscheck_outcome(&l.text, &l.type_env()).map_err(|e| format!("law {}: {e}", l.name)));
            }
            for (name, text) in BUNDLED_MACHINES {
                r.record(crosscheck_outcome(text, &TypeEnv::new()).map_err(|e| format!("{name}: {e}")));
            }
        }
        Suite::Machines => {
            for (name, text) in BUNDLED_MACHINES {
                let outcome = parse_machine(text)
                    .map_err(|e| e.to_string())
                    .and_then(|m| check_machine(&m, &opts.scope, mutation, opts.coverage.clone()).map_err(|e| e.to_string()))
                    .and_then(|rep| {
                        if rep.findings() == 0 {
                            Ok(())
                        } else {
                            Err(rep.to_text().trim_end().replace('\n', " "))
                        }
                    });
                r.record(outcome.map_err(|e| format!("{name}: {e}")));
            }
        }
    }
    r
}

fn roundtrip_outcome(text: &str) -> Result<(), String> {
    let rep = roundtrip_check(text).map_err(|e| e.to_string())?;
    if rep.pass {
        Ok(())
    } else {
        Err(rep.divergence.unwrap_or_default())
    }
}

fn crosscheck_outcome(text: &str, env: &TypeEnv) -> Result<(), String> {
    let rep = crosscheck_typing(text, env);
    if rep.pass {
        Ok(())
    } else {
        Err(format!("{} failed: {}", rep.failed_stage.unwrap_or_default(), rep.detail.unwrap_or_default()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixRow {
    pub mutation: MutationId,
    pub description: String,
    /// Per column, whether the suite passed.
    pub unit: bool,
    pub generated: bool,
    pub regression: bool,
    pub laws: bool,
    #[serde(skip)]
    pub results: Vec<SuiteResult>,
}

impl MatrixRow {
    pub fn detected(&self) -> bool {
        !(self.unit && self.generated && self.regression && self.laws)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationMatrix {
    pub rows: Vec<MatrixRow>,
}

impl MutationMatrix {
    pub fn undetected(&self) -> Vec<MutationId> {
        self.rows.iter().filter(|r| !r.detected()).map(|r| r.mutation).collect()
    }

    pub fn row(&self, m: MutationId) -> Option<&MatrixRow> {
        self.rows.iter().find(|r| r.mutation == m)
    }

    pub fn to_text(&self) -> String {
        let cell = |ok: bool| if ok { "Passed" } else { "Failed" };
        let width = self.rows.iter().map(|r| r.description.len() + 4).max().unwrap_or(5).max(5);
        let mut out = format!(
            "{:<width$} | {:<10} | {:<10} | {:<10} | {:<6}\n",
            "Error", "Unit Tests", "Generated", "Regression", "Laws"
        );
        out.push_str(&format!("{}\n", "-".repeat(width + 48)));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$} | {:<10} | {:<10} | {:<10} | {:<6}\n",
                format!("{} {}", r.mutation, r.description),
                cell(r.unit),
                cell(r.generated),
                cell(r.regression),
                cell(r.laws)
            ));
        }
        out
    }
}

/// Runs every mutation against the unit, generated, regression and law
/// suites, one mutation at a time.
pub fn compute_matrix(opts: &SuiteOptions) -> MutationMatrix {
    let rows = MutationId::ALL
        .into_iter()
        .map(|m| {
            let run = |s: Suite| run_suite_with(s, Some(m), opts);
            let unit = run(Suite::Unit);
            let generated = run(Suite::Generated);
            let regression: Vec<SuiteResult> = Suite::REGRESSION.into_iter().map(run).collect();
            let laws = run(Suite::Laws);
            let mut results = vec![unit, generated];
            results.extend(regression);
            results.push(laws);
            MatrixRow {
                mutation: m,
                description: m.description().to_string(),
                unit: results[0].ok(),
                generated: results[1].ok(),
                regression: results[2..5].iter().all(SuiteResult::ok),
                laws: results[5].ok(),
                results,
            }
        })
        .collect();
    MutationMatrix { rows }
}

/// [`compute_matrix`] that fails when some mutation escapes every suite.
pub fn mutation_matrix(opts: &SuiteOptions) -> Result<MutationMatrix, HarnessError> {
    let m = compute_matrix(opts);
    match m.undetected().first() {
        Some(&id) => Err(HarnessError::UndetectedMutation(id)),
        None => Ok(m),
    }
}
