//! Kernel branch coverage reports.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{run_suite_with, Suite, SuiteOptions};
use crate::kernel::{Coverage, OpId, BRANCHES, OPS};

/// Module an operator is reported under.
pub fn op_module(op: OpId) -> &'static str {
    use OpId::*;
    match op {
        Union | Inter | SetDiff | Product | PowerSet | PowerSet1 | FinSet | FinSet1 | GenUnion | GenInter | Card => {
            "sets"
        }
        Dom | Ran | Inverse | Identity | Compose | Override | DomRestrict | RanRestrict | DomSubtract
        | RanSubtract | Image => "relations",
        Apply | FunctionKind | ArrowSet => "functions",
        Plus | Minus | Times | Div | Mod | Power | Negate | Min | Max | Interval | IntCompare => "arithmetic",
        Size | Concat | First | Last | Front | Tail | Rev | SeqSet => "sequences",
        Member | NonMember | Equal | Distinct | Subset | NonSubset => "predicates",
        BuiltinSet | EnumType => "enumeration",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchCoverage {
    pub name: &'static str,
    pub hits: u64,
    pub internal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpCoverage {
    pub op: &'static str,
    pub module: &'static str,
    /// Normal branches hit at least once.
    pub covered: usize,
    /// Normal branches; internal ones are not counted.
    pub total: usize,
    pub internal_hits: u64,
    pub branches: Vec<BranchCoverage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleCoverage {
    pub module: &'static str,
    pub covered: usize,
    pub total: usize,
    pub internal_hits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub suites: Vec<Suite>,
    pub covered: usize,
    pub total: usize,
    pub internal_hits: u64,
    pub modules: Vec<ModuleCoverage>,
    pub ops: Vec<OpCoverage>,
}

fn percent(covered: usize, total: usize) -> f64 {
    if total == 0 {
        100.0
    } else {
        100.0 * covered as f64 / total as f64
    }
}

impl CoverageReport {
    /// Builds a report from a branch counter snapshot.
    pub fn from_counts(counts: &[u64], suites: &[Suite]) -> Self {
        let ops: Vec<OpCoverage> = OPS
            .iter()
            .map(|op| {
                let branches: Vec<BranchCoverage> = op
                    .branches
                    .iter()
                    .map(|b| {
                        let info = b.info();
                        BranchCoverage { name: info.name, hits: counts[b.index()], internal: info.internal }
                    })
                    .collect();
                let normal = || branches.iter().filter(|b| !b.internal);
                OpCoverage {
                    op: op.name,
                    module: op_module(op.id),
                    covered: normal().filter(|b| b.hits > 0).count(),
                    total: normal().count(),
                    internal_hits: branches.iter().filter(|b| b.internal).map(|b| b.hits).sum(),
                    branches,
                }
            })
            .collect();
        let mut modules: Vec<ModuleCoverage> = Vec::new();
        for o in &ops {
            match modules.iter_mut().find(|m| m.module == o.module) {
                Some(m) => {
                    m.covered += o.covered;
                    m.total += o.total;
                    m.internal_hits += o.internal_hits;
                }
                None => modules.push(ModuleCoverage {
                    module: o.module,
                    covered: o.covered,
                    total: o.total,
                    internal_hits: o.internal_hits,
                }),
            }
        }
        debug_assert_eq!(counts.len(), BRANCHES.len());
        CoverageReport {
            suites: suites.to_vec(),
            covered: ops.iter().map(|o| o.covered).sum(),
            total: ops.iter().map(|o| o.total).sum(),
            internal_hits: ops.iter().map(|o| o.internal_hits).sum(),
            modules,
            ops,
        }
    }

    pub fn percent(&self) -> f64 {
        percent(self.covered, self.total)
    }

    /// Normal branches never reached, as `op/branch`.
    pub fn missed(&self) -> Vec<String> {
        self.ops
            .iter()
            .flat_map(|o| {
                o.branches.iter().filter(|b| !b.internal && b.hits == 0).map(move |b| format!("{}/{}", o.op, b.name))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let suites: Vec<&str> = self.suites.iter().map(|s| s.name()).collect();
        let mut out = format!(
            "kernel branch coverage ({}): {}/{} = {:.1}%, internal hits {}\n",
            suites.join("+"),
            self.covered,
            self.total,
            self.percent(),
            self.internal_hits
        );
        for m in &self.modules {
            let _ = writeln!(
                out,
                "  {:<12} {:>3}/{:<3} {:>6.1}%{}",
                m.module,
                m.covered,
                m.total,
                percent(m.covered, m.total),
                if m.internal_hits > 0 { format!("  internal hits {}", m.internal_hits) } else { String::new() }
            );
        }
        let missed = self.missed();
        if !missed.is_empty() {
            let _ = writeln!(out, "missed: {}", missed.join(", "));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["percent"] = serde_json::json!(self.percent());
        v
    }

    pub fn to_html(&self) -> String {
        let mut out = String::from(
            "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Kernel coverage</title>\n<style>\n\
             body { font-family: sans-serif; }\ntable { border-collapse: collapse; }\n\
             td, th { border: 1px solid #ccc; padding: 2px 8px; }\n\
             .hit { background: #c8f0c8; }\n.miss { background: #f0c8c8; }\n\
             .internal { color: #888; }\n.alarm { background: #f08080; }\n</style></head><body>\n",
        );
        let _ = writeln!(
            out,
            "<h1>Kernel branch coverage</h1>\n<p>{}/{} branches ({:.1}%), internal hits {}</p>",
            self.covered,
            self.total,
            self.percent(),
            self.internal_hits
        );
        out.push_str("<table><tr><th>module</th><th>operator</th><th>branch</th><th>hits</th></tr>\n");
        for o in &self.ops {
            for b in &o.branches {
                let class = match (b.internal, b.hits > 0) {
                    (true, true) => "alarm",
                    (true, false) => "internal",
                    (false, true) => "hit",
                    (false, false) => "miss",
                };
                let _ = writeln!(
                    out,
                    "<tr class=\"{class}\"><td>{}</td><td>{}</td><td>{}{}</td><td>{}</td></tr>",
                    o.module,
                    o.op,
                    b.name,
                    if b.internal { " (internal)" } else { "" },
                    b.hits
                );
            }
        }
        out.push_str("</table>\n</body></html>\n");
        out
    }

    /// Writes `coverage.txt`, `coverage.json` and `coverage.html` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let files = [
            ("coverage.txt", self.to_text()),
            ("coverage.json", serde_json::to_string_pretty(&self.to_json()).expect("json")),
            ("coverage.html", self.to_html()),
        ];
        let mut paths = Vec::new();
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

/// Runs the suites unmutated with a shared counter and reports coverage.
pub fn coverage_report(suites: &[Suite], opts: &SuiteOptions) -> CoverageReport {
    let cov = Coverage::new();
    let opts = SuiteOptions { coverage: Some(cov.clone()), ..opts.clone() };
    for &s in suites {
        run_suite_with(s, None, &opts);
    }
    CoverageReport::from_counts(&cov.snapshot(), suites)
}
