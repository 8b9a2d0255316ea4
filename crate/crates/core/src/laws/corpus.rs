//! The law corpus text format.
//!
//! ```text
//! # comment
//! SECTION sets VARS SS:POW(EL), TT:POW(EL)
//! union_comm == SS \/ TT = TT \/ SS
//! ```
//!
//! A section header may end with `MAXCARD n` to lower the set cardinality
//! cap for the laws of that section.

use std::collections::BTreeSet;
use std::path::Path;

use super::{Category, Law, LawError};
use crate::eval::Prepared;
use crate::syntax::{expr_to_type, parse_expr, parse_pred};
use crate::typecheck::TypeEnv;
use crate::value::BType;

/// The corpus shipped with the crate.
pub const BUNDLED_CORPUS: &str = include_str!("../../corpus/laws.txt");

/// Name used for the bundled corpus in error messages and reports.
pub const BUNDLED_NAME: &str = "<bundled>";

pub fn bundled_corpus() -> Vec<Law> {
    parse_corpus(BUNDLED_CORPUS, BUNDLED_NAME).expect("bundled corpus is valid")
}

pub fn load_corpus(path: &Path) -> Result<Vec<Law>, LawError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LawError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_corpus(&text, &path.display().to_string())
}

struct Section {
    category: Category,
    vars: Vec<(String, BType)>,
    max_card: Option<usize>,
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn parse_header(rest: &str, line: usize) -> Result<Section, LawError> {
    let bad = |message: String| LawError::Header { line, message };
    let (head, max_card) = match rest.rsplit_once("MAXCARD") {
        Some((h, n)) => {
            let n = n.trim().parse().map_err(|_| bad(format!("bad MAXCARD value {:?}", n.trim())))?;
            (h.trim(), Some(n))
        }
        None => (rest.trim(), None),
    };
    let (cat, vars) = match head.split_once("VARS") {
        Some((c, v)) => (c.trim(), v.trim()),
        None => (head, ""),
    };
    let category: Category = cat.parse().map_err(|_| bad(format!("unknown category {cat:?}")))?;
    let mut decls = Vec::new();
    for d in split_top(vars) {
        let (name, ty) = d.split_once(':').ok_or_else(|| bad(format!("expected name:type, found {d:?}")))?;
        let e = parse_expr(ty.trim()).map_err(|e| bad(format!("type of {}: {e}", name.trim())))?;
        let t = expr_to_type(&e).ok_or_else(|| bad(format!("{:?} is not a type", ty.trim())))?;
        decls.push((name.trim().to_string(), t));
    }
    Ok(Section { category, vars: decls, max_card })
}

/// Parses and type-checks a corpus. `origin` names the source in errors.
pub fn parse_corpus(text: &str, origin: &str) -> Result<Vec<Law>, LawError> {
    let mut laws: Vec<Law> = Vec::new();
    let mut names = BTreeSet::new();
    let mut section: Option<Section> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("SECTION") {
            section = Some(parse_header(rest, line)?);
            continue;
        }
        let (name, body) = trimmed
            .split_once("==")
            .ok_or_else(|| LawError::Header { line, message: "expected `name == predicate`".into() })?;
        let name = name.trim().to_string();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(LawError::Header { line, message: format!("bad law name {name:?}") });
        }
        let sec = section
            .as_ref()
            .ok_or_else(|| LawError::Header { line, message: "law before the first SECTION".into() })?;
        if !names.insert(name.clone()) {
            return Err(LawError::DuplicateLaw { name, line });
        }
        let text = body.trim().to_string();
        let pred = parse_pred(&text).map_err(|e| LawError::Syntax { name: name.clone(), line, message: e.to_string() })?;
        let free = pred.free_vars();
        let vars: Vec<(String, BType)> = sec.vars.iter().filter(|(n, _)| free.contains(n)).cloned().collect();
        let mut env = vars.iter().fold(TypeEnv::new(), |env, (n, t)| env.with_var(n, t.clone()));
        for (_, t) in &sec.vars {
            let mut cs = Vec::new();
            t.carriers(&mut cs);
            for c in cs {
                env.carriers.entry(c).or_default();
            }
        }
        let prep = Prepared::pred(&pred, &env).map_err(|e| LawError::Type { name: name.clone(), line, message: e.to_string() })?;
        laws.push(Law {
            name,
            category: sec.category,
            vars,
            text,
            origin: origin.to_string(),
            line,
            max_card: sec.max_card,
            env,
            prep,
        });
    }
    Ok(laws)
}
