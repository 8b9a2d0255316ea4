//! Enumerating satisfying assignments.

use serde::Serialize;
use thiserror::Error;

use super::{evaluate_node, Classification, Env, Prepared};
use crate::syntax::Pred;
use crate::kernel::{ops, EvalContext, EvalError};
use crate::value::{BType, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum SolveError {
    #[error("predicate is undefined at {0:?}")]
    Undefined(Env),
    #[error("evaluation timed out at {0:?}")]
    Timeout(Env),
    #[error("both chains succeeded at {0:?}")]
    Bug(Env),
    #[error("{0}")]
    Internal(String),
}

/// Streams the assignments of `vars` that classify as true, in canonical
/// order with the first variable varying slowest. Undefined, timed-out and
/// contradictory assignments are reported as errors and enumeration
/// continues.
pub struct Solver<'a> {
    prep: &'a Prepared,
    pred: &'a Pred,
    ctx: &'a EvalContext,
    base: Env,
    names: Vec<String>,
    candidates: Vec<Vec<Value>>,
    odometer: Vec<usize>,
    exhausted: bool,
    pub checked: u64,
}

pub fn solve<'a>(
    prep: &'a Prepared,
    vars: &[(String, BType)],
    base: &Env,
    ctx: &'a EvalContext,
) -> Result<Solver<'a>, EvalError> {
    let pred = prep.as_pred().ok_or_else(|| EvalError::Internal("not a predicate".into()))?;
    solve_node(prep, pred, vars, base, ctx)
}

/// Solves a predicate node owned by `prep`.
pub fn solve_node<'a>(
    prep: &'a Prepared,
    pred: &'a Pred,
    vars: &[(String, BType)],
    base: &Env,
    ctx: &'a EvalContext,
) -> Result<Solver<'a>, EvalError> {
    let mut candidates = Vec::with_capacity(vars.len());
    for (_, t) in vars {
        candidates.push(ops::enum_type(ctx, t)?);
    }
    let exhausted = candidates.iter().any(Vec::is_empty);
    Ok(Solver {
        prep,
        pred,
        ctx,
        base: base.clone(),
        names: vars.iter().map(|(n, _)| n.clone()).collect(),
        odometer: vec![0; vars.len()],
        candidates,
        exhausted,
        checked: 0,
    })
}

impl Solver<'_> {
    fn current(&self) -> Env {
        let mut env = self.base.clone();
        for (i, n) in self.names.iter().enumerate() {
            env.bind(n, self.candidates[i][self.odometer[i]].clone());
        }
        env
    }

    fn advance(&mut self) {
        for i in (0..self.odometer.len()).rev() {
            self.odometer[i] += 1;
            if self.odometer[i] < self.candidates[i].len() {
                return;
            }
            self.odometer[i] = 0;
        }
        self.exhausted = true;
    }
}

impl Iterator for Solver<'_> {
    type Item = Result<Env, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.exhausted {
            let env = self.current();
            self.advance();
            self.checked += 1;
            let ev = match evaluate_node(self.prep, self.pred, &env, self.ctx) {
                Ok(ev) => ev,
                Err(e) => return Some(Err(SolveError::Internal(e.to_string()))),
            };
            match ev.classification {
                Classification::TrueP => return Some(Ok(env)),
                Classification::FalseP => {}
                Classification::NotWellDefined => return Some(Err(SolveError::Undefined(env))),
                Classification::BugBothTrueFalse => return Some(Err(SolveError::Bug(env))),
                _ => return Some(Err(SolveError::Timeout(env))),
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MutationId;
    use crate::syntax::parse_pred;
    use crate::typecheck::TypeEnv;
    use crate::value::Scope;

    fn solutions(src: &str, vars: &[(&str, BType)], env: &TypeEnv, m: Option<MutationId>) -> Vec<Result<Env, SolveError>> {
        let names: Vec<String> = vars.iter().map(|(n, _)| n.to_string()).collect();
        let prep = Prepared::pred_with_unknowns(&parse_pred(src).unwrap(), env, &names).unwrap();
        let ctx = EvalContext::new(prep.scope_for(&Scope::default())).with_mutation(m);
        let vars: Vec<(String, BType)> = vars.iter().map(|(n, t)| (n.to_string(), t.clone())).collect();
        solve(&prep, &vars, &Env::new(), &ctx).unwrap().collect()
    }

    #[test]
    fn machine_properties() {
        let env = TypeEnv::new().with_carrier("ID", &["aa".into(), "bb".into()]);
        let s = solutions("iv : ID & iv /= bb", &[("iv", BType::Enum("ID".into()))], &env, None);
        assert_eq!(s, vec![Ok(Env::from_pairs([("iv".to_string(), Value::elem("ID", 0))]))]);
    }

    #[test]
    fn integer_square() {
        let s = solutions("x : 1..3 & x*x = 4", &[("x", BType::Int)], &TypeEnv::new(), None);
        assert_eq!(s, vec![Ok(Env::from_pairs([("x".to_string(), Value::int(2))]))]);
        assert!(solutions("x < x", &[("x", BType::Int)], &TypeEnv::new(), None).is_empty());
    }

    #[test]
    fn skipped_values_lose_solutions() {
        let s = solutions("x : 1..3 & x*x = 4", &[("x", BType::Int)], &TypeEnv::new(), Some(MutationId::M4));
        assert!(s.is_empty());
    }

    #[test]
    fn undefined_assignments_are_reported() {
        let vars = [("x", BType::Int), ("y", BType::Int)];
        let s = solutions("x = 2/y & y = x-x", &vars, &TypeEnv::new(), None);
        assert!(!s.is_empty());
        assert!(s.iter().all(|r| matches!(r, Err(SolveError::Undefined(env)) if env.get("y") == Some(&Value::int(0)))));
    }
}
