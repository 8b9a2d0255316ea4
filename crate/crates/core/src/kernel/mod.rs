//! B data operators over canonical values, instrumented with coverage
//! recording and runtime-selectable fault injection.

pub mod catalog;
pub mod ops;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Pos;
use crate::value::Scope;
pub use catalog::{Branch, BranchInfo, OpId, OpInfo, BRANCHES, OPS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undefined: {reason}")]
    Undef { reason: String, pos: Option<Pos> },
    #[error("timeout: evaluation budget exhausted")]
    Timeout,
    #[error("internal error: {0}")]
    Internal(String),
}

impl EvalError {
    pub fn undef(reason: impl Into<String>) -> Self {
        EvalError::Undef { reason: reason.into(), pos: None }
    }

    /// Attaches a position to an undefinedness error that has none yet.
    pub fn at(self, p: Pos) -> Self {
        match self {
            EvalError::Undef { reason, pos: None } => EvalError::Undef { reason, pos: Some(p) },
            other => other,
        }
    }
}

pub type KResult<T = crate::value::Value> = Result<T, EvalError>;

/// Injectable kernel faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MutationId {
    M1,
    M2,
    M3,
    M4,
    M5,
}

impl MutationId {
    pub const ALL: [MutationId; 5] =
        [MutationId::M1, MutationId::M2, MutationId::M3, MutationId::M4, MutationId::M5];

    pub fn description(self) -> &'static str {
        match self {
            MutationId::M1 => "intersection computes set difference",
            MutationId::M2 => "3*3 yields 10",
            MutationId::M3 => "partial function test checks domain against codomain",
            MutationId::M4 => "type enumeration skips every third value",
            MutationId::M5 => "membership in a singleton set is negated",
        }
    }
}

impl fmt::Display for MutationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mutation {0:?} (expected one of M1..M5)")]
pub struct UnknownMutation(pub String);

impl FromStr for MutationId {
    type Err = UnknownMutation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MutationId::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownMutation(s.to_string()))
    }
}

/// Per-branch hit counters shared by every context of a run.
#[derive(Debug)]
pub struct Coverage {
    hits: Vec<AtomicU64>,
}

impl Default for Coverage {
    fn default() -> Self {
        Coverage { hits: BRANCHES.iter().map(|_| AtomicU64::new(0)).collect() }
    }
}

impl Coverage {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn hit(&self, b: Branch) {
        self.hits[b.index()].fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> Vec<u64> {
        self.hits.iter().map(|h| h.load(Ordering::Relaxed)).collect()
    }

    pub fn count(&self, b: Branch) -> u64 {
        self.hits[b.index()].load(Ordering::Relaxed)
    }
}

/// Which evaluation chain is running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Pos,
    Neg,
}

/// Explicit evaluation state: scope, step budget, mutation flag and coverage
/// sink. One context serves one thread; use [`EvalContext::fork`] for others.
#[derive(Debug)]
pub struct EvalContext {
    pub scope: Scope,
    mutation: Option<MutationId>,
    coverage: Option<Arc<Coverage>>,
    fuel: Cell<u64>,
    forced_timeout: [bool; 2],
}

impl EvalContext {
    pub fn new(scope: Scope) -> Self {
        let fuel = Cell::new(scope.fuel);
        EvalContext { scope, mutation: None, coverage: None, fuel, forced_timeout: [false; 2] }
    }

    pub fn with_mutation(mut self, m: Option<MutationId>) -> Self {
        self.mutation = m;
        self
    }

    pub fn with_coverage(mut self, c: Arc<Coverage>) -> Self {
        self.coverage = Some(c);
        self
    }

    /// A fresh context with the same settings and a full budget.
    pub fn fork(&self) -> Self {
        EvalContext {
            scope: self.scope.clone(),
            mutation: self.mutation,
            coverage: self.coverage.clone(),
            fuel: Cell::new(self.scope.fuel),
            forced_timeout: self.forced_timeout,
        }
    }

    pub fn set_mutation(&mut self, m: Option<MutationId>) {
        self.mutation = m;
    }

    pub fn mutation(&self) -> Option<MutationId> {
        self.mutation
    }

    pub(crate) fn mutated(&self, m: MutationId) -> bool {
        self.mutation == Some(m)
    }

    pub fn coverage(&self) -> Option<&Arc<Coverage>> {
        self.coverage.as_ref()
    }

    /// Test hook: make every run of the given chain report a timeout.
    pub fn force_timeout(&mut self, chain: Polarity) {
        self.forced_timeout[chain as usize] = true;
    }

    pub fn clear_forced_timeouts(&mut self) {
        self.forced_timeout = [false; 2];
    }

    pub fn is_forced_timeout(&self, chain: Polarity) -> bool {
        self.forced_timeout[chain as usize]
    }

    pub fn refuel(&self) {
        self.fuel.set(self.scope.fuel);
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel.get()
    }

    /// Consumes `n` steps of the budget.
    pub fn tick(&self, n: u64) -> KResult<()> {
        let left = self.fuel.get();
        if left < n {
            self.fuel.set(0);
            return Err(EvalError::Timeout);
        }
        self.fuel.set(left - n);
        Ok(())
    }

    #[inline]
    pub fn hit(&self, b: Branch) {
        if let Some(c) = &self.coverage {
            c.hit(b);
        }
    }

    pub(crate) fn undef<T>(&self, b: Branch, reason: impl Into<String>) -> KResult<T> {
        self.hit(b);
        Err(EvalError::undef(reason))
    }

    pub(crate) fn internal<T>(&self, b: Branch, detail: impl fmt::Display) -> KResult<T> {
        self.hit(b);
        let info = b.info();
        Err(EvalError::Internal(format!("{}: {}: {detail}", info.op.name(), info.name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutation_ids_parse() {
        assert_eq!("m3".parse::<MutationId>().unwrap(), MutationId::M3);
        assert!("M9".parse::<MutationId>().is_err());
    }

    #[test]
    fn fuel_runs_out() {
        let ctx = EvalContext::new(Scope { fuel: 3, ..Scope::default() });
        assert!(ctx.tick(2).is_ok());
        assert_eq!(ctx.tick(2), Err(EvalError::Timeout));
        ctx.refuel();
        assert_eq!(ctx.fuel_left(), 3);
    }
}
