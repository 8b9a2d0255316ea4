//! A self-validating evaluator for a finite-scope B-style set-theory
//! language.
//!
//! The pipeline is: [`syntax`] parses and prints, [`typecheck`] infers types,
//! [`kernel`] implements the data operators, [`eval`] evaluates predicates
//! with two independent chains, [`laws`] searches for counterexamples to a
//! corpus of mathematical laws and [`harness`] measures how well all of this
//! catches injected kernel faults.

pub mod eval;
pub mod harness;
pub mod kernel;
pub mod laws;
pub mod syntax;
pub mod typecheck;
pub mod value;

use serde::{Deserialize, Serialize};

/// How independent checks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// A pool of the given size; 0 means one thread per core. Without the
    /// `parallel` feature this runs sequentially.
    Threads(usize),
}

impl Parallelism {
    /// `--jobs N` semantics: 1 is sequential, 0 uses every core.
    pub fn from_jobs(n: usize) -> Parallelism {
        if n == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(n)
        }
    }
}

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, R, F>(items: &[T], p: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match p {
        Parallelism::Sequential => items.iter().map(f).collect(),
        Parallelism::Threads(0) => items.par_iter().map(f).collect(),
        Parallelism::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R, F>(items: &[T], _p: Parallelism, f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
