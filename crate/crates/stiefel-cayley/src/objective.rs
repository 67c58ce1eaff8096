//! Objective functions over R^{N x p} and per-run evaluation accounting.

use std::cell::Cell;

use nalgebra::DMatrix;

/// A differentiable cost f: R^{N x p} -> R with its Euclidean gradient.
///
/// Implementations are immutable and shareable; all bookkeeping lives in
/// [`EvalCounters`], which each run owns privately.
pub trait Objective: Sync {
    fn value(&self, u: &DMatrix<f64>) -> f64;
    fn euclid_gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64>;
}

/// Tallies of how many times a run actually evaluated f and its gradient.
/// Cache hits do not count.
#[derive(Debug, Default)]
pub struct EvalCounters {
    value: Cell<u64>,
    gradient: Cell<u64>,
}

impl EvalCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count_value(&self) {
        self.value.set(self.value.get() + 1);
    }

    pub fn count_gradient(&self) {
        self.gradient.set(self.gradient.get() + 1);
    }

    pub fn value_evals(&self) -> u64 {
        self.value.get()
    }

    pub fn gradient_evals(&self) -> u64 {
        self.gradient.get()
    }

    /// Combined evaluation count reported as `nfe`.
    pub fn total(&self) -> u64 {
        self.value.get() + self.gradient.get()
    }
}
