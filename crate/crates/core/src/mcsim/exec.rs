use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent work items are scheduled. Results never depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the current rayon pool. Falls back to sequential when the crate
    /// is built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `0..n` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}

/// Trials per work item. Fixed, so batch boundaries and per-batch partial
/// sums never depend on the thread count.
pub(crate) const BATCH: u64 = 1024;

pub(crate) fn batches(n_trials: u64) -> impl Fn(usize) -> Range<u64> {
    move |b| {
        let start = b as u64 * BATCH;
        start..(start + BATCH).min(n_trials)
    }
}

pub(crate) fn batch_count(n_trials: u64) -> usize {
    n_trials.div_ceil(BATCH) as usize
}
