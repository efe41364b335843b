//! Sequential or data-parallel execution of independent index-keyed jobs.
//!
//! Every job is a pure function of its index, and results are collected in
//! index order, so output never depends on the number of worker threads.

/// How independent jobs (bootstrap replicates, simulation draws) are run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Runs on the current rayon pool. Falls back to sequential when the
    /// crate is built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether jobs will actually run on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Evaluates `job(0..n)` and returns the results in index order.
    pub fn map_indices<T, F>(self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(job).collect();
        }
        (0..n).map(job).collect()
    }
}
