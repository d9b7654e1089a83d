//! Data-parallel helpers for workloads made of many independent solves or
//! evaluations. With the `parallel` feature they run on the rayon pool;
//! without it they fall back to a plain loop. Output order always follows
//! input order.

use crate::graph::MarkedGraph;
use crate::solver::{solve_with, SearchStats, Solution, SolveError, SolverConfig};

pub type SolveResult = Result<(Solution, SearchStats), SolveError>;

/// `items.map(f)`, in parallel when the `parallel` feature is enabled.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map(items, f)
    }
}

/// Sequential `items.map(f)`, available regardless of features.
pub fn seq_map<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

pub fn solve_batch(graphs: &[MarkedGraph], config: &SolverConfig) -> Vec<SolveResult> {
    par_map(graphs, |g| solve_with(g, config))
}

pub fn solve_batch_sequential(graphs: &[MarkedGraph], config: &SolverConfig) -> Vec<SolveResult> {
    seq_map(graphs, |g| solve_with(g, config))
}

/// Whether [`par_map`] uses worker threads in this build.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Runs `f` with [`par_map`] limited to `jobs` worker threads. `None` keeps
/// the global pool; without the `parallel` feature this just calls `f`.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        return rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f);
    }
    let _ = jobs;
    f()
}
