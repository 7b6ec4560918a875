//! Shared thread pool sized by the `OLAB_THREADS` environment variable.
//!
//! Every parallel map in the crate collects into an ordered `Vec` before any
//! reduction, so results do not depend on the number of threads.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::ThreadPool;

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("OLAB_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
    })
}

/// Ordered parallel map over `0..n`.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    pool().install(|| (0..n).into_par_iter().map(f).collect())
}

/// Ordered parallel map over `0..n` stopping at the first error in index order.
pub fn try_map_indices<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indices(n, f).into_iter().collect()
}
