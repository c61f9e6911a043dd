//! Execution strategy for the data-parallel loops in this crate.
//!
//! Every parallel loop here writes results by index, never through a
//! shared reduction, so `Sequential` and `Parallel` produce bitwise
//! identical output. Without the `parallel` feature, `Parallel` falls back
//! to the sequential path.

use serde::{Deserialize, Serialize};

/// How data-parallel loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Use the ambient rayon pool (see [`with_threads`] to bound it).
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluate `f(0..n)` and collect results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fill `out[i] = f(i)`, splitting the slice into chunks of `chunk` items.
pub fn fill_indexed<F>(exec: Execution, out: &mut [f64], chunk: usize, f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && out.len() > chunk {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk).enumerate().for_each(|(c, block)| {
            let base = c * chunk;
            for (i, slot) in block.iter_mut().enumerate() {
                *slot = f(base + i);
            }
        });
        return;
    }
    let _ = exec;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

/// Run `op` inside a dedicated pool of `threads` workers. With `threads`
/// of `None` (or without the `parallel` feature) `op` runs on the caller.
pub fn with_threads<R, F>(threads: Option<usize>, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            return pool.install(op);
        }
    }
    let _ = threads;
    op()
}
