//! Ordered data-parallel map used by every per-term loop in the crate.
//!
//! Results always come back in index order, and every reduction downstream
//! is a plain sequential fold over that vector, so the floating-point result
//! does not depend on the number of worker threads.

/// How a batch of independent terms is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Parallel when the `parallel` feature is enabled and the batch is large
    /// enough to amortize the fork/join cost, sequential otherwise.
    #[default]
    Auto,
    Sequential,
    /// Parallel whenever the `parallel` feature is enabled.
    Parallel,
}

/// Batches below this size stay on the calling thread under [`Execution::Auto`].
pub const AUTO_PARALLEL_MIN: usize = 32;

impl Execution {
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    fn use_parallel(self, len: usize) -> bool {
        if !cfg!(feature = "parallel") {
            return false;
        }
        match self {
            Execution::Auto => len >= AUTO_PARALLEL_MIN,
            Execution::Sequential => false,
            Execution::Parallel => len > 1,
        }
    }
}

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_indexed<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.use_parallel(len) {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = exec;
    (0..len).map(f).collect()
}

/// Fallible variant of [`map_indexed`]; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(exec: Execution, len: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(exec, len, f).into_iter().collect()
}
