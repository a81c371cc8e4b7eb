//! Execution policy for the data-parallel inner loops.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] runs the
//! same code sequentially. Every parallel loop writes disjoint output and
//! performs reductions afterwards in index order, so results do not depend
//! on the policy or the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fewest chunks handed to one task; keeps small slices off the pool.
#[cfg(feature = "parallel")]
const MIN_CHUNKS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Calls `f(k, chunk)` for every `chunk_len`-sized chunk of `data`.
    pub(crate) fn for_each_chunk<F>(self, data: &mut [f64], chunk_len: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Send + Sync,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => data
                .par_chunks_mut(chunk_len)
                .with_min_len(MIN_CHUNKS)
                .enumerate()
                .for_each(|(k, c)| f(k, c)),
            _ => data.chunks_mut(chunk_len).enumerate().for_each(|(k, c)| f(k, c)),
        }
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Send + Sync,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}
