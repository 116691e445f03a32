//! Data-parallel map used by the Monte Carlo estimators and sweeps.
//!
//! With the `parallel` feature (default) work is spread over the rayon
//! pool; without it, or with [`Execution::Sequential`], the same closure
//! runs in a plain loop. Results are always returned in index order, so
//! both paths produce bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluate `f(0), …, f(n-1)`.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }
}

/// Samples per Monte Carlo chunk. Fixed, because chunk `k` owns RNG
/// stream `k`: changing it changes the sample sequence.
pub const MC_CHUNK: usize = 1 << 14;

/// Split `n` samples into `(chunk_index, len)` pieces of [`MC_CHUNK`].
pub fn chunks(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(MC_CHUNK)).map(|k| (k as u64, MC_CHUNK.min(n - k * MC_CHUNK))).collect()
}
