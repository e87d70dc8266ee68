//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it the same closure runs in a plain loop. Either way the output
//! keeps input order, so downstream sums are reproducible.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn par_map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Fallible map; the first error in input order wins.
pub fn try_par_map<I, T, F>(items: &[I], f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync + Send,
{
    par_map(items, f).into_iter().collect()
}

/// Whether this build runs maps on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
