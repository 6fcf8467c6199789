//! Execution helpers for embarrassingly parallel work: independent policy
//! runs, Monte Carlo seeds, sweep points, and verification instances.
//!
//! With the default `parallel` feature the dispatching helpers fan out over
//! rayon; without it they run sequentially. The `_seq` variants are always
//! sequential and exist so benchmarks can compare both code paths in one
//! build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, parallel when the `parallel` feature is enabled.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(n, f)
    }
}

/// Sequential twin of [`map_indexed`].
pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Explicit parallel variant, available only with the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn map_indexed_par<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Applies `f` to every item of a mutable slice, parallel when enabled.
/// Used to advance policy ensembles between adversary probes.
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().for_each(f);
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().for_each(f);
    }
}
