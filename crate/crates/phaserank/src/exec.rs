//! Data-parallel helpers. With the `parallel` feature (default) the loops
//! run on rayon; without it they fall back to sequential iteration. Results
//! are assembled in index order either way, so outputs are identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Whether any index in `0..n` satisfies the predicate.
pub fn any_indexed<F>(n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().any(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).any(f)
    }
}

/// Sum `f(i)` over `0..n` as u64 (order-independent).
pub fn sum_indexed<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).sum()
    }
}
