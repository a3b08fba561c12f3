//! Data-parallelism shim.
//!
//! Hot loops (column assembly, (α,β) class searches, batch identity sweeps)
//! route through [`map_collect`], which uses rayon when the `parallel`
//! feature is enabled and a plain sequential loop otherwise. The sequential
//! body is always compiled — [`map_collect_sequential`] — so benches can
//! compare both paths in one build and the fallback can never rot.
//!
//! Order is preserved by both paths: results come back indexed exactly like
//! the inputs, so callers get deterministic output regardless of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
///
/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_collect_sequential(items, f)
    }
}

/// The sequential fallback, compiled unconditionally (bench baseline).
pub fn map_collect_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map `f` over a range of indices, preserving order.
pub fn map_range<U, F>(range: std::ops::Range<usize>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}
