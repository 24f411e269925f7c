//! Internal execution helpers.
//!
//! `ordered_map` evaluates a function over `0..n` and collects the results in
//! index order. With the `parallel` feature (default) the evaluation is
//! data-parallel over a rayon pool; without it, a plain sequential loop.
//! Because results are collected in index order and every reduction in this
//! crate folds them sequentially, outputs are bitwise identical for a fixed
//! input regardless of backend or thread count.

#[cfg(feature = "parallel")]
pub(crate) fn ordered_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn ordered_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..n).map(f).collect()
}
