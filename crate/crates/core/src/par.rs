//! Deterministic data-parallel helpers; sequential without the `parallel` feature.

/// `(0..len).map(f).collect()`, in index order.
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Sum of `f(i)` over `0..len`, reduced in fixed-size chunks so the result
/// does not depend on scheduling.
pub(crate) fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    const CHUNK: usize = 1024;
    let chunks = len.div_ceil(CHUNK);
    let partial = map_indexed(chunks, |c| {
        let end = ((c + 1) * CHUNK).min(len);
        (c * CHUNK..end).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}
