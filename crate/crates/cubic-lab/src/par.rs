//! Thin dispatch layer between rayon data-parallelism and a sequential
//! fallback, selected by the `parallel` cargo feature.
//!
//! Every entry point preserves input order in its output, and callers reduce
//! the returned vectors sequentially, so numeric results are bitwise
//! identical whichever backend is compiled in and however rayon schedules
//! the work.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map a function over items, returning results in input order.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

/// Map a function over items, returning results in input order.
#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Map a function over an index range, returning results in index order.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    map_ordered((0..n).collect(), f)
}

/// Configure the global thread pool size. A no-op in sequential builds or if
/// a pool already exists (rayon only allows one global initialization).
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        if threads > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_ordered_preserves_order() {
        let out = map_ordered((0..1000).collect::<Vec<i64>>(), |x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i as i64) * (i as i64));
        }
    }

    #[test]
    fn map_range_matches_sequential() {
        let out = map_range(257, |i| i as u64 + 7);
        assert_eq!(out.len(), 257);
        assert_eq!(out[0], 7);
        assert_eq!(out[256], 263);
    }
}
