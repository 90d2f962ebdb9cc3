//! Fan-out helper. With the `parallel` feature the indexed map runs on
//! rayon when asked to; otherwise it always runs sequentially. Results come
//! back in index order either way, so callers see identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_indexed<T, F>(len: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..len).into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    (0..len).map(f).collect()
}
