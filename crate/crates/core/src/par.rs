//! Data-parallel helpers. With the `parallel` feature the work runs on a
//! rayon pool sized by the caller; without it, or with one thread, the
//! same closures run sequentially in index order.

/// Number of worker threads to use when the caller does not say.
pub fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_indexed<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads > 1 && len > 1 {
        use rayon::prelude::*;
        return with_pool(threads, || (0..len).into_par_iter().map(&f).collect());
    }
    let _ = threads;
    (0..len).map(f).collect()
}

/// Splits `0..total` into contiguous chunks, maps each chunk and returns
/// the per-chunk results in order.
pub fn map_chunks<T, F>(total: u64, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync + Send,
{
    let chunks = if threads > 1 {
        (threads as u64 * 8).min(total.max(1))
    } else {
        1
    };
    let step = total.div_ceil(chunks).max(1);
    let n_chunks = total.div_ceil(step) as usize;
    map_indexed(n_chunks, threads, |i| {
        let lo = i as u64 * step;
        f(lo..(lo + step).min(total))
    })
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}
