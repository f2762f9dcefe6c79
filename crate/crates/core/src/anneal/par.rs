//! Candidate filtering, parallel when the `parallel` feature is on and the
//! model is large enough to amortize the fork/join.

use std::ops::Range;

/// Below this many variables evaluation always stays on the calling thread.
pub const PARALLEL_MIN_DIMENSION: usize = 16_384;

const CHUNK: usize = 4_096;

/// Runs `scan` over `0..n`, split into contiguous ranges, and collects what
/// it pushes into `out`. `scan` must push indices of its range in increasing
/// order; `out` is then in increasing order regardless of the split. Returns
/// the minimum of the values `scan` returns.
#[cfg(feature = "parallel")]
pub(crate) fn collect_ranges<F>(n: usize, scan: F, out: &mut Vec<usize>) -> f64
where
    F: Fn(Range<usize>, &mut Vec<usize>) -> f64 + Sync,
{
    use rayon::prelude::*;
    out.clear();
    if n < PARALLEL_MIN_DIMENSION || rayon::current_num_threads() < 2 {
        return scan(0..n, out);
    }
    let parts: Vec<(Vec<usize>, f64)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut part = Vec::new();
            let low = scan(c * CHUNK..((c + 1) * CHUNK).min(n), &mut part);
            (part, low)
        })
        .collect();
    let mut low = f64::INFINITY;
    for (p, l) in parts {
        out.extend_from_slice(&p);
        low = low.min(l);
    }
    low
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn collect_ranges<F>(n: usize, scan: F, out: &mut Vec<usize>) -> f64
where
    F: Fn(Range<usize>, &mut Vec<usize>) -> f64 + Sync,
{
    out.clear();
    scan(0..n, out)
}

/// Runs `f` inside a pool with `workers` threads (0 = the global pool).
#[cfg(feature = "parallel")]
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a {workers}-thread pool ({e}); using the global pool");
            f()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<T: Send>(_workers: usize, f: impl FnOnce() -> T + Send) -> T {
    f()
}

/// Maps `items` through `f`, concurrently when the `parallel` feature is on.
/// Output order matches input order.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}
