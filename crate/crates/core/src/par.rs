//! Data-parallel loops with a sequential fallback.
//!
//! With the `parallel` feature (default) `Exec::Parallel` dispatches to rayon.
//! Without it, or for short loops, everything runs on the calling thread.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Loops shorter than this stay sequential even in parallel mode.
pub const MIN_PAR_LEN: usize = 2048;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this build can run anything in parallel.
    pub const fn available() -> bool {
        cfg!(feature = "parallel")
    }

    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    #[inline]
    fn go_parallel(self, len: usize) -> bool {
        Self::available() && self == Exec::Parallel && len >= MIN_PAR_LEN
    }
}

/// Applies `f(j, &mut a[j], &mut b[j])` for every j.
pub fn zip2<F>(exec: Exec, a: &mut [Complex64], b: &mut [Complex64], f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if exec.go_parallel(a.len()) {
        a.par_iter_mut()
            .zip(b.par_iter_mut())
            .enumerate()
            .with_min_len(MIN_PAR_LEN / 4)
            .for_each(|(j, (x, y))| f(j, x, y));
        return;
    }
    let _ = exec;
    for (j, (x, y)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
        f(j, x, y);
    }
}

/// Applies `f(j, &mut a[j])` for every j.
pub fn each<T, F>(exec: Exec, a: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.go_parallel(a.len()) {
        a.par_iter_mut().enumerate().with_min_len(MIN_PAR_LEN / 4).for_each(|(j, x)| f(j, x));
        return;
    }
    let _ = exec;
    for (j, x) in a.iter_mut().enumerate() {
        f(j, x);
    }
}

/// Applies `f(i, chunk)` to consecutive chunks of `chunk_len` elements.
pub fn each_chunk<T, F>(exec: Exec, a: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.go_parallel(a.len()) && a.len() > chunk_len {
        a.par_chunks_mut(chunk_len).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    for (i, c) in a.chunks_mut(chunk_len).enumerate() {
        f(i, c);
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.go_parallel(n) {
        return (0..n).into_par_iter().with_min_len(MIN_PAR_LEN / 4).map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Coarse-grained map over independent jobs (sweep cells); parallel for any length.
pub fn map_jobs<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if Exec::available() && exec == Exec::Parallel {
        return items.par_iter().with_max_len(1).map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Runs `f` inside a pool capped at `threads` workers when given.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}
