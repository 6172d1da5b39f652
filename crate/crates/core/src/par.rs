//! Execution mode switch for the data-parallel loops.
//!
//! Every parallel loop in the crate goes through these helpers, which keep
//! output order identical to the sequential iteration order. With the
//! `parallel` feature disabled the helpers are plain loops and
//! [`Exec::Parallel`] behaves like [`Exec::Sequential`].

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

static MODE: AtomicU8 = AtomicU8::new(1);

pub fn exec() -> Exec {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 1 {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

/// Select the mode process-wide; benches flip this to compare both paths.
pub fn set_exec(mode: Exec) {
    MODE.store(matches!(mode, Exec::Parallel) as u8, Ordering::Relaxed);
}

/// Run `f` with the given mode, restoring the previous one afterwards.
pub fn with_exec<R>(mode: Exec, f: impl FnOnce() -> R) -> R {
    let prev = exec();
    set_exec(mode);
    let out = f();
    set_exec(prev);
    out
}

/// Run `f` on a dedicated pool of `threads` workers; `threads = 1` runs
/// sequentially. Without the `parallel` feature the count is ignored.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads <= 1 {
        return with_exec(Exec::Sequential, f);
    }
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(f)
    }
    #[cfg(not(feature = "parallel"))]
    f()
}

pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec() == Exec::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec() == Exec::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    range.map(f).collect()
}

/// Apply `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec() == Exec::Parallel {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Apply `f(chunk_index, a_chunk, b_chunk)` to aligned chunks of two slices.
pub fn for_each_chunk_pair_mut<A, B, F>(a: &mut [A], b: &mut [B], chunk: usize, f: F)
where
    A: Send,
    B: Send,
    F: Fn(usize, &mut [A], &mut [B]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec() == Exec::Parallel {
        use rayon::prelude::*;
        a.par_chunks_mut(chunk)
            .zip(b.par_chunks_mut(chunk))
            .enumerate()
            .for_each(|(i, (x, y))| f(i, x, y));
        return;
    }
    a.chunks_mut(chunk)
        .zip(b.chunks_mut(chunk))
        .enumerate()
        .for_each(|(i, (x, y))| f(i, x, y));
}
