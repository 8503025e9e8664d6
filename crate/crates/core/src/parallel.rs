//! Shared worker pool. `FGN_THREADS` caps the number of threads; unset or
//! unparsable values fall back to rayon's global pool.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

pub const THREADS_ENV: &str = "FGN_THREADS";

static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();

pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

pub(crate) fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let pool = POOL.get_or_init(|| {
        thread_cap().and_then(|n| ThreadPoolBuilder::new().num_threads(n).build().ok())
    });
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Maps `f` over `xs` in parallel; output order follows `xs`.
pub(crate) fn par_map<X: Sync, T: Send>(xs: &[X], f: impl Fn(&X) -> T + Sync + Send) -> Vec<T> {
    install(|| xs.par_iter().map(&f).collect())
}
