//! Parallel map over independent cells with an order-preserving merge.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable that overrides the configured worker count.
pub const WORKERS_ENV: &str = "RABI_WORKERS";

/// Worker count: `RABI_WORKERS` if set, else `requested`, else the number
/// of available cores.
pub fn resolve_workers(requested: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        };
    }
    match requested {
        Some(0) => Err(Error::Config("worker count must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs cells on a private pool. Results come back in input order whatever
/// the scheduling, so sweeps are independent of the worker count.
#[derive(Debug, Clone, Copy)]
pub struct Runner {
    pub workers: usize,
    /// Per-cell progress lines on stderr.
    pub progress: bool,
}

impl Runner {
    pub fn new(workers: usize, progress: bool) -> Self {
        Self { workers: workers.max(1), progress }
    }

    pub fn serial() -> Self {
        Self::new(1, false)
    }

    pub fn map<T, R, F>(&self, label: &str, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync,
    {
        let done = AtomicUsize::new(0);
        let total = items.len();
        let run = || {
            items
                .par_iter()
                .map(|item| {
                    let r = f(item);
                    let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                    if self.progress {
                        eprintln!("[{label}] {k}/{total}");
                    }
                    r
                })
                .collect()
        };
        if self.workers == 1 {
            // keep single-threaded runs on the calling thread
            return Ok(items
                .iter()
                .map(|item| {
                    let r = f(item);
                    let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                    if self.progress {
                        eprintln!("[{label}] {k}/{total}");
                    }
                    r
                })
                .collect());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(pool.install(run))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_workers() {
        let items: Vec<u64> = (0..200).collect();
        let f = |x: &u64| (0..(*x % 17) * 1000).fold(*x, |a, b| a.wrapping_mul(31).wrapping_add(b));
        let one = Runner::new(1, false).map("t", &items, f).unwrap();
        let four = Runner::new(4, false).map("t", &items, f).unwrap();
        assert_eq!(one, four);
    }
}
