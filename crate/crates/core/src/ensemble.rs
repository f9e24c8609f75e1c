//! Deterministic parallel evaluation over path indices.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Environment variable overriding the configured worker count.
pub const THREADS_ENV: &str = "LADDERLAB_THREADS";

/// Worker count: an explicit request wins, then `LADDERLAB_THREADS`, then
/// the configured value, then the available parallelism.
pub fn resolve_workers(explicit: Option<usize>, configured: Option<usize>) -> Result<usize> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| invalid("LADDERLAB_THREADS", e.to_string()))?,
        ),
        Err(_) => None,
    };
    let w = explicit
        .or(env)
        .or(configured)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if w == 0 {
        return Err(invalid("workers", "must be positive"));
    }
    Ok(w)
}

/// A worker panicked; results of the other indices are kept.
#[derive(Debug)]
pub struct PartialRun<T> {
    pub results: Vec<Option<T>>,
    pub failed_index: u64,
    pub message: String,
}

/// Evaluate `f(i)` for `i in 0..n` on `workers` threads. Output order is the
/// index order whatever the schedule.
pub fn map_indexed<T, F>(n: u64, workers: usize, f: F) -> std::result::Result<Vec<T>, PartialRun<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let run = || -> Vec<std::result::Result<T, String>> {
        (0..n)
            .into_par_iter()
            .map(|i| catch_unwind(AssertUnwindSafe(|| f(i))).map_err(panic_message))
            .collect()
    };
    let outcomes = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    let failed = outcomes.iter().position(|r| r.is_err());
    match failed {
        None => Ok(outcomes
            .into_iter()
            .map(|r| r.unwrap_or_else(|_| unreachable!("checked")))
            .collect()),
        Some(idx) => {
            let mut message = String::new();
            let results = outcomes
                .into_iter()
                .enumerate()
                .map(|(i, r)| match r {
                    Ok(v) => Some(v),
                    Err(m) => {
                        if i == idx {
                            message = m;
                        }
                        None
                    }
                })
                .collect();
            Err(PartialRun {
                results,
                failed_index: idx as u64,
                message,
            })
        }
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "worker panicked".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_index_order() {
        let a = map_indexed(1000, 1, |i| i * i).unwrap();
        let b = map_indexed(1000, 8, |i| i * i).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[31], 961);
    }

    #[test]
    fn panic_keeps_partial_results() {
        let err = map_indexed(10, 2, |i| if i == 7 { panic!("boom at 7") } else { i }).unwrap_err();
        assert_eq!(err.failed_index, 7);
        assert_eq!(err.results[3], Some(3));
        assert!(err.results[7].is_none());
        assert!(err.message.contains("boom"));
    }
}
