//! Fixed-size worker pool used for every parallel loop in the crate.
//!
//! Work is expressed as `n` independent tasks indexed `0..n`. The index range
//! is cut into one contiguous block per worker and each worker fills its
//! block of a pre-allocated output vector in order. Results never pass
//! through a reduction whose order depends on scheduling, so the output is
//! bit-identical for any worker count.

use std::sync::Arc;

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

#[derive(Clone, Default)]
pub struct Executor {
    pool: Option<Arc<ThreadPool>>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers())
            .finish()
    }
}

impl Executor {
    /// Runs every task on the calling thread.
    pub fn sequential() -> Self {
        Self { pool: None }
    }

    /// Creates a pool with `workers` threads; `0` means one per physical core.
    pub fn new(workers: usize) -> Result<Self> {
        let workers = if workers == 0 {
            physical_cores()
        } else {
            workers
        };
        if workers == 1 {
            return Ok(Self::sequential());
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("slm-worker-{i}"))
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        Ok(Self {
            pool: Some(Arc::new(pool)),
        })
    }

    pub fn workers(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    /// Evaluates `task(i)` for `i in 0..n` and returns the results in index order.
    pub fn map<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let pool = match &self.pool {
            Some(pool) if n > 1 => pool,
            _ => return (0..n).map(task).collect(),
        };
        let workers = pool.current_num_threads().min(n);
        let block = n.div_ceil(workers);
        let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
        let task = &task;
        pool.scope(|scope| {
            for (b, chunk) in slots.chunks_mut(block).enumerate() {
                scope.spawn(move |_| {
                    let start = b * block;
                    for (offset, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(task(start + offset));
                    }
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("every slot is written by its worker"))
            .collect()
    }
}

/// Number of physical cores, never less than one.
pub fn physical_cores() -> usize {
    num_cpus::get_physical().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order_for_any_worker_count() {
        let expected: Vec<u64> = (0..103u64).map(|i| i * i + 7).collect();
        for workers in [1, 2, 3, 8] {
            let exec = Executor::new(workers).unwrap();
            assert_eq!(exec.map(103, |i| (i as u64) * (i as u64) + 7), expected);
        }
    }

    #[test]
    fn empty_and_single_task() {
        let exec = Executor::new(4).unwrap();
        assert!(exec.map(0, |i| i).is_empty());
        assert_eq!(exec.map(1, |i| i + 1), vec![1]);
    }

    #[test]
    fn zero_means_physical_cores() {
        let exec = Executor::new(0).unwrap();
        assert_eq!(exec.workers(), physical_cores());
    }
}
