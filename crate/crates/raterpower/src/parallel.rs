use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

use raterpower_core::Executor;

/// [`Executor`] backed by a dedicated rayon pool.
///
/// Work items are collected in index order, so results match
/// [`Sequential`](raterpower_core::Sequential) exactly for any thread count.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads == 0` lets rayon pick the number of threads.
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        let pool = ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonExecutor { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use raterpower_core::Sequential;

    #[test]
    fn matches_sequential_order() {
        let exec = RayonExecutor::new(4).unwrap();
        let f = |i: usize| i * i + 1;
        assert_eq!(exec.map(1000, f), Sequential.map(1000, f));
        assert_eq!(exec.threads(), 4);
    }
}
