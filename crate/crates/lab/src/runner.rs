use escape_core::replica::ReplicaRunner;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// Replicas spread over a private rayon pool. Results come back in replica
/// order, so nothing downstream sees the thread count.
pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(Parallel {
            pool: ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?,
        })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ReplicaRunner for Parallel {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..replicas).into_par_iter().map(f).collect())
    }
}
