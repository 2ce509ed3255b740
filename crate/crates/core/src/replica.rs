//! Replica execution strategy.
//!
//! Experiments hand a closure `replica index -> result` to a runner. Results
//! always come back in index order, so any reduction done afterwards is
//! independent of how the runner schedules the work.

use alloc::vec::Vec;

pub trait ReplicaRunner {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs replicas one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl ReplicaRunner for Sequential {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..replicas).map(f).collect()
    }
}

impl<R: ReplicaRunner> ReplicaRunner for &R {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (**self).run(replicas, f)
    }
}
