//! Host side of the escape experiments: config files, CSV output, the
//! thread-pool replica runner and the per-experiment drivers behind the
//! `escape` binary.

pub mod config;
pub mod output;
pub mod run;
pub mod runner;
