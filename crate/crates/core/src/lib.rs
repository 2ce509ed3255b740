//! Exclusion-process detection game, oriented renormalisation and the
//! two-density coupling, as a `no_std` library (an allocator is required).
//!
//! Layout:
//!
//! * [`dynamics`]: graphical construction of the symmetric exclusion process
//!   on a torus, plus renewal chains and independent walks.
//! * [`paths`]: convex step sets, lattice paths, crossings of the regions `A_k`.
//! * [`renorm`]: scale ladder, chain families, recursion ledger, trigger bounds.
//! * [`escape`]: detection fields and the clairvoyant survival recursion.
//! * [`couple`]: the interval coupling of two densities, covariance and
//!   box-decoupling probes.
//! * [`bounds`]: Poisson and binomial tails, heat kernels.
//!
//! Randomness comes from [`rng::Stream`], a keyed family of independent
//! generators; experiments are generic over a [`replica::ReplicaRunner`] so a
//! std front end can parallelise them without changing any result.
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod couple;
pub mod dynamics;
pub mod error;
pub mod escape;
pub mod paths;
pub mod precise;
pub mod renorm;
pub mod replica;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
