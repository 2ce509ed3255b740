//! Particle dynamics on a discrete torus.
//!
//! The exclusion process is realised by the graphical construction: every
//! edge carries a rate-1/2 Poisson clock and each ring swaps the occupancies
//! of the two endpoints. Renewal chains and independent lazy walks are the
//! two alternative environments.

mod clocks;
mod configuration;
mod exclusion;
mod renewal;
mod stationarity;
mod torus;
mod walks;

pub use clocks::{sample_clocks, ClockEvent, ClockField, EventStream};
pub use configuration::{sample_initial, site_uniforms, Configuration};
pub use exclusion::{
    domination_violations, evolve_exclusion, interchange_label, interchange_map,
    monotone_ensemble, Swap, TrajectoryRecord,
};
pub use renewal::{evolve_renewal, sample_interarrival, sample_stationary, RenewalHistory};
pub use stationarity::{stationarity_probe, OccupancyRow};
pub use torus::Torus;
pub use walks::{evolve_walk_cloud, WalkHistory};
