//! Paths with increments in a convex step set, and their crossings of the
//! regions `A_k`.

mod crossing;
mod field;
mod path;
mod steps;

pub use crossing::{exit_time, find_crossing, is_crossing, is_open_crossing, CrossingRegion};
pub use field::SiteField;
pub use path::{concatenate, first_intersection, LatticePath};
pub use steps::{Point, QPoint, StepSet};
