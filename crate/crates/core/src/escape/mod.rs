//! The detection game: open/closed space-time fields built from exclusion
//! trajectories and the clairvoyant survival recursion on them.

mod experiments;
mod field;
mod survival;

pub use experiments::{
    density_monotonicity, sample_detection_field, strangle_probe, survival_curve, window_half_width,
    DensityMonotonicity, SurvivalCurve, SurvivalRow,
};
pub use field::{detection_field, DetectionField, Rule};
pub use survival::{survival_dp, SurvivalFrontier};
