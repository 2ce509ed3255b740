//! Coupling of exclusion processes at two densities so that the sparser one
//! is dominated on an interval, with the diagnostics needed to see why it
//! fails; plus the covariance and box-decoupling probes.

mod engine;
mod experiments;
mod plan;

pub use engine::{coupled_evolve, coupled_evolve_from, CoupledRun, CouplingDiagnostics, CouplingTorus};
pub use experiments::{
    box_decoupling_probe, column_open, covariance_probe, domination_failure_rate, fully_occupied,
    isolated_pair_meeting, CouplingRates, CovarianceRow, DecouplingReport, PairMeeting, SpaceTimeBox,
};
pub use plan::{build_matching, is_good_pair, make_plan, CouplingPlan, MatchedPair, MatchingState};
