//! Multiscale renormalisation: the scale ladder, the chain families whose
//! failures force two separated failures one level down, the probability
//! recursion and the finite-size trigger.

mod chains;
mod ladder;
mod ledger;
mod lift;
mod pk;

pub use chains::{chain_points, chain_separation, corner_inequality, ChainFamily, ChainLabel, ChainPoint, ChainSeparation};
pub use ladder::ScaleLadder;
pub use ledger::{
    density_ladder, power_error, recursion_ledger, trigger_bound_exclusion, DensityLadder, RecursionRow,
    TriggerBound, Verdict,
};
pub use lift::{lift_crossings, lift_regions};
pub use pk::{estimate_pk, row_closure_probe, sample_site_field, FieldSource, PkEstimate, RowClosure};
