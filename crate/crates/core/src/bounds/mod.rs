//! Concentration inequalities and heat-kernel bounds, each checked against
//! an exact evaluation rather than simulation.

mod binomial;
mod kernel;
mod poisson;

pub use binomial::{binomial_corollary_report, binomial_pmf, binomial_tails};
pub use kernel::{
    bessel_i0_scaled, continuous_heat_kernel, continuous_kernel_report, discrete_heat_kernel,
    discrete_heat_kernel_exact, discrete_kernel_sup_check, SupCheck,
};
pub use poisson::{
    c1, c2, c3, poisson_cdf_exact, poisson_lemma_report, poisson_pmf, poisson_tail_exact, DEFAULT_THETA,
};

use alloc::string::String;
use alloc::vec::Vec;

/// One grid point of a checked inequality `exact <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub check: &'static str,
    pub point: String,
    pub exact: f64,
    pub bound: f64,
}

impl TailRow {
    pub fn margin(&self) -> f64 {
        self.bound - self.exact
    }

    pub fn pass(&self) -> bool {
        self.exact <= self.bound
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
}

impl TailReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(TailRow::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TailRow> {
        self.rows.iter().filter(|r| !r.pass())
    }

    pub fn extend(&mut self, other: TailReport) {
        self.rows.extend(other.rows);
    }
}
