use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

use crate::dynamics::{evolve_exclusion, sample_clocks, sample_initial, Torus};
use crate::error::check_unit;
use crate::escape::{detection_field, Rule};
use crate::paths::{find_crossing, CrossingRegion, SiteField, StepSet};
use crate::replica::ReplicaRunner;
use crate::rng::{Purpose, Stream};
use crate::stats::Proportion;
use crate::{Error, Result};

/// Where the open/closed sites of a crossing estimate come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldSource {
    AllOpen,
    AllClosed,
    /// Independent sites, open with probability `p`.
    Bernoulli(f64),
    /// Space-time field of a stationary exclusion process, `x` horizontal
    /// and time vertical, on a torus of `torus_factor` times the box width.
    Exclusion { rho: f64, rule: Rule, torus_factor: usize },
}

impl FieldSource {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSource::AllOpen | FieldSource::AllClosed => Ok(()),
            FieldSource::Bernoulli(p) => check_unit("p", p),
            FieldSource::Exclusion { rho, torus_factor, .. } => {
                check_unit("rho", rho)?;
                if torus_factor == 0 {
                    return Err(Error::Invalid("torus factor must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

/// A field covering `region`'s bounding box.
pub fn sample_site_field(source: FieldSource, region: &CrossingRegion, stream: Stream) -> Result<SiteField> {
    source.validate()?;
    let (lo, _) = region.bounding_box();
    let n = (region.side() + 1) as usize;
    Ok(match source {
        FieldSource::AllOpen => SiteField::all_open(lo, n, n),
        FieldSource::AllClosed => SiteField::all_closed(lo, n, n),
        FieldSource::Bernoulli(p) => {
            let mut rng = stream.purpose(Purpose::Field).rng();
            SiteField::from_fn(lo, n, n, |_| rng.gen::<f64>() < p)
        }
        FieldSource::Exclusion { rho, rule, torus_factor } => {
            let torus = Torus::new(n * torus_factor)?;
            let init = sample_initial(rho, torus, &mut stream.purpose(Purpose::Initial).rng())?;
            let clocks = sample_clocks(torus, n as f64, 1, &mut stream.purpose(Purpose::Clocks).rng())?;
            let traj = evolve_exclusion(&init, &clocks, 1)?;
            let det = detection_field(&traj, 0, n as i64 - 1, n - 1, rule)?;
            let f = det.field();
            SiteField::from_fn(lo, n, n, |(x, y)| f.get((x - lo.0, y - lo.1)).unwrap_or(false))
        }
    })
}

/// Monte Carlo frequency of "no open crossing" with a Clopper-Pearson interval.
#[derive(Clone, Debug, PartialEq)]
pub struct PkEstimate {
    pub replicas: u64,
    pub blocked: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Per-replica outcome, in replica order.
    pub outcomes: Vec<bool>,
}

pub fn estimate_pk<P: ReplicaRunner>(
    region: &CrossingRegion,
    steps: &StepSet,
    source: FieldSource,
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<PkEstimate> {
    if replicas == 0 {
        return Err(Error::Invalid("at least one replica is needed".into()));
    }
    source.validate()?;
    let out: Vec<Result<bool>> = runner.run(replicas, |i| {
        let field = sample_site_field(source, region, stream.replica(i))?;
        Ok(find_crossing(region, &field, steps)?.is_none())
    });
    let outcomes = out.into_iter().collect::<Result<Vec<_>>>()?;
    let p = Proportion::from_flags(outcomes.iter().copied());
    let (ci_low, ci_high) = p.clopper_pearson(0.05);
    Ok(PkEstimate {
        replicas,
        blocked: p.successes,
        p_hat: p.estimate(),
        ci_low,
        ci_high,
        outcomes,
    })
}

/// Fully closed rows of the ride-rule field on `[0, l] x [0, L]`. With an
/// unbounded step range a vertical open crossing exists iff no row is closed.
#[derive(Clone, Debug, PartialEq)]
pub struct RowClosure {
    pub l: usize,
    pub big_l: usize,
    pub rho: f64,
    pub any_row: Proportion,
    /// Closed rows among all rows of all replicas.
    pub per_row: Proportion,
    /// `L (1 - rho/e)^{l/2}`.
    pub union_bound: f64,
    /// `(1 - rho/e)^{floor(l/2) + 1}`, from the independent even sites.
    pub row_bound: f64,
}

pub fn row_closure_probe<P: ReplicaRunner>(
    l: usize,
    big_l: usize,
    rho: f64,
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<RowClosure> {
    check_unit("rho", rho)?;
    if l == 0 || big_l == 0 {
        return Err(Error::Invalid(format!("box [0, {l}] x [0, {big_l}] is degenerate")));
    }
    let torus = Torus::new(4 * (l + 1))?;
    let out: Vec<Result<u64>> = runner.run(replicas, |i| {
        let s = stream.replica(i);
        let init = sample_initial(rho, torus, &mut s.purpose(Purpose::Initial).rng())?;
        let clocks = sample_clocks(torus, (big_l + 1) as f64, 1, &mut s.purpose(Purpose::Clocks).rng())?;
        let traj = evolve_exclusion(&init, &clocks, 1)?;
        let det = detection_field(&traj, 0, l as i64, big_l, Rule::Ride)?;
        let mut closed = 0;
        for u in 0..=big_l {
            let mut all = true;
            for x in 0..=l as i64 {
                if det.is_open(x, u)? {
                    all = false;
                    break;
                }
            }
            closed += u64::from(all);
        }
        Ok(closed)
    });
    let counts = out.into_iter().collect::<Result<Vec<_>>>()?;
    let base = 1.0 - rho / core::f64::consts::E;
    Ok(RowClosure {
        l,
        big_l,
        rho,
        any_row: Proportion::from_flags(counts.iter().map(|&c| c > 0)),
        per_row: Proportion::new(counts.iter().sum(), replicas * (big_l as u64 + 1)),
        union_bound: big_l as f64 * libm::pow(base, l as f64 / 2.0),
        row_bound: libm::pow(base, (l / 2 + 1) as f64),
    })
}
