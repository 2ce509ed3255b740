use alloc::vec::Vec;
use rand::Rng;
use rand_distr::Exp1;

use super::{coupled_evolve, make_plan, CouplingPlan};
use crate::bounds::{bessel_i0_scaled, continuous_heat_kernel};
use crate::dynamics::{monotone_ensemble, sample_clocks, sample_initial, EventStream, Torus, TrajectoryRecord};
use crate::error::check_unit;
use crate::replica::ReplicaRunner;
use crate::rng::{Purpose, Stream};
use crate::stats::{MeanVar, Proportion};
use crate::{Error, Result};

/// Failure components of the coupling and their closed-form bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingRates {
    pub rho: f64,
    pub rho_prime: f64,
    pub plan: CouplingPlan,
    pub replicas: u64,
    pub a: Proportion,
    pub b: Proportion,
    /// `C ∩ A^c ∩ B^c`.
    pub c_not_ab: Proportion,
    pub c: Proportion,
    /// Replicas with `A^c ∩ B^c`, every pair met, and still `η_t > ξ_t` somewhere on `I`.
    pub invariant_violations: u64,
    /// Replicas with `A^c ∩ B^c` and every pair met.
    pub clean: u64,
    /// Per-replica mean occupation of `H` at time `t`.
    pub eta_density: MeanVar,
    pub xi_density: MeanVar,
}

pub fn domination_failure_rate<P: ReplicaRunner>(
    rho: f64,
    rho_prime: f64,
    interval: (i64, i64),
    t: u64,
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<CouplingRates> {
    let plan = make_plan(interval.0, interval.1, t)?;
    type Outcome = (bool, bool, bool, bool, f64, f64, bool);
    let out: Vec<Result<Outcome>> = runner.run(replicas, |i| {
        let run = coupled_evolve(rho, rho_prime, &plan, stream.replica(i), false)?;
        let d = &run.diagnostics;
        let clean = !d.a && !d.b && d.all_met;
        let ok_invariant = !clean || run.dominates_on_i(&plan);
        let m = run.geometry.margin;
        let n = plan.h_len();
        let dens = |v: &[u8]| v[m..m + n].iter().map(|&b| b as f64).sum::<f64>() / n as f64;
        Ok((d.a, d.b, d.c, ok_invariant, dens(&run.eta_t), dens(&run.xi_t), clean))
    });
    let out = out.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CouplingRates {
        rho,
        rho_prime,
        replicas,
        a: Proportion::from_flags(out.iter().map(|o| o.0)),
        b: Proportion::from_flags(out.iter().map(|o| o.1)),
        c_not_ab: Proportion::from_flags(out.iter().map(|o| o.2 && !o.0 && !o.1)),
        c: Proportion::from_flags(out.iter().map(|o| o.2)),
        invariant_violations: out.iter().filter(|o| !o.3).count() as u64,
        clean: out.iter().filter(|o| o.6).count() as u64,
        eta_density: out.iter().map(|o| o.4).collect(),
        xi_density: out.iter().map(|o| o.5).collect(),
        plan,
    })
}

/// A matched pair's separation, a rate-2 walk absorbed at 0, started at `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMeeting {
    pub t: f64,
    pub start: u64,
    pub not_met: Proportion,
    /// `P_0(-start < X_{2t} <= start)` for the rate-1 walk, by reflection.
    pub exact: f64,
    /// `t^{-1/8}`.
    pub bound: f64,
}

pub fn isolated_pair_meeting<P: ReplicaRunner>(
    t: f64,
    start: u64,
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<PairMeeting> {
    if !(t > 0.0) || start == 0 {
        return Err(Error::Invalid("need t > 0 and a positive starting distance".into()));
    }
    let flags = runner.run(replicas, |i| {
        let mut rng = stream.replica(i).purpose(Purpose::Walks).rng();
        let mut z = start as i64;
        let mut s = 0.0;
        loop {
            let gap: f64 = rng.sample(Exp1);
            s += gap / 2.0;
            if s > t {
                return true;
            }
            z += if rng.gen::<bool>() { 1 } else { -1 };
            if z == 0 {
                return false;
            }
        }
    });
    let k = start as i64;
    let mut exact = 0.0;
    for x in (-k + 1)..=k {
        exact += continuous_heat_kernel(2.0 * t, x)?;
    }
    Ok(PairMeeting {
        t,
        start,
        not_met: Proportion::from_flags(flags),
        exact,
        bound: libm::pow(t, -0.125),
    })
}

/// One row of `covariance.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceRow {
    pub rho: f64,
    pub t: f64,
    pub replicas: u64,
    pub torus: usize,
    pub cov_hat: f64,
    pub cov_se: f64,
    /// `(ρ - ρ²) P̂[γ_t(0) = 0]` from independent clocks.
    pub rhs_hat: f64,
    pub rhs_se: f64,
    pub return_hat: f64,
    pub return_se: f64,
    /// `e^{-t} I_0(t)`.
    pub bessel_ref: f64,
}

/// Each replica averages `(η_0(x) - ρ)(η_t(x) - ρ)` over the torus, and,
/// on independent clocks, the fraction of sites whose interchange label is
/// home at time `t`.
pub fn covariance_probe<P: ReplicaRunner>(
    rho: f64,
    t: f64,
    torus_size: usize,
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<CovarianceRow> {
    check_unit("rho", rho)?;
    if !(t >= 0.0) || (torus_size as f64) <= 8.0 * t {
        return Err(Error::Invalid(alloc::format!("torus of {torus_size} sites is too small for t = {t}")));
    }
    let torus = Torus::new(torus_size)?;
    let w = torus_size as f64;
    let out: Vec<Result<(f64, f64)>> = runner.run(replicas, |i| {
        let s = stream.replica(i);
        let init = sample_initial(rho, torus, &mut s.purpose(Purpose::Initial).rng())?;
        let mut occ = init.as_slice().to_vec();
        for e in EventStream::new(torus, t, 1, &mut s.purpose(Purpose::Clocks).rng())? {
            let (a, b) = torus.edge_ends(e.edge as usize);
            occ.swap(a, b);
        }
        let cov = init
            .as_slice()
            .iter()
            .zip(&occ)
            .map(|(&a, &b)| (a as f64 - rho) * (b as f64 - rho))
            .sum::<f64>()
            / w;
        let mut label: Vec<u32> = (0..torus_size as u32).collect();
        for e in EventStream::new(torus, t, 1, &mut s.purpose(Purpose::Probe).rng())? {
            let (a, b) = torus.edge_ends(e.edge as usize);
            label.swap(a, b);
        }
        let home = label.iter().enumerate().filter(|(x, &l)| *x as u32 == l).count() as f64 / w;
        Ok((cov, home))
    });
    let out = out.into_iter().collect::<Result<Vec<_>>>()?;
    let cov: MeanVar = out.iter().map(|o| o.0).collect();
    let home: MeanVar = out.iter().map(|o| o.1).collect();
    let v = rho - rho * rho;
    Ok(CovarianceRow {
        rho,
        t,
        replicas,
        torus: torus_size,
        cov_hat: cov.mean(),
        cov_se: cov.se(),
        rhs_hat: v * home.mean(),
        rhs_se: v * home.se(),
        return_hat: home.mean(),
        return_se: home.se(),
        bessel_ref: bessel_i0_scaled(t)?,
    })
}

/// Integer space-time box `[x0, x1] x [t0, t1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceTimeBox {
    pub x0: i64,
    pub x1: i64,
    pub t0: u64,
    pub t1: u64,
}

impl SpaceTimeBox {
    pub fn perimeter(&self) -> u64 {
        2 * ((self.x1 - self.x0) as u64 + (self.t1 - self.t0))
    }

    /// Euclidean distance between the two boxes.
    pub fn distance(&self, o: &SpaceTimeBox) -> f64 {
        let gap = |a0: i64, a1: i64, b0: i64, b1: i64| (b0 - a1).max(a0 - b1).max(0) as f64;
        let dx = gap(self.x0, self.x1, o.x0, o.x1);
        let dt = gap(self.t0 as i64, self.t1 as i64, o.t0 as i64, o.t1 as i64);
        libm::sqrt(dx * dx + dt * dt)
    }
}

/// `η_s(x)` at every integer `s` in `[t0, t1]` and `x` in `[x0, x1]`,
/// plus whether each site stays put over `[s, s + 1)`.
fn box_rows(traj: &TrajectoryRecord, b: &SpaceTimeBox) -> (Vec<Vec<u8>>, Vec<Vec<bool>>) {
    let torus = traj.torus();
    let sites: Vec<usize> = (b.x0..=b.x1).map(|x| torus.wrap(x)).collect();
    let mut cfg = traj.initial().as_slice().to_vec();
    let swaps = traj.swaps();
    let mut k = 0;
    let mut rows = Vec::new();
    let mut quiet = Vec::new();
    for s in b.t0..=b.t1 {
        let sf = s as f64;
        while k < swaps.len() && swaps[k].time <= sf {
            let (a, c) = torus.edge_ends(swaps[k].edge as usize);
            cfg.swap(a, c);
            k += 1;
        }
        rows.push(sites.iter().map(|&i| cfg[i]).collect::<Vec<u8>>());
        let mut still = alloc::vec![true; sites.len()];
        let mut probe = cfg.clone();
        let mut j = k;
        while j < swaps.len() && swaps[j].time < sf + 1.0 {
            let (a, c) = torus.edge_ends(swaps[j].edge as usize);
            if probe[a] != probe[c] {
                probe.swap(a, c);
                for (n, &i) in sites.iter().enumerate() {
                    if i == a || i == c {
                        still[n] = false;
                    }
                }
            }
            j += 1;
        }
        quiet.push(still);
    }
    (rows, quiet)
}

/// Every integer point of the box is occupied.
pub fn fully_occupied(traj: &TrajectoryRecord, b: &SpaceTimeBox) -> Result<bool> {
    check_box(traj, b)?;
    Ok(box_rows(traj, b).0.iter().all(|r| r.iter().all(|&v| v == 1)))
}

/// Some column `x` holds a particle throughout some `[s, s + 1)` with `s`
/// an integer time of the box.
pub fn column_open(traj: &TrajectoryRecord, b: &SpaceTimeBox) -> Result<bool> {
    check_box(traj, b)?;
    let (rows, quiet) = box_rows(traj, b);
    Ok(rows.iter().zip(&quiet).any(|(r, q)| r.iter().zip(q).any(|(&v, &s)| v == 1 && s)))
}

fn check_box(traj: &TrajectoryRecord, b: &SpaceTimeBox) -> Result<()> {
    if b.x0 > b.x1 || b.t0 > b.t1 {
        return Err(Error::Invalid("empty box".into()));
    }
    if (b.x1 - b.x0 + 1) as usize > traj.torus().size() || (b.t1 + 1) as f64 > traj.t_max() {
        return Err(Error::Window("box exceeds the trajectory".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingReport {
    pub replicas: u64,
    pub joint: Proportion,
    pub first: Proportion,
    pub second: Proportion,
    /// `Ē_ρ(f1 f2) - Ē_ρ'(f1) Ē_ρ'(f2)`.
    pub gap: f64,
    pub gap_se: f64,
    pub distance: f64,
    /// `dist >= 6 (per(B1) + per(B2))`.
    pub distance_hypothesis: bool,
    pub monotonicity_checks: u64,
}

/// `f1`, `f2` must be non-decreasing; this is checked on `checks` pairs of
/// ordered trajectories before any estimate is made.
#[allow(clippy::too_many_arguments)]
pub fn box_decoupling_probe<P, F1, F2>(
    rho: f64,
    rho_prime: f64,
    boxes: (SpaceTimeBox, SpaceTimeBox),
    f1: F1,
    f2: F2,
    torus_size: usize,
    replicas: u64,
    checks: u64,
    stream: Stream,
    runner: &P,
) -> Result<DecouplingReport>
where
    P: ReplicaRunner,
    F1: Fn(&TrajectoryRecord, &SpaceTimeBox) -> Result<bool> + Sync,
    F2: Fn(&TrajectoryRecord, &SpaceTimeBox) -> Result<bool> + Sync,
{
    check_unit("rho", rho)?;
    check_unit("rho_prime", rho_prime)?;
    if rho > rho_prime {
        return Err(Error::Invalid("need rho <= rho'".into()));
    }
    let (b1, b2) = boxes;
    let torus = Torus::new(torus_size)?;
    let horizon = (b1.t1.max(b2.t1) + 1) as f64;
    for i in 0..checks {
        let mut rng = stream.label("monotone").replica(i).rng();
        let lo: f64 = rng.gen_range(0.0..1.0);
        let hi: f64 = rng.gen_range(lo..=1.0);
        let pair = monotone_ensemble(&[lo, hi], torus, horizon, &mut rng)?;
        for (f, b, name) in [(&f1 as &(dyn Fn(&TrajectoryRecord, &SpaceTimeBox) -> Result<bool> + Sync), b1, "f1"), (&f2, b2, "f2")] {
            if f(&pair[0], &b)? && !f(&pair[1], &b)? {
                return Err(Error::NotMonotone(alloc::format!("{name} decreases from density {lo} to {hi}")));
            }
        }
    }
    let run = |rho: f64, s: Stream| -> Result<TrajectoryRecord> {
        let init = sample_initial(rho, torus, &mut s.purpose(Purpose::Initial).rng())?;
        let clocks = sample_clocks(torus, horizon, 1, &mut s.purpose(Purpose::Clocks).rng())?;
        crate::dynamics::evolve_exclusion(&init, &clocks, 1)
    };
    let out: Vec<Result<(bool, bool, bool)>> = runner.run(replicas, |i| {
        let s = stream.replica(i);
        let low = run(rho, s.label("joint"))?;
        let joint = f1(&low, &b1)? && f2(&low, &b2)?;
        let first = f1(&run(rho_prime, s.label("first"))?, &b1)?;
        let second = f2(&run(rho_prime, s.label("second"))?, &b2)?;
        Ok((joint, first, second))
    });
    let out = out.into_iter().collect::<Result<Vec<_>>>()?;
    let joint = Proportion::from_flags(out.iter().map(|o| o.0));
    let first = Proportion::from_flags(out.iter().map(|o| o.1));
    let second = Proportion::from_flags(out.iter().map(|o| o.2));
    let (e1, e2) = (first.estimate(), second.estimate());
    let gap = joint.estimate() - e1 * e2;
    let gap_se = libm::sqrt(joint.se() * joint.se() + e2 * e2 * first.se() * first.se() + e1 * e1 * second.se() * second.se());
    let distance = b1.distance(&b2);
    Ok(DecouplingReport {
        replicas,
        joint,
        first,
        second,
        gap,
        gap_se,
        distance,
        distance_hypothesis: distance >= 6.0 * (b1.perimeter() + b2.perimeter()) as f64,
        monotonicity_checks: checks,
    })
}
