use alloc::vec::Vec;
use libm::ceil;

use super::{detection_field, survival_dp, DetectionField, Rule};
use crate::dynamics::{evolve_exclusion, monotone_ensemble, sample_clocks, sample_initial, Torus};
use crate::error::check_unit;
use crate::replica::ReplicaRunner;
use crate::rng::{Purpose, Stream};
use crate::stats::Proportion;
use crate::{Error, Result};

/// `R T + ceil(6 T)`: the window reaches this far on each side of the origin.
pub fn window_half_width(r: u32, horizon: usize) -> i64 {
    r as i64 * horizon as i64 + ceil(6.0 * horizon as f64) as i64
}

/// One stationary realisation on a torus of exactly the window width, with
/// the window centred at the origin.
pub fn sample_detection_field(rho: f64, r_max: u32, horizon: usize, rule: Rule, stream: Stream) -> Result<DetectionField> {
    check_unit("rho", rho)?;
    let half = window_half_width(r_max, horizon).max(1);
    let torus = Torus::new((2 * half + 1) as usize)?;
    let init = sample_initial(rho, torus, &mut stream.purpose(Purpose::Initial).rng())?;
    let clocks = sample_clocks(torus, (horizon + 1) as f64, 1, &mut stream.purpose(Purpose::Clocks).rng())?;
    let traj = evolve_exclusion(&init, &clocks, 1)?;
    detection_field(&traj, -half, half, horizon, rule)
}

/// One row of `survival.csv`, minus the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalRow {
    pub rule: Rule,
    pub rho: f64,
    pub r: u32,
    pub horizon: usize,
    pub replicas: u64,
    pub survived: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SurvivalRow {
    fn new(rule: Rule, rho: f64, r: u32, horizon: usize, p: Proportion) -> Self {
        let (ci_low, ci_high) = p.clopper_pearson(0.05);
        SurvivalRow {
            rule,
            rho,
            r,
            horizon,
            replicas: p.trials,
            survived: p.successes,
            frequency: p.estimate(),
            ci_low,
            ci_high,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalCurve {
    pub rows: Vec<SurvivalRow>,
    /// `alive[replica][i]` for `r_list[i]`.
    pub alive: Vec<Vec<bool>>,
}

impl SurvivalCurve {
    /// Replicas on which survival drops when `R` grows, with `r_list` ascending.
    pub fn monotonicity_violations(&self) -> u64 {
        self.alive.iter().filter(|a| a.windows(2).any(|w| w[0] && !w[1])).count() as u64
    }
}

/// Survival to `horizon` for every `R` in `r_list`, every `R` evaluated on
/// the same realisation, sized for the largest `R`.
pub fn survival_curve<P: ReplicaRunner>(
    rho: f64,
    r_list: &[u32],
    horizon: usize,
    replicas: u64,
    rule: Rule,
    stream: Stream,
    runner: &P,
) -> Result<SurvivalCurve> {
    check_unit("rho", rho)?;
    let r_max = r_list.iter().copied().max().ok_or_else(|| Error::Invalid("empty R list".into()))?;
    let alive: Vec<Result<Vec<bool>>> = runner.run(replicas, |i| {
        let field = sample_detection_field(rho, r_max, horizon, rule, stream.replica(i))?;
        r_list.iter().map(|&r| Ok(survival_dp(&field, r, horizon, 0)?.0)).collect()
    });
    let alive = alive.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = r_list
        .iter()
        .enumerate()
        .map(|(j, &r)| SurvivalRow::new(rule, rho, r, horizon, Proportion::from_flags(alive.iter().map(|a| a[j]))))
        .collect();
    Ok(SurvivalCurve { rows, alive })
}

/// Survival at `R = 1` under the avoid rule against the horizon. Each replica
/// is run once to the largest horizon and read off at every `T`, so the
/// frequencies are nested.
pub fn strangle_probe<P: ReplicaRunner>(
    t_list: &[usize],
    replicas: u64,
    rho: f64,
    stream: Stream,
    runner: &P,
) -> Result<Vec<SurvivalRow>> {
    if !(rho > 0.0) {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho,
            range: "(0, 1]",
        });
    }
    let t_max = t_list.iter().copied().max().ok_or_else(|| Error::Invalid("empty horizon list".into()))?;
    let alive: Vec<Result<Vec<bool>>> = runner.run(replicas, |i| {
        let field = sample_detection_field(rho, 1, t_max, Rule::Avoid, stream.replica(i))?;
        let (_, frontier) = survival_dp(&field, 1, t_max, 0)?;
        Ok(t_list.iter().map(|&t| frontier.alive_at(t)).collect())
    });
    let alive = alive.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(t_list
        .iter()
        .enumerate()
        .map(|(j, &t)| SurvivalRow::new(Rule::Avoid, rho, 1, t, Proportion::from_flags(alive.iter().map(|a| a[j]))))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMonotonicity {
    pub rhos: Vec<f64>,
    pub replicas: u64,
    /// Replicas with `F_t(ρ') ⊄ F_t(ρ)` for some `ρ < ρ'` and some `t`.
    pub violations: u64,
    pub survived: Vec<u64>,
}

/// Avoid-rule frontiers on a monotone ensemble: more particles can only
/// shrink the frontier.
pub fn density_monotonicity<P: ReplicaRunner>(
    rhos: &[f64],
    r: u32,
    horizon: usize,
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<DensityMonotonicity> {
    let half = window_half_width(r, horizon).max(1);
    let torus = Torus::new((2 * half + 1) as usize)?;
    let per: Vec<Result<(bool, Vec<bool>)>> = runner.run(replicas, |i| {
        let mut rng = stream.replica(i).purpose(Purpose::Field).rng();
        let trajs = monotone_ensemble(rhos, torus, (horizon + 1) as f64, &mut rng)?;
        let mut frontiers = Vec::with_capacity(trajs.len());
        for traj in &trajs {
            let field = detection_field(traj, -half, half, horizon, Rule::Avoid)?;
            frontiers.push(survival_dp(&field, r, horizon, 0)?);
        }
        let ok = frontiers.windows(2).all(|w| w[1].1.is_subset_of(&w[0].1));
        Ok((ok, frontiers.iter().map(|f| f.0).collect()))
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    let mut survived = alloc::vec![0u64; rhos.len()];
    for (_, a) in &per {
        for (s, &b) in survived.iter_mut().zip(a) {
            *s += u64::from(b);
        }
    }
    Ok(DensityMonotonicity {
        rhos: rhos.to_vec(),
        replicas,
        violations: per.iter().filter(|p| !p.0).count() as u64,
        survived,
    })
}
