use alloc::vec::Vec;
use rand::Rng;

use super::{sample_clocks, site_uniforms, ClockField, Configuration, Torus};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Swap {
    pub time: f64,
    pub edge: u32,
}

/// Initial occupancy plus the ordered swaps applied to it. The state at time
/// `s` includes every swap with time `<= s`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    initial: Configuration,
    swaps: Vec<Swap>,
    t_max: f64,
}

impl TrajectoryRecord {
    pub fn new(initial: Configuration, swaps: Vec<Swap>, t_max: f64) -> Result<Self> {
        let w = initial.len();
        if swaps.iter().any(|s| s.edge as usize >= w || !(0.0..=t_max).contains(&s.time)) {
            return Err(Error::Invalid("swap outside torus or horizon".into()));
        }
        if swaps.windows(2).any(|p| p[0].time > p[1].time) {
            return Err(Error::Invalid("swaps out of time order".into()));
        }
        Ok(TrajectoryRecord { initial, swaps, t_max })
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    pub fn swaps(&self) -> &[Swap] {
        &self.swaps
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn torus(&self) -> Torus {
        self.initial.torus()
    }

    /// Swaps with time `<= s`.
    pub fn swaps_until(&self, s: f64) -> &[Swap] {
        &self.swaps[..self.swaps.partition_point(|e| e.time <= s)]
    }

    pub fn configuration_at(&self, s: f64) -> Configuration {
        let mut c = self.initial.clone();
        for sw in self.swaps_until(s) {
            c.swap_edge(sw.edge as usize);
        }
        c
    }

    pub fn final_configuration(&self) -> Configuration {
        self.configuration_at(f64::INFINITY)
    }

    /// `eta_s(x)`, by tracing the site backwards through the swaps.
    pub fn occupancy_at(&self, x: usize, s: f64) -> u8 {
        let torus = self.torus();
        let mut y = x;
        for sw in self.swaps_until(s).iter().rev() {
            let (a, b) = torus.edge_ends(sw.edge as usize);
            if y == a {
                y = b;
            } else if y == b {
                y = a;
            }
        }
        self.initial.get(y)
    }

    /// Calls `f(time, state)` at time 0 and after every swap.
    pub fn for_each_state<F: FnMut(f64, &Configuration)>(&self, mut f: F) {
        let mut c = self.initial.clone();
        f(0.0, &c);
        for sw in &self.swaps {
            c.swap_edge(sw.edge as usize);
            f(sw.time, &c);
        }
    }

    /// The trajectory of the holes.
    pub fn complement(&self) -> TrajectoryRecord {
        TrajectoryRecord {
            initial: self.initial.complement(),
            swaps: self.swaps.clone(),
            t_max: self.t_max,
        }
    }
}

fn check_family(clocks: &ClockField, family: u8) -> Result<()> {
    if family == 0 || family > clocks.families() {
        return Err(Error::Invalid(alloc::format!(
            "clock family {family} not present (field has {})",
            clocks.families()
        )));
    }
    Ok(())
}

/// Applies every ring of `family` as an unconditional swap.
pub fn evolve_exclusion(init: &Configuration, clocks: &ClockField, family: u8) -> Result<TrajectoryRecord> {
    check_family(clocks, family)?;
    if clocks.torus().size() != init.len() {
        return Err(Error::Invalid("clock field and configuration differ in size".into()));
    }
    let swaps = clocks
        .family_events(family)
        .map(|e| Swap {
            time: e.time,
            edge: e.edge,
        })
        .collect();
    Ok(TrajectoryRecord {
        initial: init.clone(),
        swaps,
        t_max: clocks.t_max(),
    })
}

/// `gamma_t(x)`: start at `(x, t)`, run down in time and cross every arrow met.
pub fn interchange_label(clocks: &ClockField, family: u8, x: usize, t: f64) -> Result<usize> {
    check_family(clocks, family)?;
    let torus = clocks.torus();
    if x >= torus.size() {
        return Err(Error::Invalid(alloc::format!("site {x} outside torus")));
    }
    if !(0.0..=clocks.t_max()).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, t_max]",
        });
    }
    let mut y = x;
    for e in clocks.events_until(t).iter().rev().filter(|e| e.family == family) {
        let (a, b) = torus.edge_ends(e.edge as usize);
        if y == a {
            y = b;
        } else if y == b {
            y = a;
        }
    }
    Ok(y)
}

/// `x -> gamma_t(x)` for all sites at once, computed forwards.
pub fn interchange_map(clocks: &ClockField, family: u8, t: f64) -> Result<Vec<u32>> {
    check_family(clocks, family)?;
    let torus = clocks.torus();
    let mut label: Vec<u32> = (0..torus.size() as u32).collect();
    for e in clocks.events_until(t).iter().filter(|e| e.family == family) {
        let (a, b) = torus.edge_ends(e.edge as usize);
        label.swap(a, b);
    }
    Ok(label)
}

/// Trajectories at every density of `rhos`, driven by one set of site
/// uniforms and one clock field, hence pointwise ordered at all times.
pub fn monotone_ensemble<R: Rng + ?Sized>(
    rhos: &[f64],
    torus: Torus,
    t_max: f64,
    rng: &mut R,
) -> Result<Vec<TrajectoryRecord>> {
    if rhos.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invalid("densities must be sorted ascending".into()));
    }
    let u = site_uniforms(torus, rng);
    let clocks = sample_clocks(torus, t_max, 1, rng)?;
    rhos.iter()
        .map(|&rho| evolve_exclusion(&Configuration::from_uniforms(&u, rho)?, &clocks, 1))
        .collect()
}

/// Number of (state, site) pairs with `lower > upper`, checking the full
/// configurations at time 0 and after every event. Both records must share
/// their swap sequence.
pub fn domination_violations(lower: &TrajectoryRecord, upper: &TrajectoryRecord) -> Result<u64> {
    if lower.swaps != upper.swaps || lower.initial.len() != upper.initial.len() {
        return Err(Error::Invalid("trajectories are not driven by the same clocks".into()));
    }
    let mut a = lower.initial.clone();
    let mut b = upper.initial.clone();
    let count = |a: &Configuration, b: &Configuration| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .filter(|(x, y)| x > y)
            .count() as u64
    };
    let mut v = count(&a, &b);
    for sw in &lower.swaps {
        a.swap_edge(sw.edge as usize);
        b.swap_edge(sw.edge as usize);
        v += count(&a, &b);
    }
    Ok(v)
}
