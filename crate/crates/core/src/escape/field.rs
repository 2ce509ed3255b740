use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::TrajectoryRecord;
use crate::paths::SiteField;
use crate::{Error, Result};

/// Which occupancy value a point must hold throughout `[t, t + 1)` to be open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Open while a particle sits on the site.
    Ride,
    /// Open while the site is empty.
    Avoid,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ride => "ride",
            Rule::Avoid => "avoid",
        }
    }

    pub fn dual(self) -> Rule {
        match self {
            Rule::Ride => Rule::Avoid,
            Rule::Avoid => Rule::Ride,
        }
    }

    fn wanted(self) -> u8 {
        match self {
            Rule::Ride => 1,
            Rule::Avoid => 0,
        }
    }
}

impl core::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ride" => Ok(Rule::Ride),
            "avoid" => Ok(Rule::Avoid),
            other => Err(Error::Invalid(alloc::format!("unknown rule {other:?} (expected ride or avoid)"))),
        }
    }
}

/// Open/closed points `(x, t)` for `x in [x_min, x_max]`, `t in 0..=horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionField {
    field: SiteField,
    rule: Rule,
    rho: f64,
}

impl DetectionField {
    /// Wraps a hand-made field whose rows are the times `0..height`.
    pub fn from_field(field: SiteField, rule: Rule, rho: f64) -> Result<Self> {
        if field.origin().1 != 0 {
            return Err(Error::Window("detection rows must start at time 0".into()));
        }
        Ok(DetectionField { field, rule, rho })
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn x_min(&self) -> i64 {
        self.field.origin().0
    }

    pub fn x_max(&self) -> i64 {
        self.x_min() + self.field.width() as i64 - 1
    }

    pub fn width(&self) -> usize {
        self.field.width()
    }

    pub fn horizon(&self) -> usize {
        self.field.height() - 1
    }

    pub fn is_open(&self, x: i64, t: usize) -> Result<bool> {
        self.field.get((x, t as i64))
    }

    pub fn field(&self) -> &SiteField {
        &self.field
    }

    pub fn into_field(self) -> SiteField {
        self.field
    }
}

/// Exact openness from the swap list: a site's value only changes at swaps
/// across an edge whose endpoints differ.
pub fn detection_field(
    traj: &TrajectoryRecord,
    x_min: i64,
    x_max: i64,
    horizon: usize,
    rule: Rule,
) -> Result<DetectionField> {
    let torus = traj.torus();
    if x_max < x_min {
        return Err(Error::Window(alloc::format!("empty window [{x_min}, {x_max}]")));
    }
    let width = (x_max - x_min + 1) as usize;
    if width > torus.size() {
        return Err(Error::Window(alloc::format!(
            "window of {width} sites on a torus of {}",
            torus.size()
        )));
    }
    if (horizon + 1) as f64 > traj.t_max() {
        return Err(Error::Window(alloc::format!(
            "rows up to {horizon} need clocks on [0, {}] but the trajectory stops at {}",
            horizon + 1,
            traj.t_max()
        )));
    }
    let mut slot = vec![usize::MAX; torus.size()];
    for i in 0..width {
        slot[torus.wrap(x_min + i as i64)] = i;
    }
    let mut flips: Vec<Vec<f64>> = vec![Vec::new(); width];
    let mut conf: Vec<u8> = traj.initial().as_slice().to_vec();
    for sw in traj.swaps() {
        let (a, b) = torus.edge_ends(sw.edge as usize);
        if conf[a] != conf[b] {
            conf.swap(a, b);
            for s in [a, b] {
                if slot[s] != usize::MAX {
                    flips[slot[s]].push(sw.time);
                }
            }
        }
    }
    let want = rule.wanted();
    let mut bits = vec![false; width * (horizon + 1)];
    for (i, fl) in flips.iter().enumerate() {
        let mut value = traj.initial().get(torus.wrap(x_min + i as i64));
        let mut k = 0;
        for t in 0..=horizon {
            let tf = t as f64;
            while k < fl.len() && fl[k] <= tf {
                value ^= 1;
                k += 1;
            }
            let quiet = k == fl.len() || fl[k] >= tf + 1.0;
            bits[t * width + i] = value == want && quiet;
        }
    }
    let field = SiteField::from_fn((x_min, 0), width, horizon + 1, |(x, t)| {
        bits[t as usize * width + (x - x_min) as usize]
    });
    Ok(DetectionField {
        field,
        rule,
        rho: traj.initial().density(),
    })
}
