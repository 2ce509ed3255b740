use alloc::vec::Vec;
use rand::Rng;
use rand_distr::Exp1;

use super::Torus;
use crate::{Error, Result};

/// Ring of the clock on `edge` belonging to clock family `family` (1 or 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClockEvent {
    pub time: f64,
    pub edge: u32,
    pub family: u8,
}

/// All clock rings on a torus over `[0, t_max]`, in time order.
///
/// Equal times (only possible in hand-built fields) are ordered by family and
/// then by edge.
#[derive(Clone, Debug, PartialEq)]
pub struct ClockField {
    torus: Torus,
    t_max: f64,
    families: u8,
    events: Vec<ClockEvent>,
}

fn check_horizon(t_max: f64) -> Result<()> {
    if t_max.is_finite() && t_max >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "t_max",
            value: t_max,
            range: "[0, inf)",
        })
    }
}

fn check_families(families: u8) -> Result<()> {
    if families == 1 || families == 2 {
        Ok(())
    } else {
        Err(Error::Invalid(alloc::format!("{families} clock families requested; 1 or 2 supported")))
    }
}

impl ClockField {
    pub fn empty(torus: Torus, t_max: f64, families: u8) -> Result<Self> {
        check_horizon(t_max)?;
        check_families(families)?;
        Ok(ClockField {
            torus,
            t_max,
            families,
            events: Vec::new(),
        })
    }

    /// Builds a field from explicit ring times, indexed `[family - 1][edge]`.
    pub fn from_edge_times(torus: Torus, t_max: f64, times: &[Vec<Vec<f64>>]) -> Result<Self> {
        check_horizon(t_max)?;
        let families = u8::try_from(times.len()).map_err(|_| Error::Invalid("too many families".into()))?;
        check_families(families)?;
        let mut events = Vec::new();
        for (f, per_edge) in times.iter().enumerate() {
            if per_edge.len() != torus.edges() {
                return Err(Error::Invalid(alloc::format!(
                    "family {} lists {} edges, torus has {}",
                    f + 1,
                    per_edge.len(),
                    torus.edges()
                )));
            }
            for (e, ts) in per_edge.iter().enumerate() {
                for (i, &t) in ts.iter().enumerate() {
                    if !(0.0..=t_max).contains(&t) {
                        return Err(Error::OutOfRange {
                            name: "event time",
                            value: t,
                            range: "[0, t_max]",
                        });
                    }
                    if i > 0 && ts[i - 1] >= t {
                        return Err(Error::Invalid(alloc::format!(
                            "times on edge {e} of family {} are not strictly increasing",
                            f + 1
                        )));
                    }
                    events.push(ClockEvent {
                        time: t,
                        edge: e as u32,
                        family: f as u8 + 1,
                    });
                }
            }
        }
        events.sort_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then(a.family.cmp(&b.family))
                .then(a.edge.cmp(&b.edge))
        });
        Ok(ClockField {
            torus,
            t_max,
            families,
            events,
        })
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn families(&self) -> u8 {
        self.families
    }

    pub fn events(&self) -> &[ClockEvent] {
        &self.events
    }

    /// Events with time `<= t`.
    pub fn events_until(&self, t: f64) -> &[ClockEvent] {
        let n = self.events.partition_point(|e| e.time <= t);
        &self.events[..n]
    }

    pub fn family_events(&self, family: u8) -> impl Iterator<Item = &ClockEvent> + '_ {
        self.events.iter().filter(move |e| e.family == family)
    }

    pub fn edge_times(&self, family: u8, edge: usize) -> Vec<f64> {
        self.family_events(family)
            .filter(|e| e.edge as usize == edge)
            .map(|e| e.time)
            .collect()
    }

    pub fn edge_counts(&self, family: u8) -> Vec<u32> {
        let mut c = alloc::vec![0u32; self.torus.edges()];
        for e in self.family_events(family) {
            c[e.edge as usize] += 1;
        }
        c
    }
}

/// Lazily generated rings of all clocks, in time order.
///
/// The superposition of `families * W` independent rate-1/2 processes is a
/// single Poisson process of rate `families * W / 2` whose points carry
/// independent uniform (edge, family) marks.
pub struct EventStream<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    rate: f64,
    marks: u64,
    width: u64,
    t: f64,
    t_max: f64,
}

impl<'a, R: Rng + ?Sized> EventStream<'a, R> {
    pub fn new(torus: Torus, t_max: f64, families: u8, rng: &'a mut R) -> Result<Self> {
        check_horizon(t_max)?;
        check_families(families)?;
        let width = torus.edges() as u64;
        let marks = width * u64::from(families);
        Ok(EventStream {
            rng,
            rate: marks as f64 * 0.5,
            marks,
            width,
            t: 0.0,
            t_max,
        })
    }
}

impl<R: Rng + ?Sized> Iterator for EventStream<'_, R> {
    type Item = ClockEvent;

    #[inline]
    fn next(&mut self) -> Option<ClockEvent> {
        let gap: f64 = self.rng.sample(Exp1);
        self.t += gap / self.rate;
        if self.t > self.t_max {
            self.t = f64::INFINITY;
            return None;
        }
        let m = self.rng.gen_range(0..self.marks);
        Some(ClockEvent {
            time: self.t,
            edge: (m % self.width) as u32,
            family: (m / self.width) as u8 + 1,
        })
    }
}

/// Independent rate-1/2 clocks on every edge for each of `families` families.
pub fn sample_clocks<R: Rng + ?Sized>(torus: Torus, t_max: f64, families: u8, rng: &mut R) -> Result<ClockField> {
    let events = EventStream::new(torus, t_max, families, rng)?.collect();
    Ok(ClockField {
        torus,
        t_max,
        families,
        events,
    })
}
