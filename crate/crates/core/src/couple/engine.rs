use alloc::vec;
use alloc::vec::Vec;

use super::{build_matching, is_good_pair, CouplingPlan};
use crate::dynamics::{sample_initial, Configuration, EventStream, Swap, Torus, TrajectoryRecord};
use crate::error::check_unit;
use crate::rng::{Purpose, Stream};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Torus carrying the coupling: `H` plus `margin` sites on each side, site
/// `i` standing for `h_lo - margin + i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CouplingTorus {
    pub torus: Torus,
    pub margin: usize,
    pub origin: i64,
}

impl CouplingTorus {
    /// Margin `ceil(sqrt(t)) + L`.
    pub fn for_plan(plan: &CouplingPlan) -> Result<Self> {
        let margin = libm::ceil(libm::sqrt(plan.t as f64)) as usize + plan.block;
        CouplingTorus::with_margin(plan, margin)
    }

    pub fn with_margin(plan: &CouplingPlan, margin: usize) -> Result<Self> {
        Ok(CouplingTorus {
            torus: Torus::new(plan.h_len() + 2 * margin)?,
            margin,
            origin: plan.h_lo - margin as i64,
        })
    }

    pub fn position(&self, site: usize) -> i64 {
        self.origin + site as i64
    }

    pub fn site(&self, x: i64) -> usize {
        self.torus.wrap(x - self.origin)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CouplingDiagnostics {
    /// An η-particle that was outside `H` at some time sits in `I` at `t`.
    pub a: bool,
    /// Some coupling time (0 included) saw a pair that is not good.
    pub b: bool,
    /// `η_t(x) > ξ_t(x)` for some `x` in `I`.
    pub c: bool,
    /// The last matching exists and each of its pairs has met.
    pub all_met: bool,
    /// Coupling-time indices with a non-good pair; 0 is the initial time.
    pub non_good: Vec<usize>,
    /// Meeting times of the pairs of the last matching (`None` if unmet).
    pub meeting_times: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledRun {
    pub geometry: CouplingTorus,
    pub eta_t: Vec<u8>,
    pub xi_t: Vec<u8>,
    /// ξ as initial state plus swaps, when recording was asked for.
    pub xi_record: Option<TrajectoryRecord>,
    pub diagnostics: CouplingDiagnostics,
}

impl CoupledRun {
    pub fn occupancy_on(&self, cfg: &[u8], plan: &CouplingPlan) -> Vec<u8> {
        (plan.a..=plan.b).map(|x| cfg[self.geometry.site(x)]).collect()
    }

    /// `η_t <= ξ_t` on `I`.
    pub fn dominates_on_i(&self, plan: &CouplingPlan) -> bool {
        (plan.a..=plan.b).all(|x| {
            let s = self.geometry.site(x);
            self.eta_t[s] <= self.xi_t[s]
        })
    }
}

struct Engine<'a> {
    plan: &'a CouplingPlan,
    geo: CouplingTorus,
    eta_id: Vec<u32>,
    xi_id: Vec<u32>,
    partner: Vec<u32>,
    outside: Vec<bool>,
    met: Vec<Option<f64>>,
    matched: bool,
    diag: CouplingDiagnostics,
}

fn ids(cfg: &[u8]) -> (Vec<u32>, u32) {
    let mut next = 0u32;
    let v = cfg
        .iter()
        .map(|&o| {
            if o == 1 {
                next += 1;
                next - 1
            } else {
                NONE
            }
        })
        .collect();
    (v, next)
}

impl Engine<'_> {
    #[inline]
    fn pair_at(&self, s: usize) -> bool {
        let p = self.eta_id[s];
        p != NONE && self.partner[p as usize] != NONE && self.partner[p as usize] == self.xi_id[s]
    }

    fn h_slice(&self, v: &[u32]) -> Vec<u8> {
        let m = self.geo.margin;
        v[m..m + self.plan.h_len()].iter().map(|&p| u8::from(p != NONE)).collect()
    }

    fn rematch(&mut self, index: usize, time: f64, rebuild: bool) -> Result<()> {
        let eta = self.h_slice(&self.eta_id);
        let xi = self.h_slice(&self.xi_id);
        let good = is_good_pair(&eta, &xi, self.plan)?;
        if !good {
            self.diag.b = true;
            self.diag.non_good.push(index);
        }
        if !rebuild {
            return Ok(());
        }
        self.partner.iter_mut().for_each(|p| *p = NONE);
        self.met.iter_mut().for_each(|m| *m = None);
        self.matched = good;
        if good {
            for pair in build_matching(&eta, &xi, self.plan)?.pairs {
                let pe = self.eta_id[self.geo.site(pair.eta)];
                let px = self.xi_id[self.geo.site(pair.xi)];
                self.partner[pe as usize] = px;
                if pair.met {
                    self.met[pe as usize] = Some(time);
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn mark_outside(&mut self, s: usize) {
        let p = self.eta_id[s];
        if p != NONE && !self.plan.in_h(self.geo.position(s)) {
            self.outside[p as usize] = true;
        }
    }

    #[inline]
    fn mark_met(&mut self, s: usize, time: f64) {
        if self.pair_at(s) {
            let p = self.eta_id[s] as usize;
            if self.met[p].is_none() {
                self.met[p] = Some(time);
            }
        }
    }
}

/// Runs the coupling from given initial states (both over the whole torus)
/// with clocks drawn from `clocks`.
pub fn coupled_evolve_from(
    eta0: &[u8],
    xi0: &[u8],
    plan: &CouplingPlan,
    geo: CouplingTorus,
    clocks: Stream,
    record_xi: bool,
) -> Result<CoupledRun> {
    let w = geo.torus.size();
    if eta0.len() != w || xi0.len() != w {
        return Err(Error::Invalid("initial states must cover the coupling torus".into()));
    }
    let (eta_id, n_eta) = ids(eta0);
    let (xi_id, _) = ids(xi0);
    let mut eng = Engine {
        plan,
        geo,
        eta_id,
        xi_id,
        partner: vec![NONE; n_eta as usize],
        outside: vec![false; n_eta as usize],
        met: vec![None; n_eta as usize],
        matched: false,
        diag: CouplingDiagnostics::default(),
    };
    for s in 0..w {
        eng.mark_outside(s);
    }
    eng.rematch(0, 0.0, true)?;
    let t_end = plan.t as f64;
    let mut swaps = Vec::new();
    let mut next = 0;
    let mut rng = clocks.purpose(Purpose::Clocks).rng();
    for ev in EventStream::new(geo.torus, t_end, 2, &mut rng)? {
        while next < plan.times.len() && plan.times[next] < ev.time {
            let tau = plan.times[next];
            eng.rematch(next + 1, tau, tau < t_end)?;
            next += 1;
        }
        let (a, b) = geo.torus.edge_ends(ev.edge as usize);
        let paired = eng.pair_at(a) || eng.pair_at(b);
        if ev.family == 2 {
            eng.xi_id.swap(a, b);
            if record_xi {
                swaps.push(Swap {
                    time: ev.time,
                    edge: ev.edge,
                });
            }
        }
        if (ev.family == 2) == paired {
            eng.eta_id.swap(a, b);
            eng.mark_outside(a);
            eng.mark_outside(b);
        }
        eng.mark_met(a, ev.time);
        eng.mark_met(b, ev.time);
    }
    while next < plan.times.len() {
        let tau = plan.times[next];
        eng.rematch(next + 1, tau, tau < t_end)?;
        next += 1;
    }
    let eta_t: Vec<u8> = eng.eta_id.iter().map(|&p| u8::from(p != NONE)).collect();
    let xi_t: Vec<u8> = eng.xi_id.iter().map(|&p| u8::from(p != NONE)).collect();
    let mut d = eng.diag;
    for x in plan.a..=plan.b {
        let s = geo.site(x);
        let p = eng.eta_id[s];
        if p != NONE {
            d.c |= xi_t[s] == 0;
            d.a |= eng.outside[p as usize];
        }
    }
    d.meeting_times = (0..n_eta as usize)
        .filter(|&p| eng.partner[p] != NONE)
        .map(|p| eng.met[p])
        .collect();
    d.all_met = eng.matched && d.meeting_times.iter().all(Option::is_some);
    let xi_record = if record_xi {
        Some(TrajectoryRecord::new(Configuration::new(xi0.to_vec(), 0.0)?, swaps, t_end)?)
    } else {
        None
    };
    Ok(CoupledRun {
        geometry: geo,
        eta_t,
        xi_t,
        xi_record,
        diagnostics: d,
    })
}

/// Independent product initial states at `rho < rho_prime`, then the coupling.
pub fn coupled_evolve(rho: f64, rho_prime: f64, plan: &CouplingPlan, stream: Stream, record_xi: bool) -> Result<CoupledRun> {
    check_unit("rho", rho)?;
    check_unit("rho_prime", rho_prime)?;
    if rho >= rho_prime {
        return Err(Error::Invalid(alloc::format!("need rho < rho' (got {rho} and {rho_prime})")));
    }
    let geo = CouplingTorus::for_plan(plan)?;
    let eta0 = sample_initial(rho, geo.torus, &mut stream.purpose(Purpose::Eta).rng())?;
    let xi0 = sample_initial(rho_prime, geo.torus, &mut stream.purpose(Purpose::Xi).rng())?;
    coupled_evolve_from(eta0.as_slice(), xi0.as_slice(), plan, geo, stream, record_xi)
}
