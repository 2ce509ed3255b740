use alloc::format;
use alloc::vec::Vec;
use num_integer::Roots;

use crate::{Error, Result};

/// Geometry and schedule of the interval coupling for `I = [a, b]` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingPlan {
    pub a: i64,
    pub b: i64,
    pub t: u64,
    /// `floor(t^{1/4})`, the length of every `I_j`.
    pub block: usize,
    pub h_lo: i64,
    /// Inclusive; `h_hi - h_lo + 1` is a multiple of `block`.
    pub h_hi: i64,
    /// `k t^{3/4}` for `k = 1..=block`.
    pub times: Vec<f64>,
}

pub fn make_plan(a: i64, b: i64, t: u64) -> Result<CouplingPlan> {
    if t < 16 {
        return Err(Error::Invalid(format!("coupling needs t >= 16, got {t}")));
    }
    if a > b {
        return Err(Error::Invalid(format!("empty interval [{a}, {b}]")));
    }
    let block = t.nth_root(4);
    let pad = 3 * t as i64;
    let h_lo = a - pad;
    let mut h_hi = b + pad;
    let n = (h_hi - h_lo + 1) as u64;
    h_hi += ((block - n % block) % block) as i64;
    let step = t as f64 / block as f64;
    let quarter = libm::pow(t as f64, 0.75);
    // exact for perfect fourth powers
    let step = if block.pow(4) == t { step } else { quarter };
    let times = (1..=block).map(|k| k as f64 * step).filter(|&s| s <= t as f64).collect();
    Ok(CouplingPlan {
        a,
        b,
        t,
        block: block as usize,
        h_lo,
        h_hi,
        times,
    })
}

impl CouplingPlan {
    pub fn h_len(&self) -> usize {
        (self.h_hi - self.h_lo + 1) as usize
    }

    pub fn blocks(&self) -> usize {
        self.h_len() / self.block
    }

    /// Index of the `I_j` holding `x`, if `x` is in `H`.
    pub fn block_of(&self, x: i64) -> Option<usize> {
        (self.h_lo..=self.h_hi).contains(&x).then(|| (x - self.h_lo) as usize / self.block)
    }

    pub fn in_h(&self, x: i64) -> bool {
        (self.h_lo..=self.h_hi).contains(&x)
    }

    pub fn in_i(&self, x: i64) -> bool {
        (self.a..=self.b).contains(&x)
    }

    /// `(6t + 2) e^{-t}`.
    pub fn bound_a(&self) -> f64 {
        (6.0 * self.t as f64 + 2.0) * libm::exp(-(self.t as f64))
    }

    /// `2 t |H| exp(-L (ρ' - ρ)^2 / 8)`.
    pub fn bound_b(&self, rho: f64, rho_prime: f64) -> f64 {
        let d = rho_prime - rho;
        2.0 * self.t as f64 * self.h_len() as f64 * libm::exp(-(self.block as f64) * d * d / 8.0)
    }

    /// `|H| exp(-(t^{1/4} / 32) log t)`.
    pub fn bound_c(&self) -> f64 {
        let t = self.t as f64;
        self.h_len() as f64 * libm::exp(-libm::pow(t, 0.25) / 32.0 * libm::log(t))
    }
}

/// `σ_j(η) < σ_j(ξ)` on every block; both slices index `H` from `h_lo`.
pub fn is_good_pair(eta: &[u8], xi: &[u8], plan: &CouplingPlan) -> Result<bool> {
    let n = plan.h_len();
    if eta.len() != n || xi.len() != n {
        return Err(Error::Invalid(format!("configurations must cover the {n} sites of H")));
    }
    Ok(eta
        .chunks(plan.block)
        .zip(xi.chunks(plan.block))
        .all(|(e, x)| e.iter().map(|&v| v as usize).sum::<usize>() < x.iter().map(|&v| v as usize).sum::<usize>()))
}

/// One matched pair, positions relative to the integer line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchedPair {
    pub eta: i64,
    pub xi: i64,
    pub block: usize,
    pub met: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingState {
    pub pairs: Vec<MatchedPair>,
}

impl MatchingState {
    pub fn partner_of(&self, eta: i64) -> Option<i64> {
        self.pairs.iter().find(|p| p.eta == eta).map(|p| p.xi)
    }
}

/// Per block: co-located particles first, then the remaining ones in
/// increasing position. Pairs sharing a site are always paired with each
/// other, so pairs that met before are kept.
pub fn build_matching(eta: &[u8], xi: &[u8], plan: &CouplingPlan) -> Result<MatchingState> {
    if !is_good_pair(eta, xi, plan)? {
        return Err(Error::NotGood);
    }
    let mut pairs = Vec::new();
    for j in 0..plan.blocks() {
        let base = j * plan.block;
        let pos = |i: usize| plan.h_lo + (base + i) as i64;
        let (e, x) = (&eta[base..base + plan.block], &xi[base..base + plan.block]);
        let mut rest_e = Vec::new();
        let mut rest_x = Vec::new();
        for i in 0..plan.block {
            match (e[i], x[i]) {
                (1, 1) => pairs.push(MatchedPair {
                    eta: pos(i),
                    xi: pos(i),
                    block: j,
                    met: true,
                }),
                (1, _) => rest_e.push(pos(i)),
                (_, 1) => rest_x.push(pos(i)),
                _ => {}
            }
        }
        for (pe, px) in rest_e.into_iter().zip(rest_x) {
            pairs.push(MatchedPair {
                eta: pe,
                xi: px,
                block: j,
                met: false,
            });
        }
    }
    Ok(MatchingState { pairs })
}
