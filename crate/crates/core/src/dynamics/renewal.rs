//! Independent renewal chains with interarrival law `p_n ∝ exp(-n^{1/4})`,
//! `n >= 0`.
//!
//! Both laws are sampled exactly by rejection from continuous proposals, so no
//! truncation of the heavy stretched-exponential tail is involved:
//!
//! * `X = V^4` with `V ~ Gamma(4, 1)` has density `exp(-x^{1/4}) / 24`;
//!   accepting `n = floor(X)` with probability `exp(X^{1/4} - n^{1/4} - 1)`
//!   yields `p`.
//! * the stationary law `q_n ∝ sum_{j >= n} p_j` is `Uniform{0..J}` where
//!   `P[J = j] ∝ (j + 1) p_j`; `J` is drawn from the mixture
//!   `20160 * Gamma(8)^4 + 24 * Gamma(4)^4` (density `∝ (x + 1) exp(-x^{1/4})`)
//!   with acceptance `(j + 1) / (x + 1) * exp(x^{1/4} - j^{1/4} - 1)`.

use alloc::vec::Vec;
use libm::{exp, pow};
use rand::Rng;
use rand_distr::Exp1;

use super::Torus;

fn gamma_int<R: Rng + ?Sized>(shape: u32, rng: &mut R) -> f64 {
    (0..shape).map(|_| rng.sample::<f64, _>(Exp1)).sum()
}

#[inline]
fn quarter(x: f64) -> f64 {
    pow(x, 0.25)
}

/// One draw from the interarrival law `p`.
pub fn sample_interarrival<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let v = gamma_int(4, rng);
        let x = v * v * v * v;
        let n = libm::floor(x);
        let accept = exp(v - quarter(n) - 1.0);
        if rng.gen::<f64>() < accept {
            return n as u64;
        }
    }
}

/// One draw from the stationary law `q`.
pub fn sample_stationary<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    let j = loop {
        let shape = if rng.gen_range(0..20_184u32) < 20_160 { 8 } else { 4 };
        let v = gamma_int(shape, rng);
        let x = v * v * v * v;
        let j = libm::floor(x);
        let accept = (j + 1.0) / (x + 1.0) * exp(v - quarter(j) - 1.0);
        if rng.gen::<f64>() < accept {
            break j as u64;
        }
    };
    rng.gen_range(0..=j)
}

/// Countdown values `N_x(n)` for `n = 0..=horizon`, row-major in time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenewalHistory {
    width: usize,
    values: Vec<u64>,
}

impl RenewalHistory {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn horizon(&self) -> usize {
        self.values.len() / self.width - 1
    }

    pub fn value(&self, x: usize, n: usize) -> u64 {
        self.values[n * self.width + x]
    }

    pub fn row(&self, n: usize) -> &[u64] {
        &self.values[n * self.width..(n + 1) * self.width]
    }

    /// Site `(x, n)` is open iff the chain sits at zero.
    pub fn is_open(&self, x: usize, n: usize) -> bool {
        self.value(x, n) == 0
    }
}

/// Stationary start, then `N -> N - 1` while positive and a fresh
/// interarrival draw at zero.
pub fn evolve_renewal<R: Rng + ?Sized>(torus: Torus, horizon: usize, rng: &mut R) -> RenewalHistory {
    let w = torus.size();
    let mut values = Vec::with_capacity(w * (horizon + 1));
    values.extend((0..w).map(|_| sample_stationary(rng)));
    for n in 0..horizon {
        for x in 0..w {
            let cur = values[n * w + x];
            let next = if cur > 0 { cur - 1 } else { sample_interarrival(rng) };
            values.push(next);
        }
    }
    RenewalHistory { width: w, values }
}
