use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use super::{chain_points, ScaleLadder};
use crate::precise::{decimal_ratio, f64_ratio, Precise};
use crate::{Error, Result};

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    /// The enclosures overlap.
    Undetermined,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined",
        }
    }

    fn from_le(r: Option<bool>) -> Verdict {
        match r {
            Some(true) => Verdict::Holds,
            Some(false) => Verdict::Fails,
            None => Verdict::Undetermined,
        }
    }
}

fn precise_f64(x: f64, name: &'static str) -> Result<Precise> {
    if !(x >= 0.0) {
        return Err(Error::OutOfRange {
            name,
            value: x,
            range: "[0, inf)",
        });
    }
    Precise::from_ratio(&f64_ratio(x)?)
}

fn one() -> Precise {
    Precise::from_u64(1)
}

/// One row of the probability recursion at level `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionRow {
    pub k: usize,
    /// `|M_{k+1}|`, the number of level-`k` regions a level-`(k+1)` failure uses.
    pub m: usize,
    /// `|M|^2 (p^2 + H(C1 l_k))` at the two ends of the `p_k` interval.
    pub rhs_low: Precise,
    pub rhs_high: Precise,
    /// Measured `p_{k+1}` interval, when supplied, does not lie above `rhs_high`.
    pub next_consistent: Option<bool>,
    /// `p_k <= l_k^{-4}`.
    pub trigger: Verdict,
    /// `100 (l_k^{-1} + l_k^7 H(C1 l_k))`.
    pub threshold: Precise,
    pub threshold_verdict: Verdict,
}

pub fn recursion_ledger<H>(
    ladder: &ScaleLadder,
    k: usize,
    p_k: (f64, f64),
    p_next: Option<(f64, f64)>,
    h: H,
    c1: u64,
) -> Result<RecursionRow>
where
    H: Fn(&BigUint) -> Result<Precise>,
{
    if !(p_k.0 <= p_k.1) || p_k.1 > 1.0 {
        return Err(Error::Invalid(format!("bad probability interval [{}, {}]", p_k.0, p_k.1)));
    }
    if c1 == 0 {
        return Err(Error::Invalid("C1 must be at least 1".into()));
    }
    let mut lad = ladder.clone();
    lad.extend_to(k + 1);
    let m = chain_points(&lad, k + 1)?.cardinality();
    let l = lad.l(k);
    let h_val = h(&(l * c1))?;
    let m2 = Precise::from_u64((m * m) as u64);
    let (lo, hi) = (precise_f64(p_k.0, "p_low")?, precise_f64(p_k.1, "p_high")?);
    let rhs_low = m2.mul(&lo.mul(&lo).add(&h_val));
    let rhs_high = m2.mul(&hi.mul(&hi).add(&h_val));
    let next_consistent = match p_next {
        Some((a, _)) => Some(precise_f64(a, "p_next_low")?.le(&rhs_high) != Some(false)),
        None => None,
    };
    let lp = Precise::from_uint(l);
    let target = lp.powi(4).recip()?;
    let trigger = if hi.le(&target) == Some(true) {
        Verdict::Holds
    } else if target.lt(&lo) == Some(true) {
        Verdict::Fails
    } else {
        Verdict::Undetermined
    };
    let threshold = Precise::from_u64(100).mul(&lp.recip()?.add(&lp.powi(7).mul(&h_val)));
    let threshold_verdict = Verdict::from_le(threshold.le(&one()));
    Ok(RecursionRow {
        k,
        m,
        rhs_low,
        rhs_high,
        next_consistent,
        trigger,
        threshold,
        threshold_verdict,
    })
}

/// `H(x) = x^{-power}`.
pub fn power_error(power: u64) -> impl Fn(&BigUint) -> Result<Precise> {
    move |x: &BigUint| Precise::from_uint(x).powi(power).recip()
}

/// `u_k = u_inf prod_{j >= k} (1 - l_j^{-δ})` as certified enclosures.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityLadder {
    pub delta: (u64, u32),
    pub u_inf: Precise,
    /// `1 - l_j^{-δ}` for `j < truncation`.
    pub factors: Vec<Precise>,
    /// `u_k` for `k <= truncation`, including the tail.
    pub u: Vec<Precise>,
    pub truncation: usize,
    /// Upper bound on `sum_{j >= truncation} l_j^{-δ}`.
    pub tail: Precise,
}

const TAIL: &str = "1e-30";

/// `δ = num/den` must lie in `(0, 1/8)`. The product is cut at the first `K`
/// with `l_K^{-δ} / (1 - floor(sqrt(l_K))^{-δ}) < 10^{-30}`, which bounds
/// the remaining sum since `l_{j+1} >= floor(sqrt(l_K)) l_j`.
pub fn density_ladder(u_inf: &str, delta: (u64, u32), ladder: &ScaleLadder) -> Result<DensityLadder> {
    let (num, den) = delta;
    if num == 0 || den == 0 || 8 * num >= den as u64 {
        return Err(Error::Invalid(format!("delta = {num}/{den} is outside (0, 1/8)")));
    }
    let u_ratio = decimal_ratio(u_inf)?;
    if u_ratio <= BigRational::from_integer(0.into()) || u_ratio > BigRational::one() {
        return Err(Error::Invalid(format!("target density {u_inf} is outside (0, 1]")));
    }
    let u_inf = Precise::from_ratio(&u_ratio)?;
    let neg_pow = |x: &BigUint| -> Result<Precise> { Precise::from_uint(x).pow_ratio(num, den)?.recip() };
    let cut = Precise::from_decimal(TAIL)?;
    let mut lad = ladder.clone();
    let mut factors = Vec::new();
    let mut k = 0;
    let tail = loop {
        lad.extend_to(k);
        let l = lad.l(k);
        let x = neg_pow(l)?;
        let ratio = neg_pow(&l.sqrt())?;
        let t = x.div(&one().sub(&ratio)?)?;
        if t.lt(&cut) == Some(true) {
            break t;
        }
        factors.push(one().sub(&x)?);
        k += 1;
        if k > 64 {
            return Err(Error::NoConvergence("density ladder truncation"));
        }
    };
    let keep = one().sub(&tail)?;
    let mut u = alloc::vec![Precise::zero(); k + 1];
    let mut acc = u_inf.clone();
    u[k] = acc.mul(&keep).hull(&acc);
    for j in (0..k).rev() {
        acc = acc.mul(&factors[j]);
        u[j] = acc.mul(&keep).hull(&acc);
    }
    Ok(DensityLadder {
        delta,
        u_inf,
        factors,
        u,
        truncation: k,
        tail,
    })
}

/// `L_k (1 - ρ/e)^{l_k/2}` against `l_k^{-4}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriggerBound {
    pub k: usize,
    pub rho: f64,
    pub bound: Precise,
    pub target: Precise,
    pub verdict: Verdict,
}

pub fn trigger_bound_exclusion(ladder: &ScaleLadder, k: usize, rho: f64) -> Result<TriggerBound> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho,
            range: "[0, 1]",
        });
    }
    if k > ladder.k_max() {
        return Err(Error::Invalid(format!("level {k} beyond the ladder")));
    }
    let r = precise_f64(rho, "rho")?;
    let base = one().sub(&r.mul(&Precise::exp_neg_one()))?;
    let l = ladder.l(k);
    let half = l / 2u32;
    let mut pow = base.powi(num_traits::ToPrimitive::to_u64(&half).ok_or_else(|| Error::Invalid("l_k too large".into()))?);
    if l.bit(0) {
        pow = pow.mul(&base.root(2)?);
    }
    let bound = Precise::from_uint(ladder.big_l(k)).mul(&pow);
    let target = Precise::from_uint(l).powi(4).recip()?;
    let verdict = Verdict::from_le(bound.lt(&target));
    Ok(TriggerBound {
        k,
        rho,
        bound,
        target,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_zero_probability() {
        let lad = ScaleLadder::from_u64(16, 3).unwrap();
        let row = recursion_ledger(&lad, 2, (0.0, 0.0), None, |_: &BigUint| Ok(Precise::zero()), 6).unwrap();
        assert_eq!(row.rhs_high.hi_f64(), 0.0);
        assert_eq!(row.trigger, Verdict::Holds);
        let row = recursion_ledger(&lad, 2, (0.5, 0.6), Some((0.9, 1.0)), power_error(8), 6).unwrap();
        assert_eq!(row.trigger, Verdict::Fails);
        assert_eq!(row.threshold_verdict, Verdict::Holds);
    }

    #[test]
    fn trigger_at_zero_density_is_the_side() {
        let lad = ScaleLadder::from_u64(16, 2).unwrap();
        let t = trigger_bound_exclusion(&lad, 2, 0.0).unwrap();
        assert_eq!(t.bound.lo_f64(), 1024.0);
        assert_eq!(t.verdict, Verdict::Fails);
    }

    #[test]
    fn delta_range() {
        let lad = ScaleLadder::from_u64(16, 1).unwrap();
        assert!(density_ladder("0.5", (1, 8), &lad).is_err());
        assert!(density_ladder("0.5", (0, 8), &lad).is_err());
        assert!(density_ladder("0", (1, 16), &lad).is_err());
    }
}
