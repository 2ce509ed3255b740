use alloc::format;
use libm::{exp, lgamma, log};

use super::{TailReport, TailRow};
use crate::error::check_unit;
use crate::stats::CompensatedSum;
use crate::{Error, Result};

/// Slack for deciding `k - np >= t` when `np + t` is an integer in exact
/// arithmetic but not in floating point.
const FUZZ: f64 = 1e-9;

pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let (nf, kf) = (n as f64, k as f64);
    exp(lgamma(nf + 1.0) - lgamma(kf + 1.0) - lgamma(nf - kf + 1.0) + kf * log(p) + (nf - kf) * log(1.0 - p))
}

/// `(P[X - np >= t], P[X - np <= -t])` by direct summation.
pub fn binomial_tails(n: u64, p: f64, t: f64) -> Result<(f64, f64)> {
    check_unit("p", p)?;
    let mean = n as f64 * p;
    let mut up = CompensatedSum::new();
    let mut down = CompensatedSum::new();
    for k in 0..=n {
        let d = k as f64 - mean;
        let w = binomial_pmf(n, p, k);
        if d >= t - FUZZ {
            up.add(w);
        }
        if d <= -t + FUZZ {
            down.add(w);
        }
    }
    Ok((up.value(), down.value()))
}

/// Both tails against `exp(-t/(2n))` and against `exp(-t^2/(2n))`.
pub fn binomial_corollary_report(ns: &[u64], ps: &[f64], ts: &[f64]) -> Result<TailReport> {
    let mut report = TailReport::default();
    for &n in ns {
        if n == 0 {
            return Err(Error::Invalid("binomial grid needs n >= 1".into()));
        }
        for &p in ps {
            for &t in ts {
                if !(t >= 0.0) {
                    return Err(Error::OutOfRange {
                        name: "t",
                        value: t,
                        range: "[0, inf)",
                    });
                }
                let (up, down) = binomial_tails(n, p, t)?;
                let point = format!("n={n};p={p};t={t}");
                let linear = exp(-t / (2.0 * n as f64));
                let square = exp(-t * t / (2.0 * n as f64));
                for (check, exact, bound) in [
                    ("binomial_upper", up, linear),
                    ("binomial_lower", down, linear),
                    ("binomial_upper_squared", up, square),
                    ("binomial_lower_squared", down, square),
                ] {
                    report.rows.push(TailRow {
                        check,
                        point: point.clone(),
                        exact,
                        bound,
                    });
                }
            }
        }
    }
    Ok(report)
}
