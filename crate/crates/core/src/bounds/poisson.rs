use alloc::format;
use libm::{ceil, exp, floor, lgamma, log};

use super::{TailReport, TailRow};
use crate::stats::CompensatedSum;
use crate::{Error, Result};

/// `ln 3`, the minimiser of `e^{-θ} + θ/3`.
pub const DEFAULT_THETA: f64 = 1.098_612_288_668_109_8;

const STOP: f64 = 1e-20;

fn log_pmf(lambda: f64, k: u64) -> f64 {
    -lambda + k as f64 * log(lambda) - lgamma(k as f64 + 1.0)
}

pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    exp(log_pmf(lambda, k))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "(0, inf)",
        })
    }
}

/// `sum_{j >= m} p_j`, walking up from `m > λ`.
fn sum_up(lambda: f64, m: u64) -> f64 {
    let mut term = poisson_pmf(lambda, m);
    let mut acc = CompensatedSum::new();
    let mut k = m;
    while term > 0.0 {
        acc.add(term);
        k += 1;
        term *= lambda / k as f64;
        // the rest is dominated by a geometric series of ratio lambda / (k + 1)
        let r = lambda / (k + 1) as f64;
        if r < 1.0 && term / (1.0 - r) < STOP * acc.value() {
            break;
        }
    }
    acc.value()
}

/// `sum_{j <= k} p_j`, walking down from `k < λ`.
fn sum_down(lambda: f64, k: u64) -> f64 {
    let mut term = poisson_pmf(lambda, k);
    let mut acc = CompensatedSum::new();
    let mut j = k;
    while term > 0.0 {
        acc.add(term);
        if j == 0 {
            break;
        }
        term *= j as f64 / lambda;
        j -= 1;
        let r = j as f64 / lambda;
        if r < 1.0 && term / (1.0 - r) < STOP * acc.value() {
            break;
        }
    }
    acc.value()
}

/// `P[X >= m]` for `X ~ Poisson(λ)`.
pub fn poisson_tail_exact(lambda: f64, m: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if m == 0 {
        return Ok(1.0);
    }
    if m as f64 > lambda {
        Ok(sum_up(lambda, m))
    } else {
        Ok((1.0 - sum_down(lambda, m - 1)).max(0.0))
    }
}

/// `P[X <= k]`.
pub fn poisson_cdf_exact(lambda: f64, k: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if (k as f64) < lambda {
        Ok(sum_down(lambda, k))
    } else {
        Ok((1.0 - sum_up(lambda, k + 1)).max(0.0))
    }
}

/// Root of `e^c - 1 = 2c` in `[1, 2]`.
pub fn c1() -> Result<f64> {
    let f = |c: f64| exp(c) - 1.0 - 2.0 * c;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return Err(Error::NoConvergence("bisection for c1"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence("bisection for c1"))
}

/// `1 - e^{-θ} - θ/3`.
pub fn c2(theta: f64) -> f64 {
    1.0 - exp(-theta) - theta / 3.0
}

/// `1 - e/3`, valid for `μ >= 3λ`.
pub fn c3() -> f64 {
    1.0 - core::f64::consts::E / 3.0
}

/// Exact tails against the four Poisson bounds on `lambdas x ts`:
///
/// * `P[X >= 2λ + t] <= e^{-c1 t}`
/// * `P[X <= λ/3] <= e^{-c2 λ}`
/// * `P[X >= 3λ] <= e^{-λ}`
/// * `P[X >= μ] <= e^{-c3 (λ + μ)}` for `μ = 3λ + t` and `μ = 3λ`
pub fn poisson_lemma_report(lambdas: &[f64], ts: &[f64], theta: f64) -> Result<TailReport> {
    let c1 = c1()?;
    let c2 = c2(theta);
    let c3 = c3();
    if c2 <= 0.0 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "values with 1 - exp(-theta) - theta/3 > 0",
        });
    }
    let mut report = TailReport::default();
    for &lambda in lambdas {
        check_lambda(lambda)?;
        for &t in ts {
            if !(t > 0.0) {
                return Err(Error::OutOfRange {
                    name: "t",
                    value: t,
                    range: "(0, inf)",
                });
            }
            report.rows.push(TailRow {
                check: "poisson_above_2lambda",
                point: format!("lambda={lambda};t={t}"),
                exact: poisson_tail_exact(lambda, ceil(2.0 * lambda + t) as u64)?,
                bound: exp(-c1 * t),
            });
            let mu = 3.0 * lambda + t;
            report.rows.push(TailRow {
                check: "poisson_above_mu",
                point: format!("lambda={lambda};mu={mu}"),
                exact: poisson_tail_exact(lambda, ceil(mu) as u64)?,
                bound: exp(-c3 * (lambda + mu)),
            });
        }
        report.rows.push(TailRow {
            check: "poisson_below_third",
            point: format!("lambda={lambda};theta={theta}"),
            exact: poisson_cdf_exact(lambda, floor(lambda / 3.0) as u64)?,
            bound: exp(-c2 * lambda),
        });
        report.rows.push(TailRow {
            check: "poisson_above_3lambda",
            point: format!("lambda={lambda}"),
            exact: poisson_tail_exact(lambda, ceil(3.0 * lambda) as u64)?,
            bound: exp(-lambda),
        });
        report.rows.push(TailRow {
            check: "poisson_above_mu",
            point: format!("lambda={lambda};mu={}", 3.0 * lambda),
            exact: poisson_tail_exact(lambda, ceil(3.0 * lambda) as u64)?,
            bound: exp(-c3 * 4.0 * lambda),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(poisson_tail_exact(3.0, 0).unwrap(), 1.0);
        let a = poisson_tail_exact(1.0, 1).unwrap();
        assert!((a - (1.0 - exp(-1.0))).abs() < 1e-16);
        assert!(poisson_tail_exact(0.0, 1).is_err());
        let c = c1().unwrap();
        assert!((exp(c) - 1.0 - 2.0 * c).abs() < 1e-12);
        assert!((DEFAULT_THETA - log(3.0)).abs() < 1e-15);
    }

    #[test]
    fn tail_and_cdf_are_complementary() {
        for &lambda in &[0.5, 3.0, 20.0, 400.0] {
            for m in [1u64, 2, 5, 19, 20, 21, 60, 390, 410] {
                let s = poisson_tail_exact(lambda, m).unwrap() + poisson_cdf_exact(lambda, m - 1).unwrap();
                assert!((s - 1.0).abs() < 1e-13, "lambda {lambda} m {m}: {s}");
            }
        }
    }
}
