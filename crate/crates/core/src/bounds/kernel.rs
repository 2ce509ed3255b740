use alloc::format;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use libm::{ceil, exp, floor, lgamma, log, sqrt};

use super::{TailReport, TailRow};
use crate::stats::CompensatedSum;
use crate::{Error, Result};

/// Lazy-walk kernel `4^{-n} C(2n, n + x)`.
pub fn discrete_heat_kernel(n: u64, x: i64) -> f64 {
    if x.unsigned_abs() > n {
        return 0.0;
    }
    let (nf, xf) = (n as f64, x as f64);
    exp(lgamma(2.0 * nf + 1.0) - lgamma(nf + xf + 1.0) - lgamma(nf - xf + 1.0) - 2.0 * nf * core::f64::consts::LN_2)
}

fn binom(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

pub fn discrete_heat_kernel_exact(n: u64, x: i64) -> BigRational {
    if x.unsigned_abs() > n {
        return BigRational::from_integer(0u32.into());
    }
    let k = (n as i64 + x) as u64;
    BigRational::new(binom(2 * n, k).into(), (BigUint::one() << (2 * n)).into())
}

/// Outcome of the exact check `sqrt(n) p_n(0, x) <= ratio` for `n <= n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupCheck {
    pub n_max: u64,
    pub ratio: f64,
    pub first_failure: Option<u64>,
    /// `sqrt(n_max) p_{n_max}(0, 0)`.
    pub last_value: f64,
    /// Largest `sqrt(n) p_n(0, 0)` seen.
    pub sup: f64,
}

impl SupCheck {
    pub fn pass(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Integer check of `n C(2n,n)^2 den^2 <= num^2 16^n` with `ratio = num/den`
/// given as decimal digits `num` over `10^scale`; the supremum over `x` sits
/// at `x = 0`.
pub fn discrete_kernel_sup_check(n_max: u64, num: u64, scale: u32) -> SupCheck {
    let den = BigUint::from(10u32).pow(scale);
    let den2 = &den * &den;
    let num2 = BigUint::from(num) * BigUint::from(num);
    let mut c = BigUint::one();
    let mut first_failure = None;
    let mut sup = 0.0f64;
    let mut last_value = 0.0;
    for n in 1..=n_max {
        c = c * (2 * n) * (2 * n - 1) / (n * n);
        let lhs = &c * &c * n * &den2;
        let rhs = &num2 << (4 * n);
        if lhs > rhs && first_failure.is_none() {
            first_failure = Some(n);
        }
        let v = sqrt(n as f64) * discrete_heat_kernel(n, 0);
        sup = sup.max(v);
        last_value = v;
    }
    SupCheck {
        n_max,
        ratio: num as f64 / libm::pow(10.0, scale as f64),
        first_failure,
        last_value,
        sup,
    }
}

const KERNEL_BUDGET: u64 = 50_000_000;

/// Rate-1 walk kernel as a Poisson(2t) mixture of lazy steps. The sum is cut
/// at `K = ceil(4t) + 32`, beyond which the Poisson mass is at most
/// `exp(-32 c1)`.
pub fn continuous_heat_kernel(t: f64, x: i64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "(0, inf)",
        });
    }
    let lambda = 2.0 * t;
    let k_max = ceil(2.0 * lambda) as u64 + 32;
    if k_max > KERNEL_BUDGET {
        return Err(Error::Invalid(format!("kernel truncation at {k_max} terms exceeds budget")));
    }
    let ax = x.unsigned_abs();
    let ln_l = log(lambda);
    let mut acc = CompensatedSum::new();
    for k in ax..=k_max {
        let kf = k as f64;
        let ln_w = -lambda + kf * ln_l - lgamma(kf + 1.0);
        let xf = ax as f64;
        let ln_a = lgamma(2.0 * kf + 1.0) - lgamma(kf + xf + 1.0) - lgamma(kf - xf + 1.0) - 2.0 * kf * core::f64::consts::LN_2;
        acc.add(exp(ln_w + ln_a));
    }
    Ok(acc.value())
}

/// `e^{-t} I_0(t)`. The series is summed outward from its largest term; past
/// `k > t/2` the terms shrink geometrically and the remainder is bounded by
/// `term * r / (1 - r)`.
pub fn bessel_i0_scaled(t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let h2 = (t / 2.0) * (t / 2.0);
    let mode = floor(t / 2.0) as u64;
    let log_term = |k: u64| -t + 2.0 * k as f64 * log(t / 2.0) - 2.0 * lgamma(k as f64 + 1.0);
    let top = exp(log_term(mode));
    let mut acc = CompensatedSum::new();
    acc.add(top);
    let mut term = top;
    let mut k = mode;
    while k > 0 && term > 0.0 {
        term *= (k * k) as f64 / h2;
        k -= 1;
        acc.add(term);
        if term < 1e-22 * acc.value() {
            break;
        }
    }
    term = top;
    k = mode;
    loop {
        k += 1;
        term *= h2 / (k * k) as f64;
        acc.add(term);
        let r = h2 / ((k + 1) * (k + 1)) as f64;
        if term == 0.0 || (r < 1.0 && term * r / (1.0 - r) < 1e-20 * acc.value()) {
            break;
        }
        if k > 1_000_000_000 {
            return Err(Error::NoConvergence("Bessel series"));
        }
    }
    Ok(acc.value())
}

/// `sqrt(t) p_t(0, x) <= bound` on `ts` and `xs`, plus the Bessel
/// comparison at `x = 0` on `bessel_ts`.
pub fn continuous_kernel_report(ts: &[f64], xs: &[i64], bound: f64, bessel_ts: &[f64], digits: u32) -> Result<TailReport> {
    let mut report = TailReport::default();
    for &t in ts {
        for &x in xs {
            let p = continuous_heat_kernel(t, x)?;
            report.rows.push(TailRow {
                check: "kernel_continuous_sqrt_t",
                point: format!("t={t};x={x}"),
                exact: sqrt(t) * p,
                bound,
            });
        }
    }
    let tol = libm::pow(10.0, -(digits as f64));
    for &t in bessel_ts {
        let a = continuous_heat_kernel(t, 0)?;
        let b = bessel_i0_scaled(t)?;
        report.rows.push(TailRow {
            check: "kernel_continuous_vs_bessel",
            point: format!("t={t}"),
            exact: libm::fabs((a - b) / b),
            bound: tol,
        });
    }
    Ok(report)
}
