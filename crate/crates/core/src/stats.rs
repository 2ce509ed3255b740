//! Estimators and exact binomial machinery.

use crate::{Error, Result};
use libm::{exp, fabs, lgamma, log, sqrt};

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if fabs(self.sum) >= fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            sqrt(self.variance() / self.n as f64)
        }
    }
}

impl FromIterator<f64> for MeanVar {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanVar::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// A count of successes among independent trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        debug_assert!(successes <= trials);
        Proportion { successes, trials }
    }

    pub fn from_flags<I: IntoIterator<Item = bool>>(flags: I) -> Self {
        let (mut s, mut n) = (0, 0);
        for f in flags {
            n += 1;
            s += u64::from(f);
        }
        Proportion::new(s, n)
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn se(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.estimate();
        sqrt(p * (1.0 - p) / self.trials as f64)
    }

    /// Exact two-sided Clopper-Pearson interval at level `1 - alpha`.
    pub fn clopper_pearson(&self, alpha: f64) -> (f64, f64) {
        let (k, n) = (self.successes as f64, self.trials as f64);
        if self.trials == 0 {
            return (0.0, 1.0);
        }
        let lo = if self.successes == 0 {
            0.0
        } else {
            beta_quantile(alpha / 2.0, k, n - k + 1.0)
        };
        let hi = if self.successes == self.trials {
            1.0
        } else {
            beta_quantile(1.0 - alpha / 2.0, k + 1.0, n - k)
        };
        (lo, hi)
    }
}

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

fn beta_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..100_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Regularised incomplete beta function `I_x(a, b)`.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x);
    let front = exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if incomplete_beta(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P[X <= k]` for `X ~ Binomial(n, p)`.
pub fn binomial_cdf(k: u64, n: u64, p: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    incomplete_beta((n - k) as f64, (k + 1) as f64, 1.0 - p)
}

/// `P[X >= k]` for `X ~ Binomial(n, p)`.
pub fn binomial_sf(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    incomplete_beta(k as f64, (n - k + 1) as f64, p)
}

/// Two-sided exact binomial test p-value (doubling the smaller tail).
pub fn binomial_two_sided(k: u64, n: u64, p: f64) -> f64 {
    let lower = binomial_cdf(k, n, p);
    let upper = binomial_sf(k, n, p);
    let v = 2.0 * lower.min(upper);
    v.min(1.0)
}

/// Least-squares fit `y = intercept + slope x`; returns
/// `(slope, intercept, slope standard error)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Invalid("linear fit needs two or more paired values".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("linear fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum();
        sqrt(rss / (n - 2.0) / sxx)
    } else {
        0.0
    };
    Ok((slope, intercept, se))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_binomial_cdf(k: u64, n: u64, p: f64) -> f64 {
        // direct pmf summation in log space
        (0..=k)
            .map(|j| {
                let ln = lgamma(n as f64 + 1.0) - lgamma(j as f64 + 1.0) - lgamma((n - j) as f64 + 1.0)
                    + j as f64 * log(p)
                    + (n - j) as f64 * log(1.0 - p);
                exp(ln)
            })
            .sum()
    }

    #[test]
    fn binomial_cdf_matches_summation() {
        for &(k, n, p) in &[(3u64, 10u64, 0.5), (0, 7, 0.3), (40, 100, 0.45), (480, 1000, 0.5)] {
            let a = binomial_cdf(k, n, p);
            let b = exact_binomial_cdf(k, n, p);
            assert!(fabs(a - b) < 1e-12, "{k} {n} {p}: {a} vs {b}");
            let sf = binomial_sf(k + 1, n, p);
            assert!(fabs(a + sf - 1.0) < 1e-12);
        }
    }

    #[test]
    fn clopper_pearson_known_values() {
        // 0 of 10: upper = 1 - 0.025^(1/10)
        let (lo, hi) = Proportion::new(0, 10).clopper_pearson(0.05);
        assert_eq!(lo, 0.0);
        assert!(fabs(hi - (1.0 - libm::pow(0.025, 0.1))) < 1e-10);
        let (lo, hi) = Proportion::new(5, 10).clopper_pearson(0.05);
        assert!(fabs(lo - 0.187_086_028_447_398_8) < 1e-9);
        assert!(fabs(hi - 0.812_913_971_552_601_2) < 1e-9);
    }

    #[test]
    fn mean_var_and_fit() {
        let acc: MeanVar = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(acc.mean(), 2.5);
        assert!(fabs(acc.variance() - 5.0 / 3.0) < 1e-15);
        let (s, i, se) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!(fabs(s - 2.0) < 1e-15 && fabs(i - 1.0) < 1e-15 && se < 1e-12);
    }
}
