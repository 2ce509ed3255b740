//! Certified arbitrary-precision bounds for non-negative reals.
//!
//! A [`Precise`] value is a closed interval `[lo, hi]` whose endpoints are
//! dyadic numbers `m * 2^e` with a bounded mantissa. Every operation rounds
//! the lower endpoint down and the upper endpoint up, so the true value of the
//! computed expression is always enclosed. Only non-negative quantities are
//! supported; subtraction clamps a negative lower endpoint to zero.

use alloc::string::{String, ToString};
use alloc::format;
use core::cmp::Ordering;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::{Error, Result};

/// Mantissa width used when none is requested explicitly (about 96 digits).
pub const DEFAULT_BITS: u64 = 320;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Dyadic {
    m: BigUint,
    e: i64,
}

impl Dyadic {
    fn zero() -> Self {
        Dyadic { m: BigUint::zero(), e: 0 }
    }

    fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn rounded(m: BigUint, e: i64, bits: u64, up: bool) -> Self {
        if m.is_zero() {
            return Dyadic::zero();
        }
        let len = m.bits();
        if len <= bits {
            return Dyadic { m, e };
        }
        let shift = len - bits;
        let mut q = &m >> shift;
        if up && (&q << shift) != m {
            q += 1u32;
        }
        Dyadic { m: q, e: e + shift as i64 }
    }

    fn mul(&self, o: &Dyadic, bits: u64, up: bool) -> Self {
        Dyadic::rounded(&self.m * &o.m, self.e + o.e, bits, up)
    }

    fn aligned(&self, o: &Dyadic) -> (BigUint, BigUint, i64) {
        if self.is_zero() {
            return (BigUint::zero(), o.m.clone(), o.e);
        }
        if o.is_zero() {
            return (self.m.clone(), BigUint::zero(), self.e);
        }
        let e = self.e.min(o.e);
        (
            &self.m << (self.e - e) as u64,
            &o.m << (o.e - e) as u64,
            e,
        )
    }

    fn add(&self, o: &Dyadic, bits: u64, up: bool) -> Self {
        let (a, b, e) = self.aligned(o);
        Dyadic::rounded(a + b, e, bits, up)
    }

    /// `self - o`, or `None` when negative.
    fn sub(&self, o: &Dyadic, bits: u64, up: bool) -> Option<Self> {
        let (a, b, e) = self.aligned(o);
        if a < b {
            None
        } else {
            Some(Dyadic::rounded(a - b, e, bits, up))
        }
    }

    fn div(&self, o: &Dyadic, bits: u64, up: bool) -> Self {
        debug_assert!(!o.is_zero());
        if self.is_zero() {
            return Dyadic::zero();
        }
        let s = (bits + o.m.bits() + 2).saturating_sub(self.m.bits());
        let num = &self.m << s;
        let (q, r) = num.div_rem(&o.m);
        let q = if up && !r.is_zero() { q + 1u32 } else { q };
        Dyadic::rounded(q, self.e - s as i64 - o.e, bits, up)
    }

    fn root(&self, n: u32, bits: u64, up: bool) -> Self {
        if self.is_zero() || n == 1 {
            return self.clone();
        }
        let n64 = i64::from(n);
        let want = u64::from(n) * (bits + 2);
        let mut s = want.saturating_sub(self.m.bits()) as i64;
        // exponent after shifting must be divisible by n
        let r = (self.e - s).rem_euclid(n64);
        s += r;
        let shifted = &self.m << s as u64;
        let mut q = shifted.nth_root(n);
        if up && Pow::pow(&q, n) != shifted {
            q += 1u32;
        }
        Dyadic::rounded(q, (self.e - s) / n64, bits, up)
    }

    fn cmp(&self, o: &Dyadic) -> Ordering {
        let (a, b, _) = self.aligned(o);
        a.cmp(&b)
    }

    fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.m.bits();
        let shift = len.saturating_sub(60);
        let top = (&self.m >> shift).to_u64().unwrap_or(0) as f64;
        let exp = self.e + shift as i64;
        top * libm::pow(2.0, exp as f64)
    }

    /// Decimal digits `d` (truncated) and base-10 exponent so the value is
    /// about `0.d * 10^(exp+1)`.
    fn decimal(&self, digits: usize) -> (String, i64) {
        if self.is_zero() {
            return ("0".repeat(digits.max(1)), 0);
        }
        let log10 = (self.m.bits() as i64 + self.e) as f64 * core::f64::consts::LOG10_2;
        let s = digits as i64 + 2 - libm::floor(log10) as i64;
        let ten = BigUint::from(10u32);
        let (mut num, mut den) = (self.m.clone(), BigUint::one());
        if s >= 0 {
            num *= Pow::pow(&ten, s as u64);
        } else {
            den *= Pow::pow(&ten, (-s) as u64);
        }
        if self.e >= 0 {
            num <<= self.e as u64;
        } else {
            den <<= (-self.e) as u64;
        }
        let q = (num / den).to_string();
        let exp = q.len() as i64 - 1 - s;
        let mut d: String = q.chars().take(digits).collect();
        while d.len() < digits {
            d.push('0');
        }
        (d, exp)
    }
}

fn sci(d: &Dyadic, digits: usize) -> String {
    let (ds, exp) = d.decimal(digits);
    let (head, tail) = ds.split_at(1);
    if tail.is_empty() {
        format!("{head}e{exp}")
    } else {
        format!("{head}.{tail}e{exp}")
    }
}

/// Enclosure `[lo, hi]` of a non-negative real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precise {
    lo: Dyadic,
    hi: Dyadic,
    bits: u64,
}

fn to_biguint(x: &BigInt) -> Result<BigUint> {
    match x.sign() {
        Sign::Minus => Err(Error::Invalid("negative value in certified arithmetic".into())),
        _ => Ok(x.magnitude().clone()),
    }
}

impl Precise {
    pub fn zero() -> Self {
        Precise {
            lo: Dyadic::zero(),
            hi: Dyadic::zero(),
            bits: DEFAULT_BITS,
        }
    }

    pub fn from_uint(n: &BigUint) -> Self {
        Precise::from_uint_with(n, DEFAULT_BITS)
    }

    pub fn from_uint_with(n: &BigUint, bits: u64) -> Self {
        let lo = Dyadic::rounded(n.clone(), 0, bits, false);
        let hi = Dyadic::rounded(n.clone(), 0, bits, true);
        Precise { lo, hi, bits }
    }

    pub fn from_u64(n: u64) -> Self {
        Precise::from_uint(&BigUint::from(n))
    }

    /// Non-negative rational.
    pub fn from_ratio(r: &BigRational) -> Result<Self> {
        Precise::from_ratio_with(r, DEFAULT_BITS)
    }

    pub fn from_ratio_with(r: &BigRational, bits: u64) -> Result<Self> {
        let n = to_biguint(r.numer())?;
        let d = to_biguint(r.denom())?;
        let n = Dyadic { m: n, e: 0 };
        let d = Dyadic { m: d, e: 0 };
        Ok(Precise {
            lo: n.div(&d, bits, false),
            hi: n.div(&d, bits, true),
            bits,
        })
    }

    /// Exact value of a decimal literal such as `"0.3"` or `"1e-3"`.
    pub fn from_decimal(text: &str) -> Result<Self> {
        Precise::from_ratio(&decimal_ratio(text)?)
    }

    /// `e^{-1}`, from its alternating series with an explicit remainder bound.
    pub fn exp_neg_one() -> Self {
        Precise::exp_neg_one_with(DEFAULT_BITS)
    }

    pub fn exp_neg_one_with(bits: u64) -> Self {
        // choose N with (N+1)! > 2^(bits + 8)
        let mut fact = BigUint::one();
        let mut n: u64 = 0;
        while fact.bits() <= bits + 8 {
            n += 1;
            fact *= n;
        }
        // n! = fact, sum_{k<=n} (-1)^k n!/k!
        let mut num = BigInt::zero();
        let mut term = BigInt::from(fact.clone());
        for k in 0..=n {
            if k > 0 {
                term /= BigInt::from(k);
            }
            if k % 2 == 0 {
                num += &term;
            } else {
                num -= &term;
            }
        }
        // remainder lies within 1/(n+1)! of the partial sum
        let big = BigInt::from(&fact * (n + 1));
        let scaled = num * BigInt::from(n + 1);
        let lo = BigRational::new(scaled.clone() - 1, big.clone());
        let hi = BigRational::new(scaled + 1, big);
        let lo = Precise::from_ratio_with(&lo, bits).map(|p| p.lo).unwrap_or_else(|_| Dyadic::zero());
        let hi = Precise::from_ratio_with(&hi, bits).map(|p| p.hi).unwrap_or_else(|_| Dyadic::zero());
        Precise { lo, hi, bits }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo_f64() + self.hi_f64())
    }

    fn width_bits(&self, o: &Precise) -> u64 {
        self.bits.min(o.bits)
    }

    pub fn mul(&self, o: &Precise) -> Precise {
        let b = self.width_bits(o);
        Precise {
            lo: self.lo.mul(&o.lo, b, false),
            hi: self.hi.mul(&o.hi, b, true),
            bits: b,
        }
    }

    pub fn add(&self, o: &Precise) -> Precise {
        let b = self.width_bits(o);
        Precise {
            lo: self.lo.add(&o.lo, b, false),
            hi: self.hi.add(&o.hi, b, true),
            bits: b,
        }
    }

    /// `self - o` for a difference known to be non-negative; errors when the
    /// enclosure shows it is negative.
    pub fn sub(&self, o: &Precise) -> Result<Precise> {
        let b = self.width_bits(o);
        let hi = self
            .hi
            .sub(&o.lo, b, true)
            .ok_or_else(|| Error::Invalid("difference is negative".into()))?;
        let lo = self.lo.sub(&o.hi, b, false).unwrap_or_else(Dyadic::zero);
        Ok(Precise { lo, hi, bits: b })
    }

    pub fn div(&self, o: &Precise) -> Result<Precise> {
        if o.lo.is_zero() {
            return Err(Error::Invalid("division by an enclosure containing zero".into()));
        }
        let b = self.width_bits(o);
        Ok(Precise {
            lo: self.lo.div(&o.hi, b, false),
            hi: self.hi.div(&o.lo, b, true),
            bits: b,
        })
    }

    pub fn recip(&self) -> Result<Precise> {
        Precise::from_uint_with(&BigUint::one(), self.bits).div(self)
    }

    pub fn powi(&self, n: u64) -> Precise {
        let mut acc = Precise::from_uint_with(&BigUint::one(), self.bits);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Principal `n`-th root.
    pub fn root(&self, n: u32) -> Result<Precise> {
        if n == 0 {
            return Err(Error::Invalid("zeroth root".into()));
        }
        Ok(Precise {
            lo: self.lo.root(n, self.bits, false),
            hi: self.hi.root(n, self.bits, true),
            bits: self.bits,
        })
    }

    /// `self^(p/q)` for a non-negative rational exponent.
    pub fn pow_ratio(&self, p: u64, q: u32) -> Result<Precise> {
        self.powi(p).root(q)
    }

    /// Smallest enclosure containing both.
    pub fn hull(&self, o: &Precise) -> Precise {
        let lo = if self.lo.cmp(&o.lo) == Ordering::Greater { &o.lo } else { &self.lo };
        let hi = if self.hi.cmp(&o.hi) == Ordering::Less { &o.hi } else { &self.hi };
        Precise {
            lo: lo.clone(),
            hi: hi.clone(),
            bits: self.width_bits(o),
        }
    }

    /// `Some(true)` if certainly `self < o`, `Some(false)` if certainly
    /// `self >= o`, `None` when the enclosures overlap.
    pub fn lt(&self, o: &Precise) -> Option<bool> {
        if self.hi.cmp(&o.lo) == Ordering::Less {
            Some(true)
        } else if self.lo.cmp(&o.hi) != Ordering::Less {
            Some(false)
        } else {
            None
        }
    }

    /// `Some(true)` if certainly `self <= o`, `Some(false)` if certainly
    /// `self > o`.
    pub fn le(&self, o: &Precise) -> Option<bool> {
        if self.hi.cmp(&o.lo) != Ordering::Greater {
            Some(true)
        } else if self.lo.cmp(&o.hi) == Ordering::Greater {
            Some(false)
        } else {
            None
        }
    }

    /// Lower and upper endpoints in scientific notation (truncated).
    pub fn sci(&self, digits: usize) -> (String, String) {
        (sci(&self.lo, digits), sci(&self.hi, digits))
    }

    /// Number of leading significant decimal digits shared by both endpoints.
    pub fn agreed_digits(&self) -> usize {
        let (a, ea) = self.lo.decimal(60);
        let (b, eb) = self.hi.decimal(60);
        if ea != eb {
            return 0;
        }
        a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count()
    }

    /// Shared leading digits in scientific notation, e.g. `1.0123e-10`.
    pub fn display(&self, digits: usize) -> String {
        sci(&self.lo, digits.min(self.agreed_digits()).max(1))
    }
}

/// Exact rational value of a decimal literal.
pub fn decimal_ratio(text: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("not a decimal number: {text:?}"));
    let t = text.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(num, Pow::pow(&ten, (-scale) as u64))
    })
}

/// Exact rational value of an `f64`, read through its shortest decimal form.
pub fn f64_ratio(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Invalid("non-finite value".into()));
    }
    decimal_ratio(&format!("{x:e}"))
}
