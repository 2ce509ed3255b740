use alloc::format;
use alloc::vec::Vec;
use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{Point, QPoint, SiteField, StepSet};
use crate::{Error, Result};

fn q(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

/// `f(0), ..., f(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePath {
    points: Vec<Point>,
}

impl LatticePath {
    /// Checks every increment against `steps`.
    pub fn new(points: Vec<Point>, steps: &StepSet) -> Result<Self> {
        let p = LatticePath::unchecked(points)?;
        p.validate(steps)?;
        Ok(p)
    }

    /// Any non-empty point sequence.
    pub fn unchecked(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("a path needs at least one point".into()));
        }
        Ok(LatticePath { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() == 1
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    pub fn validate(&self, steps: &StepSet) -> Result<()> {
        for (i, w) in self.points.windows(2).enumerate() {
            let d = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if !steps.is_step(d) {
                return Err(Error::InvalidStep {
                    index: i,
                    dx: d.0,
                    dy: d.1,
                });
            }
        }
        Ok(())
    }

    pub fn is_open(&self, field: &SiteField) -> Result<bool> {
        for &p in &self.points {
            if !field.get(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Affine interpolation between consecutive points.
    pub fn interpolate(&self, t: f64) -> Result<(f64, f64)> {
        let n = self.len() as f64;
        if !(0.0..=n).contains(&t) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                range: "[0, n]",
            });
        }
        let i = (libm::floor(t) as usize).min(self.len().saturating_sub(1));
        let a = self.points[i];
        if self.is_empty() {
            return Ok((a.0 as f64, a.1 as f64));
        }
        let b = self.points[i + 1];
        let w = t - i as f64;
        Ok((
            (1.0 - w) * a.0 as f64 + w * b.0 as f64,
            (1.0 - w) * a.1 as f64 + w * b.1 as f64,
        ))
    }

    pub fn interpolate_exact(&self, t: Rational64) -> Result<QPoint> {
        if t < Rational64::zero() || t > q(self.len() as i64) {
            return Err(Error::OutOfRange {
                name: "t",
                value: *t.numer() as f64 / *t.denom() as f64,
                range: "[0, n]",
            });
        }
        let i = t.floor().to_integer() as usize;
        let a = self.points[i];
        if i == self.len() {
            return Ok((q(a.0), q(a.1)));
        }
        let b = self.points[i + 1];
        let w = t - q(i as i64);
        Ok((q(a.0) + w * q(b.0 - a.0), q(a.1) + w * q(b.1 - a.1)))
    }

    pub fn translate(&self, by: Point) -> LatticePath {
        LatticePath {
            points: self.points.iter().map(|p| (p.0 + by.0, p.1 + by.1)).collect(),
        }
    }

    /// Pointwise image; the result is not checked against any step set.
    pub fn map_points<F: Fn(Point) -> Point>(&self, f: F) -> LatticePath {
        LatticePath {
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// `h(n) = f(n)` for `n <= s` and `h(n) = g(floor(t) - floor(s) + n)` after,
/// validated against `steps`.
pub fn concatenate(
    f: &LatticePath,
    g: &LatticePath,
    s: Rational64,
    t: Rational64,
    steps: &StepSet,
) -> Result<LatticePath> {
    let a = f.interpolate_exact(s)?;
    let b = g.interpolate_exact(t)?;
    if a != b {
        return Err(Error::NoMeeting(format!("f~({s}) = ({}, {}) but g~({t}) = ({}, {})", a.0, a.1, b.0, b.1)));
    }
    let fs = s.floor().to_integer() as usize;
    let gt = t.floor().to_integer() as usize;
    let mut points = Vec::with_capacity(fs + 1 + g.points.len().saturating_sub(gt + 1));
    points.extend_from_slice(&f.points[..=fs]);
    points.extend_from_slice(&g.points[(gt + 1).min(g.points.len())..]);
    LatticePath::new(points, steps)
}

fn cross(a: Point, b: Point) -> i128 {
    a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
}

fn dot(a: Point, b: Point) -> i128 {
    a.0 as i128 * b.0 as i128 + a.1 as i128 * b.1 as i128
}

fn ratio(n: i128, d: i128) -> Rational64 {
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    let g = num_integer::gcd(n, d);
    Rational64::new_raw((n / g) as i64, (d / g) as i64)
}

/// Smallest parameter `a in [0, 1]` with `p + a r` on the segment `[c, c + u]`.
fn earliest_hit(p: Point, r: Point, c: Point, u: Point) -> Option<Rational64> {
    let w = (c.0 - p.0, c.1 - p.1);
    let den = cross(r, u);
    if den != 0 {
        let an = cross(w, u);
        let bn = cross(w, r);
        let inside = |x: i128| if den > 0 { 0 <= x && x <= den } else { den <= x && x <= 0 };
        return (inside(an) && inside(bn)).then(|| ratio(an, den));
    }
    if cross(w, r) != 0 {
        return None;
    }
    let rr = dot(r, r);
    if rr == 0 {
        return (w == (0, 0) && u == (0, 0)).then(Rational64::zero);
    }
    let e0 = dot(w, r);
    let e1 = dot((w.0 + u.0, w.1 + u.1), r);
    let (lo, hi) = (e0.min(e1), e0.max(e1));
    let lo = lo.max(0);
    let hi = hi.min(rr);
    (lo <= hi).then(|| ratio(lo, rr))
}

/// Earliest `s` with `f~(s)` on the trace of `g~`, and the earliest `t` with
/// `g~(t) = f~(s)`.
pub fn first_intersection(f: &LatticePath, g: &LatticePath) -> Option<(Rational64, Rational64)> {
    let fp = &f.points;
    let gp = &g.points;
    let single = |pts: &[Point]| pts.len() == 1;
    let seg = |pts: &[Point], i: usize| -> (Point, Point) {
        if single(pts) {
            (pts[0], (0, 0))
        } else {
            let a = pts[i];
            let b = pts[i + 1];
            (a, (b.0 - a.0, b.1 - a.1))
        }
    };
    let fseg = fp.len().saturating_sub(1).max(1);
    let gseg = gp.len().saturating_sub(1).max(1);
    let ymin_g = gp.iter().map(|p| p.1).min()?;
    let ymax_g = gp.iter().map(|p| p.1).max()?;
    for i in 0..fseg {
        let (p, r) = seg(fp, i);
        if p.1.max(p.1 + r.1) < ymin_g || p.1.min(p.1 + r.1) > ymax_g {
            continue;
        }
        let mut best: Option<Rational64> = None;
        for j in 0..gseg {
            let (c, u) = seg(gp, j);
            let hit = if r == (0, 0) {
                earliest_hit(c, u, p, (0, 0)).map(|_| Rational64::zero())
            } else {
                earliest_hit(p, r, c, u)
            };
            if let Some(a) = hit {
                if best.is_none_or(|b| a < b) {
                    best = Some(a);
                }
            }
        }
        if let Some(a) = best {
            let s = if single(fp) { Rational64::zero() } else { q(i as i64) + a };
            let point = (q(p.0) + a * q(r.0), q(p.1) + a * q(r.1));
            let t = earliest_time_at(g, point)?;
            return Some((s, t));
        }
    }
    None
}

/// Earliest `t` with `g~(t) = x`.
fn earliest_time_at(g: &LatticePath, x: QPoint) -> Option<Rational64> {
    let gp = &g.points;
    if gp.len() == 1 {
        return (x == (q(gp[0].0), q(gp[0].1))).then(Rational64::zero);
    }
    for j in 0..gp.len() - 1 {
        let a = gp[j];
        let b = gp[j + 1];
        let d = (b.0 - a.0, b.1 - a.1);
        let w = (x.0 - q(a.0), x.1 - q(a.1));
        if w.0 * q(d.1) != w.1 * q(d.0) {
            continue;
        }
        let dd = q(dot(d, d) as i64);
        let lam = (w.0 * q(d.0) + w.1 * q(d.1)) / dd;
        if lam >= Rational64::zero() && lam <= Rational64::one() {
            return Some(q(j as i64) + lam);
        }
    }
    None
}
