use alloc::vec::Vec;
use num_rational::Rational64;
use num_traits::Zero;

use crate::{Error, Result};

pub type Point = (i64, i64);
pub type QPoint = (Rational64, Rational64);

fn q(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

fn cross(o: QPoint, a: QPoint, b: QPoint) -> Rational64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex region `C` of the strip `R x [0, 1]` with the origin on its
/// boundary, together with its non-zero integer points (the admissible steps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSet {
    hull: Vec<QPoint>,
    steps: Vec<Point>,
    h1: bool,
    h2: bool,
}

fn convex_hull(mut pts: Vec<QPoint>) -> Vec<QPoint> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<QPoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= Rational64::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<QPoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= Rational64::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl StepSet {
    /// Convex hull of `vertices`.
    pub fn new(vertices: &[QPoint]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Invalid("step region needs vertices".into()));
        }
        if vertices.iter().any(|p| p.1 < q(0) || p.1 > q(1)) {
            return Err(Error::Invalid("step region must lie in R x [0, 1]".into()));
        }
        let hull = convex_hull(vertices.to_vec());
        let mut set = StepSet {
            hull,
            steps: Vec::new(),
            h1: false,
            h2: false,
        };
        let origin = (q(0), q(0));
        if !set.contains(origin) || !set.on_boundary(origin) {
            return Err(Error::Invalid("origin must lie on the boundary of the step region".into()));
        }
        let lo = set.hull.iter().map(|p| p.0).min().expect("non-empty").floor().to_integer();
        let hi = set.hull.iter().map(|p| p.0).max().expect("non-empty").ceil().to_integer();
        for y in 0..=1 {
            for x in lo..=hi {
                if (x, y) != (0, 0) && set.contains((q(x), q(y))) {
                    set.steps.push((x, y));
                }
            }
        }
        set.steps.sort_unstable();
        if set.steps.is_empty() {
            return Err(Error::Invalid("step region has no non-zero integer point".into()));
        }
        set.h1 = set.contains_point((0, 1));
        set.h2 = set.contains_point((1, 0)) || set.contains_point((3, 1));
        Ok(set)
    }

    pub fn from_integer_vertices(vertices: &[Point]) -> Result<Self> {
        let v: Vec<QPoint> = vertices.iter().map(|&(x, y)| (q(x), q(y))).collect();
        StepSet::new(&v)
    }

    /// `hull{(-R, 1), (0, 0), (R, 1)}`.
    pub fn detection(r: u32) -> Result<Self> {
        let r = i64::from(r);
        StepSet::from_integer_vertices(&[(-r, 1), (0, 0), (r, 1)])
    }

    /// `hull{(0, 0), (0, 1), (1, 0)}`.
    pub fn staircase() -> Self {
        StepSet::from_integer_vertices(&[(0, 0), (0, 1), (1, 0)]).expect("valid region")
    }

    pub fn vertices(&self) -> &[QPoint] {
        &self.hull
    }

    /// Admissible increments in lexicographic order.
    pub fn steps(&self) -> &[Point] {
        &self.steps
    }

    /// `(0, 1)` lies in the region.
    pub fn h1(&self) -> bool {
        self.h1
    }

    /// `(1, 0)` or `(3, 1)` lies in the region.
    pub fn h2(&self) -> bool {
        self.h2
    }

    pub fn contains(&self, p: QPoint) -> bool {
        match self.hull.len() {
            1 => self.hull[0] == p,
            2 => {
                let (a, b) = (self.hull[0], self.hull[1]);
                cross(a, b, p).is_zero()
                    && p.0 >= a.0.min(b.0)
                    && p.0 <= a.0.max(b.0)
                    && p.1 >= a.1.min(b.1)
                    && p.1 <= a.1.max(b.1)
            }
            n => (0..n).all(|i| cross(self.hull[i], self.hull[(i + 1) % n], p) >= Rational64::zero()),
        }
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.contains((q(p.0), q(p.1)))
    }

    fn on_boundary(&self, p: QPoint) -> bool {
        let n = self.hull.len();
        if n <= 2 {
            return self.contains(p);
        }
        self.contains(p) && (0..n).any(|i| cross(self.hull[i], self.hull[(i + 1) % n], p).is_zero())
    }

    /// Non-zero integer increment inside the region.
    pub fn is_step(&self, d: Point) -> bool {
        self.steps.binary_search(&d).is_ok()
    }

    /// Largest `|dx|` over the steps.
    pub fn reach(&self) -> i64 {
        self.steps.iter().map(|s| s.0.abs()).max().unwrap_or(0)
    }

    pub fn has_horizontal(&self) -> bool {
        self.steps.iter().any(|s| s.1 == 0)
    }
}
