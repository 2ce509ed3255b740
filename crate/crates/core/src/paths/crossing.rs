use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{LatticePath, Point, SiteField, StepSet};
use crate::{Error, Result};

fn q(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

/// `A = [0, l] x [0, L] ∪ [0, l + L] x [L, l + L]`, translated by `offset`,
/// inside the box `B = [0, l + L]^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CrossingRegion {
    pub l: i64,
    pub big_l: i64,
    pub offset: Point,
}

impl CrossingRegion {
    pub fn new(l: i64, big_l: i64, offset: Point) -> Result<Self> {
        if l < 1 || big_l < 1 {
            return Err(Error::Invalid(alloc::format!("region sides must be positive (l = {l}, L = {big_l})")));
        }
        Ok(CrossingRegion { l, big_l, offset })
    }

    pub fn side(&self) -> i64 {
        self.l + self.big_l
    }

    pub fn contains(&self, p: Point) -> bool {
        let (x, y) = (p.0 - self.offset.0, p.1 - self.offset.1);
        let s = self.side();
        (0..=self.l).contains(&x) && (0..=self.big_l).contains(&y)
            || (0..=s).contains(&x) && (self.big_l..=s).contains(&y)
    }

    /// Lower-left and upper-right corners of `B`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let s = self.side();
        (self.offset, (self.offset.0 + s, self.offset.1 + s))
    }

    /// `(x, y0, y1)` of the exit face `{l + L} x [L, l + L]`.
    pub fn exit_face(&self) -> (i64, i64, i64) {
        (
            self.offset.0 + self.side(),
            self.offset.1 + self.big_l,
            self.offset.1 + self.side(),
        )
    }

    pub fn on_entry(&self, p: Point) -> bool {
        p.1 == self.offset.1 && (0..=self.l).contains(&(p.0 - self.offset.0))
    }

    pub fn on_exit(&self, p: Point) -> bool {
        let (x, y0, y1) = self.exit_face();
        p.0 == x && (y0..=y1).contains(&p.1)
    }

    /// An all-closed field on exactly `B`.
    pub fn blank_field(&self) -> SiteField {
        let s = (self.side() + 1) as usize;
        SiteField::all_closed(self.offset, s, s)
    }

    /// First parameter in `[0, 1]` at which `a + s (b - a)` lies on the exit face.
    fn segment_exit(&self, a: Point, b: Point) -> Option<Rational64> {
        let (x, y0, y1) = self.exit_face();
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let in_band = |s: Rational64| {
            let y = q(a.1) + s * q(dy);
            y >= q(y0) && y <= q(y1)
        };
        if dx != 0 {
            let s = Rational64::new(x - a.0, dx);
            return (s >= Rational64::zero() && s <= Rational64::one() && in_band(s)).then_some(s);
        }
        if a.0 != x {
            return None;
        }
        if (y0..=y1).contains(&a.1) {
            return Some(Rational64::zero());
        }
        if dy == 0 {
            return None;
        }
        let target = if a.1 < y0 { y0 } else { y1 };
        let s = Rational64::new(target - a.1, dy);
        (s >= Rational64::zero() && s <= Rational64::one()).then_some(s)
    }
}

/// `T_f`: first time the interpolant of `f` reaches the exit face.
pub fn exit_time(region: &CrossingRegion, f: &LatticePath) -> Option<Rational64> {
    let pts = f.points();
    if region.on_exit(pts[0]) {
        return Some(Rational64::zero());
    }
    pts.windows(2)
        .enumerate()
        .find_map(|(i, w)| region.segment_exit(w[0], w[1]).map(|s| q(i as i64) + s))
}

/// Starts on `[0, l] x {0}`, reaches the exit face, and stays in `A` at every
/// lattice time up to `T_f`.
pub fn is_crossing(region: &CrossingRegion, f: &LatticePath) -> bool {
    if !region.on_entry(f.start()) {
        return false;
    }
    match exit_time(region, f) {
        None => false,
        Some(t) => {
            let last = t.floor().to_integer() as usize;
            f.points()[..=last].iter().all(|&p| region.contains(p))
        }
    }
}

/// A crossing whose lattice points up to `T_f` are all open.
pub fn is_open_crossing(region: &CrossingRegion, f: &LatticePath, field: &SiteField) -> Result<bool> {
    if !is_crossing(region, f) {
        return Ok(false);
    }
    let last = exit_time(region, f).expect("crossing").floor().to_integer() as usize;
    for &p in &f.points()[..=last] {
        if !field.get(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Breadth-first search over open points of `A` from the open entry points,
/// steps tried in lexicographic order. Returns the path up to and including
/// the point after the exit.
pub fn find_crossing(region: &CrossingRegion, field: &SiteField, steps: &StepSet) -> Result<Option<LatticePath>> {
    let (lo, hi) = region.bounding_box();
    if !field.covers(lo) || !field.covers(hi) {
        return Err(Error::Invalid("field does not cover the bounding box".into()));
    }
    let side = (region.side() + 1) as usize;
    let idx = |p: Point| (p.1 - lo.1) as usize * side + (p.0 - lo.0) as usize;
    const UNSEEN: u32 = u32::MAX;
    const ROOT: u32 = u32::MAX - 1;
    let mut parent = vec![UNSEEN; side * side];
    let mut queue: VecDeque<Point> = VecDeque::new();
    let rebuild = |parent: &[u32], mut p: Point, extra: Option<Point>| {
        let mut pts = Vec::new();
        if let Some(e) = extra {
            pts.push(e);
        }
        loop {
            pts.push(p);
            let par = parent[idx(p)];
            if par == ROOT {
                break;
            }
            p = (lo.0 + (par as usize % side) as i64, lo.1 + (par as usize / side) as i64);
        }
        pts.reverse();
        LatticePath::unchecked(pts).expect("non-empty")
    };
    for x in lo.0..=lo.0 + region.l {
        let p = (x, lo.1);
        if field.get(p)? {
            parent[idx(p)] = ROOT;
            if region.on_exit(p) {
                return Ok(Some(rebuild(&parent, p, None)));
            }
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        for &d in steps.steps() {
            let n = (p.0 + d.0, p.1 + d.1);
            if let Some(s) = region.segment_exit(p, n) {
                if s < Rational64::one() {
                    return Ok(Some(rebuild(&parent, p, Some(n))));
                }
            }
            if !region.contains(n) || parent[idx(n)] != UNSEEN || !field.get(n)? {
                continue;
            }
            parent[idx(n)] = idx(p) as u32;
            if region.on_exit(n) {
                return Ok(Some(rebuild(&parent, n, None)));
            }
            queue.push_back(n);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_geometry() {
        let r = CrossingRegion::new(64, 160, (0, 0)).unwrap();
        assert!(r.contains((64, 160)) && r.contains((224, 224)) && r.contains((0, 0)));
        assert!(!r.contains((65, 159)) && !r.contains((225, 200)));
        assert_eq!(r.bounding_box(), ((0, 0), (224, 224)));
        let t = CrossingRegion::new(64, 160, (5, 7)).unwrap();
        assert_eq!(t.bounding_box(), ((5, 7), (229, 231)));
        assert!(t.contains((69, 167)) && !t.contains((70, 166)));
        assert_eq!(t.exit_face(), (229, 167, 231));
    }

    #[test]
    fn staircase_crossing_in_open_field() {
        let r = CrossingRegion::new(2, 3, (0, 0)).unwrap();
        let c = StepSet::staircase();
        let mut field = r.blank_field();
        let f = find_crossing(&r, &field, &c).unwrap();
        assert!(f.is_none());
        field = SiteField::all_open((0, 0), 6, 6);
        let f = find_crossing(&r, &field, &c).unwrap().unwrap();
        f.validate(&c).unwrap();
        assert!(is_open_crossing(&r, &f, &field).unwrap());
        assert!(r.on_exit(f.end()));
    }

    #[test]
    fn exit_inside_a_segment() {
        let r = CrossingRegion::new(2, 3, (0, 0)).unwrap();
        let f = LatticePath::unchecked(vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (6, 5)]).unwrap();
        assert_eq!(exit_time(&r, &f), Some(Rational64::new(9, 2)));
        assert!(is_crossing(&r, &f));
        let g = LatticePath::unchecked(vec![(1, 0), (3, 1)]).unwrap();
        assert_eq!(exit_time(&r, &g), None);
        assert!(!is_crossing(&r, &g));
    }
}
