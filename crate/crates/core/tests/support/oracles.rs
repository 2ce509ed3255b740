//! Exhaustive reference answers for the escape recursion and the crossing
//! search. Both enumerate every path and share no code with the searches.

use escape_core::escape::DetectionField;
use escape_core::paths::{is_open_crossing, CrossingRegion, LatticePath, SiteField, StepSet};

/// Some sequence of moves `|d| <= r` from `start` stays on open points of
/// the window for times `0..=horizon`.
pub fn escape_by_enumeration(field: &DetectionField, r: u32, horizon: usize, start: i64) -> bool {
    fn go(field: &DetectionField, r: i64, horizon: usize, t: usize, x: i64) -> bool {
        if x < field.x_min() || x > field.x_max() || !field.is_open(x, t).unwrap() {
            return false;
        }
        t == horizon || (-r..=r).any(|d| go(field, r, horizon, t + 1, x + d))
    }
    go(field, i64::from(r), horizon, 0, start)
}

/// Some path with increments in `steps` is an open crossing of `region`.
/// Every extension of an open, in-region prefix is tried; the step sets used
/// with it must make some linear functional strictly increase.
pub fn crossing_by_enumeration(region: &CrossingRegion, field: &SiteField, steps: &StepSet) -> bool {
    fn go(region: &CrossingRegion, field: &SiteField, steps: &StepSet, pts: &mut Vec<(i64, i64)>) -> bool {
        let path = LatticePath::unchecked(pts.clone()).unwrap();
        if is_open_crossing(region, &path, field).unwrap() {
            return true;
        }
        let last = *pts.last().unwrap();
        if !region.contains(last) || !field.covers(last) || !field.get(last).unwrap() {
            return false;
        }
        for &d in steps.steps() {
            pts.push((last.0 + d.0, last.1 + d.1));
            let found = go(region, field, steps, pts);
            pts.pop();
            if found {
                return true;
            }
        }
        false
    }
    let (lo, _) = region.bounding_box();
    (lo.0..=lo.0 + region.l).any(|x| go(region, field, steps, &mut vec![(x, lo.1)]))
}
