use alloc::format;
use alloc::vec::Vec;

use super::{chain_points, ChainLabel, ScaleLadder};
use crate::paths::{concatenate, first_intersection, is_crossing, CrossingRegion, LatticePath, StepSet};
use crate::{Error, Result};

/// Sub-regions consumed by [`lift_crossings`], in order: the first chain
/// `j = 0..=n`, then its reflection `j = 0..=n`.
pub fn lift_regions(ladder: &ScaleLadder, k: usize) -> Result<Vec<CrossingRegion>> {
    let fam = chain_points(ladder, k)?;
    let mut out: Vec<CrossingRegion> = fam.group(ChainLabel::First).map(|p| fam.region(p)).collect();
    out.extend(fam.group(ChainLabel::FirstReflected).map(|p| fam.region(p)));
    Ok(out)
}

fn join(f: &LatticePath, g: &LatticePath, steps: &StepSet, a: usize, b: usize) -> Result<LatticePath> {
    let (s, t) = first_intersection(f, g).ok_or(Error::Disjoint(a, b))?;
    concatenate(f, g, s, t, steps)
}

/// Glues one crossing per sub-region into a crossing of `A_k`: the first
/// chain is concatenated bottom-up, its reflection top-down, and the two
/// halves at their first meeting.
pub fn lift_crossings(subs: &[Option<LatticePath>], ladder: &ScaleLadder, k: usize, steps: &StepSet) -> Result<LatticePath> {
    let regions = lift_regions(ladder, k)?;
    if subs.len() != regions.len() {
        return Err(Error::Invalid(format!("expected {} sub-crossings, got {}", regions.len(), subs.len())));
    }
    let mut paths = Vec::with_capacity(subs.len());
    for (i, (s, r)) in subs.iter().zip(&regions).enumerate() {
        let p = s.as_ref().ok_or(Error::MissingSubCrossing(i))?;
        p.validate(steps)?;
        if !is_crossing(r, p) {
            return Err(Error::NotACrossing(format!("sub-crossing {i} does not cross its region")));
        }
        paths.push(p);
    }
    let half = regions.len() / 2;
    let mut lower = paths[0].clone();
    for j in 1..half {
        lower = join(&lower, paths[j], steps, j - 1, j)?;
    }
    let mut upper = paths[regions.len() - 1].clone();
    for i in (half..regions.len() - 1).rev() {
        upper = join(&upper, paths[i], steps, i + 1, i)?;
    }
    let lifted = join(&lower, &upper, steps, half - 1, half)?;
    let target = ladder.region_at(k, (0, 0))?;
    if !is_crossing(&target, &lifted) {
        return Err(Error::NotACrossing(format!("result leaves A_{k} before its exit")));
    }
    Ok(lifted)
}
