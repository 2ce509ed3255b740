use alloc::vec;
use alloc::vec::Vec;

use super::DetectionField;
use crate::Result;

/// Positions an undetected target can occupy at each integer time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivalFrontier {
    x_min: i64,
    width: usize,
    rows: Vec<Vec<bool>>,
}

impl SurvivalFrontier {
    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Last computed time.
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn contains(&self, t: usize, x: i64) -> bool {
        let i = x - self.x_min;
        i >= 0 && (i as usize) < self.width && self.rows[t][i as usize]
    }

    pub fn size(&self, t: usize) -> usize {
        self.rows[t].iter().filter(|&&b| b).count()
    }

    pub fn positions(&self, t: usize) -> impl Iterator<Item = i64> + '_ {
        let x0 = self.x_min;
        self.rows[t]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| x0 + i as i64)
    }

    pub fn alive_at(&self, t: usize) -> bool {
        self.rows[t].iter().any(|&b| b)
    }

    /// First time with an empty frontier.
    pub fn death_time(&self) -> Option<usize> {
        (0..self.rows.len()).find(|&t| !self.alive_at(t))
    }

    /// `F_t ⊆ other.F_t` for every shared time.
    pub fn is_subset_of(&self, other: &SurvivalFrontier) -> bool {
        let h = self.horizon().min(other.horizon());
        (0..=h).all(|t| self.positions(t).all(|x| other.contains(t, x)))
    }
}

/// `F_0 = {start}` if open, `F_{t+1} = {x open at t + 1 : dist(x, F_t) <= R}`.
/// Returns whether `F_horizon` is non-empty. Once the frontier empties the
/// remaining rows stay empty.
pub fn survival_dp(field: &DetectionField, r: u32, horizon: usize, start: i64) -> Result<(bool, SurvivalFrontier)> {
    let width = field.width();
    let x_min = field.x_min();
    let horizon = horizon.min(field.horizon());
    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(horizon + 1);
    let mut cur = vec![false; width];
    if field.is_open(start, 0)? {
        cur[(start - x_min) as usize] = true;
    }
    rows.push(cur.clone());
    let r = r as usize;
    let mut prefix = vec![0u32; width + 1];
    for t in 1..=horizon {
        let alive = cur.iter().any(|&b| b);
        let mut next = vec![false; width];
        if alive {
            for i in 0..width {
                prefix[i + 1] = prefix[i] + u32::from(cur[i]);
            }
            for (i, slot) in next.iter_mut().enumerate() {
                let lo = i.saturating_sub(r);
                let hi = (i + r).min(width - 1);
                if prefix[hi + 1] > prefix[lo] && field.is_open(x_min + i as i64, t)? {
                    *slot = true;
                }
            }
        }
        rows.push(next.clone());
        cur = next;
    }
    let frontier = SurvivalFrontier { x_min, width, rows };
    Ok((frontier.alive_at(horizon), frontier))
}
