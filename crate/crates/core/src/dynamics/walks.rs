use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::Torus;
use crate::{Error, Result};

/// Per-site particle counts at times `0..=horizon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkHistory {
    width: usize,
    counts: Vec<u32>,
}

impl WalkHistory {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn horizon(&self) -> usize {
        self.counts.len() / self.width - 1
    }

    pub fn count(&self, x: usize, n: usize) -> u32 {
        self.counts[n * self.width + x]
    }

    pub fn row(&self, n: usize) -> &[u32] {
        &self.counts[n * self.width..(n + 1) * self.width]
    }

    pub fn total(&self, n: usize) -> u64 {
        self.row(n).iter().map(|&c| u64::from(c)).sum()
    }

    /// Level-set openness `{count >= level}`.
    pub fn is_open(&self, x: usize, n: usize, level: u32) -> bool {
        self.count(x, n) >= level
    }
}

/// Poisson(`lambda`) particles per site, each an independent lazy walk
/// (stay 1/2, left 1/4, right 1/4).
pub fn evolve_walk_cloud<R: Rng + ?Sized>(
    lambda: f64,
    torus: Torus,
    horizon: usize,
    rng: &mut R,
) -> Result<WalkHistory> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "(0, inf)",
        });
    }
    let w = torus.size();
    let law = Poisson::new(lambda).map_err(|_| Error::Invalid("Poisson intensity".into()))?;
    let mut pos: Vec<u32> = Vec::new();
    for x in 0..w {
        let k: f64 = law.sample(rng);
        pos.extend(core::iter::repeat_n(x as u32, k as usize));
    }
    let mut counts = alloc::vec![0u32; w * (horizon + 1)];
    for &p in &pos {
        counts[p as usize] += 1;
    }
    for n in 1..=horizon {
        let row = &mut counts[n * w..(n + 1) * w];
        for p in pos.iter_mut() {
            match rng.gen::<u32>() >> 30 {
                2 => *p = torus.left(*p as usize) as u32,
                3 => *p = torus.right(*p as usize) as u32,
                _ => {}
            }
            row[*p as usize] += 1;
        }
    }
    Ok(WalkHistory { width: w, counts })
}
