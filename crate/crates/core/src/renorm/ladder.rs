use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::paths::{CrossingRegion, Point};
use crate::{Error, Result};

/// `l_k = floor(sqrt(l_{k-1})) l_{k-1}` and `L_k = floor((3/2 + 1/k) l_k)`,
/// with `L_0 = floor(5 l_0 / 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleLadder {
    l: Vec<BigUint>,
    big_l: Vec<BigUint>,
}

fn side_for(k: usize, l: &BigUint) -> BigUint {
    if k == 0 {
        l * 5u32 / 2u32
    } else {
        // (3k + 2) l / (2k)
        l * (3 * k as u64 + 2) / (2 * k as u64)
    }
}

impl ScaleLadder {
    pub fn new(l0: &BigUint, k_max: usize) -> Result<Self> {
        if *l0 < BigUint::from(4u32) {
            return Err(Error::Invalid(format!("base scale must be at least 4, got {l0}")));
        }
        let mut ladder = ScaleLadder {
            l: alloc::vec![l0.clone()],
            big_l: alloc::vec![side_for(0, l0)],
        };
        ladder.extend_to(k_max);
        Ok(ladder)
    }

    pub fn from_u64(l0: u64, k_max: usize) -> Result<Self> {
        ScaleLadder::new(&BigUint::from(l0), k_max)
    }

    pub fn extend_to(&mut self, k_max: usize) {
        while self.l.len() <= k_max {
            let prev = self.l.last().expect("non-empty");
            let next = prev.sqrt() * prev;
            self.big_l.push(side_for(self.l.len(), &next));
            self.l.push(next);
        }
    }

    pub fn k_max(&self) -> usize {
        self.l.len() - 1
    }

    pub fn l(&self, k: usize) -> &BigUint {
        &self.l[k]
    }

    pub fn big_l(&self, k: usize) -> &BigUint {
        &self.big_l[k]
    }

    /// `l_k + L_k`.
    pub fn side(&self, k: usize) -> BigUint {
        &self.l[k] + &self.big_l[k]
    }

    pub fn l_i64(&self, k: usize) -> Result<i64> {
        fits(&self.l[k], "l_k")
    }

    pub fn big_l_i64(&self, k: usize) -> Result<i64> {
        fits(&self.big_l[k], "L_k")
    }

    /// `l_k^{3/2} / 2 <= l_{k+1} <= l_k^{3/2}`, squared out.
    pub fn growth_holds(&self, k: usize) -> bool {
        let cube = self.l[k].pow(3);
        let sq = &self.l[k + 1] * &self.l[k + 1];
        sq <= cube && sq * 4u32 >= cube
    }

    /// `l_k <= L_k <= 2 l_k`.
    pub fn aspect_holds(&self, k: usize) -> bool {
        self.l[k] <= self.big_l[k] && self.big_l[k] <= &self.l[k] * 2u32
    }

    /// `A_k` translated by `offset`.
    pub fn region_at(&self, k: usize, offset: Point) -> Result<CrossingRegion> {
        if k == 0 || k > self.k_max() {
            return Err(Error::Invalid(format!("level {k} outside 1..={}", self.k_max())));
        }
        CrossingRegion::new(self.l_i64(k)?, self.big_l_i64(k)?, offset)
    }
}

pub(crate) fn fits(x: &BigUint, name: &str) -> Result<i64> {
    x.to_i64()
        .filter(|v| *v < i64::MAX / 4)
        .ok_or_else(|| Error::Invalid(format!("{name} = {x} does not fit machine coordinates")))
}
