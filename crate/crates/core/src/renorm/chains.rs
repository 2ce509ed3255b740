use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::ScaleLadder;
use crate::paths::{CrossingRegion, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChainLabel {
    /// `x_j = j (l', L')`.
    First,
    FirstReflected,
    /// `y_j = (l, L) - j (l', L')`.
    Second,
    SecondReflected,
}

impl ChainLabel {
    pub fn name(self) -> &'static str {
        match self {
            ChainLabel::First => "first",
            ChainLabel::FirstReflected => "first_reflected",
            ChainLabel::Second => "second",
            ChainLabel::SecondReflected => "second_reflected",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainPoint {
    pub label: ChainLabel,
    pub j: u64,
    pub anchor: Point,
}

/// Anchors of the level-`(k-1)` regions used at level `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainFamily {
    pub k: usize,
    pub points: Vec<ChainPoint>,
    /// `l_{k-1}`, `L_{k-1}`, `l_k + L_k`.
    pub sub_l: i64,
    pub sub_big_l: i64,
    pub side: i64,
}

impl ChainFamily {
    /// `|M_k|`, counting every group member.
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Anchors after merging coincident ones; `y_1` can be its own mirror image.
    pub fn distinct(&self) -> usize {
        self.points.iter().map(|p| p.anchor).collect::<BTreeSet<_>>().len()
    }

    /// `|M_k|^2 <= 100 l_{k-1}`.
    pub fn cardinality_bound_holds(&self) -> bool {
        let m = self.cardinality() as u128;
        m * m <= 100 * self.sub_l as u128
    }

    pub fn group(&self, label: ChainLabel) -> impl Iterator<Item = &ChainPoint> + '_ {
        self.points.iter().filter(move |p| p.label == label)
    }

    pub fn region(&self, p: &ChainPoint) -> CrossingRegion {
        CrossingRegion {
            l: self.sub_l,
            big_l: self.sub_big_l,
            offset: p.anchor,
        }
    }

    /// Image of a sub-region anchor under the anti-diagonal reflection of `B_k`.
    pub fn reflect(&self, a: Point) -> Point {
        let t = self.side - (self.sub_l + self.sub_big_l);
        (t - a.1, t - a.0)
    }
}

fn check_level(ladder: &ScaleLadder, k: usize) -> Result<()> {
    if k < 2 || k > ladder.k_max() {
        return Err(Error::Invalid(format!("chains need 2 <= k <= {}, got {k}", ladder.k_max())));
    }
    Ok(())
}

pub fn chain_points(ladder: &ScaleLadder, k: usize) -> Result<ChainFamily> {
    check_level(ladder, k)?;
    let (lp, bp) = (ladder.l_i64(k - 1)?, ladder.big_l_i64(k - 1)?);
    let (l, b) = (ladder.l_i64(k)?, ladder.big_l_i64(k)?);
    let mut fam = ChainFamily {
        k,
        points: Vec::new(),
        sub_l: lp,
        sub_big_l: bp,
        side: l + b,
    };
    let n1 = (l + b) / bp;
    let n2 = b / bp;
    let mut pts = Vec::new();
    for j in 0..=n1 {
        pts.push(ChainPoint {
            label: ChainLabel::First,
            j: j as u64,
            anchor: (j * lp, j * bp),
        });
    }
    for j in 0..=n1 {
        let a = fam.reflect((j * lp, j * bp));
        pts.push(ChainPoint {
            label: ChainLabel::FirstReflected,
            j: j as u64,
            anchor: a,
        });
    }
    for j in 1..=n2 {
        pts.push(ChainPoint {
            label: ChainLabel::Second,
            j: j as u64,
            anchor: (l - j * lp, b - j * bp),
        });
    }
    for j in 1..=n2 {
        let a = fam.reflect((l - j * lp, b - j * bp));
        pts.push(ChainPoint {
            label: ChainLabel::SecondReflected,
            j: j as u64,
            anchor: a,
        });
    }
    fam.points = pts;
    Ok(fam)
}

/// `l_{k-1} L_k / L_{k-1} + L_{k-1} <= L_k`, cleared of denominators.
pub fn corner_inequality(ladder: &ScaleLadder, k: usize) -> Result<bool> {
    check_level(ladder, k)?;
    let (lp, bp) = (ladder.l(k - 1), ladder.big_l(k - 1));
    let b = ladder.big_l(k);
    Ok(lp * b + bp * bp <= b * bp)
}

/// Distance between the point `Y = (l - l', L + l')` and the line through
/// the lower-right corners `(j l' + s', j L')` of the first chain's boxes,
/// `s' = l' + L'`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSeparation {
    pub k: usize,
    /// `L' (Y_x - s') - l' Y_y`; negative puts `Y` on the first chain's side.
    pub numerator: BigInt,
    /// `l'^2 + L'^2`.
    pub norm_sq: BigUint,
    pub distance_sq: BigRational,
    pub distance: f64,
    /// `|L' l - L' l' - l' L - l^2 - L'^2| / sqrt(l'^2 + L'^2)`.
    pub printed_distance: f64,
    /// `l' floor(sqrt(l')) |1/k - 1/(k-1)|`.
    pub scale: f64,
}

impl ChainSeparation {
    pub fn positive(&self) -> bool {
        self.distance_sq > BigRational::from_integer(0.into())
    }

    pub fn same_side_as_first_chain(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn ratio(&self) -> f64 {
        self.distance / self.scale
    }
}

pub fn chain_separation(ladder: &ScaleLadder, k: usize) -> Result<ChainSeparation> {
    check_level(ladder, k)?;
    let i = |x: &BigUint| BigInt::from(x.clone());
    let (lp, bp) = (i(ladder.l(k - 1)), i(ladder.big_l(k - 1)));
    let (l, b) = (i(ladder.l(k)), i(ladder.big_l(k)));
    let sp = &lp + &bp;
    let yx = &l - &lp;
    let yy = &b + &lp;
    let numerator = &bp * (&yx - &sp) - &lp * &yy;
    let norm_sq = (&lp * &lp + &bp * &bp).magnitude().clone();
    let distance_sq = BigRational::new(&numerator * &numerator, BigInt::from(norm_sq.clone()));
    let norm = norm_sq.to_f64().unwrap_or(f64::INFINITY);
    let distance = libm::sqrt(distance_sq.to_f64().unwrap_or(f64::INFINITY));
    let printed = (&bp * &l - &bp * &lp - &lp * &b - &l * &l - &bp * &bp).abs();
    let printed_distance = printed.to_f64().unwrap_or(f64::INFINITY) / libm::sqrt(norm);
    let lpu = ladder.l(k - 1);
    let scale = lpu.to_f64().unwrap_or(f64::INFINITY) * lpu.sqrt().to_f64().unwrap_or(f64::INFINITY)
        / (k as f64 * (k - 1) as f64);
    Ok(ChainSeparation {
        k,
        numerator,
        norm_sq,
        distance_sq,
        distance,
        printed_distance,
        scale,
    })
}
