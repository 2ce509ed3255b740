use crate::{Error, Result};

/// Sites `0..W`; edge `e` joins `e` and `e + 1 mod W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Torus {
    size: usize,
}

impl Torus {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 || size > u32::MAX as usize {
            return Err(Error::Invalid(alloc::format!("torus size {size} must lie in [2, 2^32)")));
        }
        Ok(Torus { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn edge_ends(&self, edge: usize) -> (usize, usize) {
        let b = if edge + 1 == self.size { 0 } else { edge + 1 };
        (edge, b)
    }

    #[inline]
    pub fn wrap(&self, x: i64) -> usize {
        x.rem_euclid(self.size as i64) as usize
    }

    #[inline]
    pub fn right(&self, x: usize) -> usize {
        if x + 1 == self.size {
            0
        } else {
            x + 1
        }
    }

    #[inline]
    pub fn left(&self, x: usize) -> usize {
        if x == 0 {
            self.size - 1
        } else {
            x - 1
        }
    }
}
