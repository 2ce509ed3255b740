use alloc::vec;
use alloc::vec::Vec;

use super::Point;
use crate::{Error, Result};

/// Open/closed bits on the rectangle `[x0, x0 + width) x [y0, y0 + height)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteField {
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl SiteField {
    pub fn new(origin: Point, width: usize, height: usize, open: bool) -> Self {
        SiteField {
            x0: origin.0,
            y0: origin.1,
            width,
            height,
            bits: vec![open; width * height],
        }
    }

    pub fn all_open(origin: Point, width: usize, height: usize) -> Self {
        SiteField::new(origin, width, height, true)
    }

    pub fn all_closed(origin: Point, width: usize, height: usize) -> Self {
        SiteField::new(origin, width, height, false)
    }

    pub fn from_fn<F: FnMut(Point) -> bool>(origin: Point, width: usize, height: usize, mut f: F) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                bits.push(f((origin.0 + i as i64, origin.1 + j as i64)));
            }
        }
        SiteField {
            x0: origin.0,
            y0: origin.1,
            width,
            height,
            bits,
        }
    }

    pub fn origin(&self) -> Point {
        (self.x0, self.y0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn covers(&self, p: Point) -> bool {
        self.index(p).is_some()
    }

    fn index(&self, p: Point) -> Option<usize> {
        let i = p.0.checked_sub(self.x0)?;
        let j = p.1.checked_sub(self.y0)?;
        if i < 0 || j < 0 || i as u64 >= self.width as u64 || j as u64 >= self.height as u64 {
            return None;
        }
        Some(j as usize * self.width + i as usize)
    }

    pub fn get(&self, p: Point) -> Result<bool> {
        self.index(p)
            .map(|i| self.bits[i])
            .ok_or(Error::OutsideField { x: p.0, y: p.1 })
    }

    pub fn set(&mut self, p: Point, open: bool) -> Result<()> {
        let i = self.index(p).ok_or(Error::OutsideField { x: p.0, y: p.1 })?;
        self.bits[i] = open;
        Ok(())
    }

    pub fn count_open(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}
