use alloc::vec::Vec;
use rand::Rng;

use super::Torus;
use crate::error::check_unit;
use crate::{Error, Result};

/// Occupancy of every torus site, tagged with the density it was drawn at.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    occupancy: Vec<u8>,
    density: f64,
}

impl Configuration {
    pub fn new(occupancy: Vec<u8>, density: f64) -> Result<Self> {
        check_unit("rho", density)?;
        if occupancy.len() < 2 {
            return Err(Error::Invalid("configuration needs at least two sites".into()));
        }
        if let Some(i) = occupancy.iter().position(|&b| b > 1) {
            return Err(Error::Invalid(alloc::format!("site {i} has occupancy {}", occupancy[i])));
        }
        Ok(Configuration { occupancy, density })
    }

    pub fn from_bools(bits: &[bool], density: f64) -> Result<Self> {
        Configuration::new(bits.iter().map(|&b| u8::from(b)).collect(), density)
    }

    /// Quantile coupling: site `x` is occupied iff `u[x] < rho`.
    pub fn from_uniforms(uniforms: &[f64], density: f64) -> Result<Self> {
        check_unit("rho", density)?;
        Configuration::new(uniforms.iter().map(|&u| u8::from(u < density)).collect(), density)
    }

    pub fn torus(&self) -> Torus {
        Torus::new(self.occupancy.len()).expect("validated at construction")
    }

    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    #[inline]
    pub fn get(&self, x: usize) -> u8 {
        self.occupancy[x]
    }

    #[inline]
    pub fn is_occupied(&self, x: usize) -> bool {
        self.occupancy[x] == 1
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.occupancy
    }

    pub fn count(&self) -> usize {
        self.occupancy.iter().map(|&b| b as usize).sum()
    }

    #[inline]
    pub fn swap_edge(&mut self, edge: usize) {
        let b = if edge + 1 == self.occupancy.len() { 0 } else { edge + 1 };
        self.occupancy.swap(edge, b);
    }

    /// Holes become particles and vice versa; density becomes `1 - rho`.
    pub fn complement(&self) -> Configuration {
        Configuration {
            occupancy: self.occupancy.iter().map(|&b| 1 - b).collect(),
            density: 1.0 - self.density,
        }
    }

    /// `self <= other` at every site.
    pub fn dominated_by(&self, other: &Configuration) -> bool {
        self.occupancy.len() == other.occupancy.len()
            && self.occupancy.iter().zip(&other.occupancy).all(|(a, b)| a <= b)
    }
}

/// One uniform per site, the shared randomness of a monotone ensemble.
pub fn site_uniforms<R: Rng + ?Sized>(torus: Torus, rng: &mut R) -> Vec<f64> {
    (0..torus.size()).map(|_| rng.gen::<f64>()).collect()
}

/// Product Bernoulli(`rho`) configuration.
pub fn sample_initial<R: Rng + ?Sized>(rho: f64, torus: Torus, rng: &mut R) -> Result<Configuration> {
    check_unit("rho", rho)?;
    let u = site_uniforms(torus, rng);
    Configuration::from_uniforms(&u, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn extreme_densities() {
        let t = Torus::new(50).unwrap();
        let mut rng = Stream::new(1, "x").rng();
        assert_eq!(sample_initial(0.0, t, &mut rng).unwrap().count(), 0);
        assert_eq!(sample_initial(1.0, t, &mut rng).unwrap().count(), 50);
        assert!(sample_initial(1.5, t, &mut rng).is_err());
        assert!(sample_initial(-0.1, t, &mut rng).is_err());
    }

    #[test]
    fn same_uniforms_give_dominated_configurations() {
        let t = Torus::new(200).unwrap();
        let u = site_uniforms(t, &mut Stream::new(2, "u").rng());
        let a = Configuration::from_uniforms(&u, 0.3).unwrap();
        let b = Configuration::from_uniforms(&u, 0.7).unwrap();
        assert!(a.dominated_by(&b));
        assert!(!b.dominated_by(&a));
    }
}
