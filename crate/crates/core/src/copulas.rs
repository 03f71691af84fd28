//! Copulas placed on the faces of the orthant boundary.
//!
//! Copulas on different faces are independent choices; nothing ties the
//! copula of a face to the margins of the copula on a larger face.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math::EPS;

#[derive(Debug, Clone, PartialEq)]
pub enum CopulaFamily {
    Independence,
    Comonotone,
    /// Bivariate lower Fréchet bound `max{u + v − 1, 0}`.
    Countermonotone,
    /// Convex combination of copulas of the same dimension.
    Mixture(Vec<(f64, CopulaSpec)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSpec {
    dimension: usize,
    family: CopulaFamily,
}

impl CopulaSpec {
    pub fn new(family: CopulaFamily, dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidSpec(format!(
                "copula dimension must be ≥ 2, got {dimension}"
            )));
        }
        match &family {
            CopulaFamily::Countermonotone if dimension != 2 => {
                return Err(Error::InvalidSpec(format!(
                    "countermonotone copula exists only in dimension 2, got {dimension}"
                )));
            }
            CopulaFamily::Mixture(components) => {
                if components.is_empty() {
                    return Err(Error::InvalidSpec("mixture needs at least one component".into()));
                }
                let mut total = 0.0;
                for (w, c) in components {
                    if !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::Domain { what: "mixture weight", value: *w });
                    }
                    if c.dimension != dimension {
                        return Err(Error::Shape { expected: dimension, found: c.dimension });
                    }
                    total += w;
                }
                if (total - 1.0).abs() > EPS {
                    return Err(Error::InvalidSpec(format!(
                        "mixture weights sum to {total}, not 1"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { dimension, family })
    }

    pub fn independence(dimension: usize) -> Result<Self> {
        Self::new(CopulaFamily::Independence, dimension)
    }

    pub fn comonotone(dimension: usize) -> Result<Self> {
        Self::new(CopulaFamily::Comonotone, dimension)
    }

    pub fn countermonotone() -> Self {
        Self { dimension: 2, family: CopulaFamily::Countermonotone }
    }

    pub fn mixture(components: Vec<(f64, CopulaSpec)>) -> Result<Self> {
        let dimension = components.first().map(|c| c.1.dimension).unwrap_or(0);
        Self::new(CopulaFamily::Mixture(components), dimension)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &CopulaFamily {
        &self.family
    }

    /// `C(u)` for `u ∈ [0,1]^k`.
    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dimension {
            return Err(Error::Shape { expected: self.dimension, found: u.len() });
        }
        if let Some(bad) = u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain { what: "copula argument", value: *bad });
        }
        Ok(self.cdf_at(u))
    }

    pub(crate) fn cdf_at(&self, u: &[f64]) -> f64 {
        match &self.family {
            CopulaFamily::Independence => u.iter().product(),
            CopulaFamily::Comonotone => u.iter().copied().fold(1.0, f64::min),
            CopulaFamily::Countermonotone => (u[0] + u[1] - 1.0).max(0.0),
            CopulaFamily::Mixture(components) => {
                components.iter().map(|(w, c)| w * c.cdf_at(u)).sum()
            }
        }
    }

    /// Fill `out` with one draw. Coordinates lie in the open interval `(0, 1)`.
    ///
    /// # Panics
    /// If `out.len()` differs from the dimension.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        assert_eq!(out.len(), self.dimension, "output buffer has wrong length");
        match &self.family {
            CopulaFamily::Independence => {
                for v in out.iter_mut() {
                    *v = rng.sample(Open01);
                }
            }
            CopulaFamily::Comonotone => {
                let v: f64 = rng.sample(Open01);
                out.fill(v);
            }
            CopulaFamily::Countermonotone => {
                let v: f64 = rng.sample(Open01);
                out[0] = v;
                out[1] = 1.0 - v;
            }
            CopulaFamily::Mixture(components) => {
                let pick: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = &components[components.len() - 1].1;
                for (w, c) in components {
                    acc += w;
                    if pick < acc {
                        chosen = c;
                        break;
                    }
                }
                chosen.sample_into(rng, out);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.sample_into(rng, &mut out);
        out
    }
}
