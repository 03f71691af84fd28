//! Reflection, translation, and the bijection between the JE support
//! `W_JE = [0,∞)^n ∖ (0,∞)^n` and the zero-sum hyperplane
//! `W_JM = { y : Σ y_i = 0 }`.
//!
//! ```text
//! je_to_jm(x) = x − mean(x)        jm_to_je(y) = y − min(y)
//! ```

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::SampleBatch;

/// Membership tolerance for user-supplied points.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A point of `W_JE`: non-negative with minimum 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJe(Vec<f64>);

/// A point of `W_JM`: coordinates summing to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJm(Vec<f64>);

impl PointJe {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Shape { expected: 1, found: 0 });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Membership { set: "W_JE", reason: "non-finite coordinate" });
        }
        let min = x.iter().copied().fold(f64::INFINITY, f64::min);
        if min.abs() > MEMBERSHIP_TOL {
            return Err(Error::Membership { set: "W_JE", reason: "minimum coordinate is not 0" });
        }
        Ok(Self(x))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl PointJm {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Shape { expected: 1, found: 0 });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Membership { set: "W_JM", reason: "non-finite coordinate" });
        }
        if y.iter().sum::<f64>().abs() > MEMBERSHIP_TOL {
            return Err(Error::Membership { set: "W_JM", reason: "coordinates do not sum to 0" });
        }
        Ok(Self(y))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

fn center(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| v - mean).collect()
}

fn shift_to_zero_min(y: &[f64]) -> Vec<f64> {
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    y.iter().map(|v| v - min).collect()
}

pub fn je_to_jm(x: &PointJe) -> PointJm {
    PointJm(center(&x.0))
}

pub fn jm_to_je(y: &PointJm) -> PointJe {
    PointJe(shift_to_zero_min(&y.0))
}

/// Coordinate-wise negation.
pub fn reflect(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| -v).collect()
}

/// `x + l`.
pub fn translate(x: &[f64], l: &[f64]) -> Result<Vec<f64>> {
    if x.len() != l.len() {
        return Err(Error::Shape { expected: x.len(), found: l.len() });
    }
    Ok(x.iter().zip(l).map(|(a, b)| a + b).collect())
}

/// Apply [`je_to_jm`] to every row. Rows must lie in `W_JE`.
pub fn je_to_jm_rows(batch: &SampleBatch) -> Result<Vec<Vec<f64>>> {
    batch.rows().map(|r| PointJe::new(r.to_vec()).map(|p| je_to_jm(&p).into_inner())).collect()
}
