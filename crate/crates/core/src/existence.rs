//! Existence conditions for mutually exclusive (ME), jointly exclusive (JE)
//! and distorted jointly exclusive (G-JE) vectors with given marginals.
//!
//! Each check compares a left-hand side against a right-hand side and keeps
//! both, so callers can apply a stricter policy than the built-in `EPS`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::marginals::MarginalSpec;
use crate::math::{self, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceKind {
    Me,
    Je,
    Gje,
}

impl ExistenceKind {
    pub fn label(self) -> &'static str {
        match self {
            ExistenceKind::Me => "ME",
            ExistenceKind::Je => "JE",
            ExistenceKind::Gje => "GJE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceReport {
    pub kind: ExistenceKind,
    pub feasible: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; the report is feasible iff `slack ≥ −EPS`.
    pub slack: f64,
}

impl ExistenceReport {
    pub(crate) fn new(kind: ExistenceKind, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self { kind, feasible: slack >= -EPS, lhs, rhs, slack }
    }

    pub(crate) fn into_result(self) -> Result<Self> {
        if self.feasible {
            Ok(self)
        } else {
            Err(Error::Existence(self))
        }
    }
}

impl fmt::Display for ExistenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cond = match self.kind {
            ExistenceKind::Me => "MEcondition",
            ExistenceKind::Je => "JECondition",
            ExistenceKind::Gje => "G-JECondition",
        };
        write!(
            f,
            "{} ({cond}): lhs = {}, rhs = {}, slack = {}",
            self.kind.label(),
            self.lhs,
            self.rhs,
            self.slack
        )
    }
}

pub(crate) fn survival_at_zero(marginals: &[MarginalSpec]) -> Vec<f64> {
    marginals.iter().map(MarginalSpec::q0).collect()
}

fn require_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Shape { expected: 2, found: n });
    }
    Ok(())
}

/// `Σ F̄_i(0) ≤ 1`.
pub fn check_me(marginals: &[MarginalSpec]) -> Result<ExistenceReport> {
    require_dimension(marginals.len())?;
    let q0 = survival_at_zero(marginals);
    Ok(ExistenceReport::new(ExistenceKind::Me, math::sum(&q0), 1.0))
}

/// `Σ F̄_i(0) ≤ n − 1`.
pub fn check_je(marginals: &[MarginalSpec]) -> Result<ExistenceReport> {
    require_dimension(marginals.len())?;
    let q0 = survival_at_zero(marginals);
    Ok(ExistenceReport::new(ExistenceKind::Je, math::sum(&q0), marginals.len() as f64 - 1.0))
}

/// `Σ F̄_i(0) − 1 ≤ min{ (n−2)/(n−1) Σ G_i*, Σ G_i* − max_i G_i* }`.
pub fn check_gje(marginals: &[MarginalSpec], gstars: &[f64]) -> Result<ExistenceReport> {
    require_dimension(marginals.len())?;
    let q0 = survival_at_zero(marginals);
    check_caps(&q0, gstars)?;
    Ok(gje_report(&q0, gstars))
}

pub(crate) fn check_caps(q0: &[f64], caps: &[f64]) -> Result<()> {
    if caps.len() != q0.len() {
        return Err(Error::Shape { expected: q0.len(), found: caps.len() });
    }
    for (&c, &q) in caps.iter().zip(q0) {
        if !(c >= 0.0 && c <= q + EPS) {
            return Err(Error::Domain { what: "G* (must lie in [0, F̄(0)])", value: c });
        }
    }
    Ok(())
}

pub(crate) fn gje_report(q0: &[f64], caps: &[f64]) -> ExistenceReport {
    ExistenceReport::new(ExistenceKind::Gje, math::sum(q0) - 1.0, math::face_capacity_bound(caps))
}

/// Fréchet lower bound `max{Σ F_i(x_i) − (n−1), 0}`, which is the CDF of
/// the mutually exclusive vector whenever it exists.
pub fn me_frechet_cdf(marginals: &[MarginalSpec], x: &[f64]) -> Result<f64> {
    check_me(marginals)?.into_result()?;
    if x.len() != marginals.len() {
        return Err(Error::Shape { expected: marginals.len(), found: x.len() });
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain { what: "x", value: f64::NAN });
    }
    if x.iter().any(|&v| v < 0.0) {
        return Ok(0.0);
    }
    let n = marginals.len() as f64;
    let total: f64 = marginals.iter().zip(x).map(|(m, &xi)| 1.0 - m.survival_at(xi)).sum();
    Ok((total - (n - 1.0)).max(0.0))
}
