//! Marginal laws on `[0, ∞)` with an explicit atom at zero.
//!
//! Every marginal is described by `q0 = F̄(0) = P(X > 0)` and the shape of
//! its survival curve on the positive half-line. The atom at zero carries
//! mass `1 − q0`. All built-in families have a survival function that is
//! continuous on `[0, ∞)`, so every level in `(0, q0]` is attained.
//!
//! Inversion uses the generalized inverse `inf{x ≥ 0 : F̄(x) ≤ p}`, which
//! maps a flat survival segment to its left endpoint.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, EPS};

#[derive(Debug, Clone, PartialEq)]
pub enum MarginalFamily {
    /// `F̄(x) = q0 · (1 − x/scale)` on `[0, scale]`, zero beyond.
    ScaledUniform { scale: f64 },
    /// `F̄(x) = q0 · exp(−rate · x)`.
    ScaledExponential { rate: f64 },
    /// Linear interpolation between `(x, F̄(x))` knots. The first knot is at
    /// `x = 0` with survival `q0`, the last has survival `0`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Degenerate law `X = 0` almost surely.
    PointMassAtZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpec {
    family: MarginalFamily,
    q0: f64,
}

impl MarginalSpec {
    pub fn new(family: MarginalFamily, q0: f64) -> Result<Self> {
        if !math::is_probability(q0) {
            return Err(Error::Domain { what: "q0", value: q0 });
        }
        match &family {
            MarginalFamily::ScaledUniform { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Domain { what: "scale", value: *scale });
                }
            }
            MarginalFamily::ScaledExponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::Domain { what: "rate", value: *rate });
                }
            }
            MarginalFamily::PiecewiseLinear { knots } => validate_knots(knots, q0)?,
            MarginalFamily::PointMassAtZero => {
                if q0 != 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "point mass at zero requires q0 = 0, got {q0}"
                    )));
                }
            }
        }
        Ok(Self { family, q0 })
    }

    pub fn scaled_uniform(q0: f64, scale: f64) -> Result<Self> {
        Self::new(MarginalFamily::ScaledUniform { scale }, q0)
    }

    pub fn scaled_exponential(q0: f64, rate: f64) -> Result<Self> {
        Self::new(MarginalFamily::ScaledExponential { rate }, q0)
    }

    /// Piecewise-linear survival; `q0` is read from the first knot.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let q0 = knots.first().map(|k| k.1).unwrap_or(f64::NAN);
        Self::new(MarginalFamily::PiecewiseLinear { knots }, q0)
    }

    pub fn point_mass_at_zero() -> Self {
        Self { family: MarginalFamily::PointMassAtZero, q0: 0.0 }
    }

    pub fn family(&self) -> &MarginalFamily {
        &self.family
    }

    /// `F̄(0) = P(X > 0)`.
    pub fn q0(&self) -> f64 {
        self.q0
    }

    /// `F̄(x) = P(X > x)` for `x ≥ 0` (including `+∞`).
    pub fn survival(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain { what: "x", value: x });
        }
        Ok(self.survival_at(x))
    }

    /// `F(x) = P(X ≤ x)`; zero for negative `x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain { what: "x", value: x });
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        Ok(1.0 - self.survival_at(x))
    }

    pub(crate) fn survival_at(&self, x: f64) -> f64 {
        match &self.family {
            MarginalFamily::ScaledUniform { scale } => {
                if x >= *scale {
                    0.0
                } else {
                    self.q0 * (1.0 - x / scale)
                }
            }
            MarginalFamily::ScaledExponential { rate } => {
                if x == f64::INFINITY {
                    0.0
                } else {
                    self.q0 * math::exp(-rate * x)
                }
            }
            MarginalFamily::PiecewiseLinear { knots } => piecewise_survival(knots, x),
            MarginalFamily::PointMassAtZero => 0.0,
        }
    }

    /// Generalized inverse `inf{x ≥ 0 : F̄(x) ≤ p}`.
    ///
    /// Returns `0` for `p ≥ q0` and `+∞` when the survival never reaches `p`
    /// (only `p = 0` for the exponential family).
    pub fn inverse_survival(&self, p: f64) -> Result<f64> {
        if !math::is_probability(p) {
            return Err(Error::Domain { what: "p", value: p });
        }
        Ok(self.inverse_at(p))
    }

    pub(crate) fn inverse_at(&self, p: f64) -> f64 {
        if p >= self.q0 {
            return 0.0;
        }
        match &self.family {
            MarginalFamily::ScaledUniform { scale } => scale * (1.0 - p / self.q0),
            MarginalFamily::ScaledExponential { rate } => {
                if p == 0.0 {
                    f64::INFINITY
                } else {
                    math::ln(self.q0 / p) / rate
                }
            }
            MarginalFamily::PiecewiseLinear { knots } => piecewise_inverse(knots, p, self.q0 - p),
            MarginalFamily::PointMassAtZero => 0.0,
        }
    }

    /// Draw from the law of `X` given `X > 0` using a uniform variate
    /// `u ∈ (0, 1]`: returns `inverse_survival(u · q0)`.
    pub fn sample_positive_part(&self, u: f64) -> Result<f64> {
        if self.q0 == 0.0 {
            return Err(Error::InvalidConditional);
        }
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain { what: "u", value: u });
        }
        Ok(self.conditional_inverse(u))
    }

    /// Inverse of the conditional survival `F̄(x)/q0` at level `u`.
    ///
    /// Equal to `inverse_at(u * q0)` but evaluated from the deficit
    /// `q0 (1 − u)` so that `u < 1` always yields a strictly positive value.
    pub(crate) fn conditional_inverse(&self, u: f64) -> f64 {
        match &self.family {
            MarginalFamily::ScaledUniform { scale } => scale * (1.0 - u),
            MarginalFamily::ScaledExponential { rate } => -math::ln(u) / rate,
            MarginalFamily::PiecewiseLinear { knots } => {
                if u >= 1.0 {
                    0.0
                } else {
                    piecewise_inverse(knots, u * self.q0, self.q0 * (1.0 - u))
                }
            }
            MarginalFamily::PointMassAtZero => 0.0,
        }
    }

    /// Right end of the support (`+∞` for the exponential family).
    pub fn support_max(&self) -> f64 {
        match &self.family {
            MarginalFamily::ScaledUniform { scale } => *scale,
            MarginalFamily::ScaledExponential { .. } => f64::INFINITY,
            MarginalFamily::PiecewiseLinear { knots } => {
                knots.iter().find(|k| k.1 == 0.0).map(|k| k.0).unwrap_or(0.0)
            }
            MarginalFamily::PointMassAtZero => 0.0,
        }
    }
}

fn validate_knots(knots: &[(f64, f64)], q0: f64) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidSpec("piecewise-linear needs at least two knots".into()));
    }
    if knots[0].0 != 0.0 {
        return Err(Error::InvalidSpec(format!("first knot must be at x = 0, got {}", knots[0].0)));
    }
    if (knots[0].1 - q0).abs() > EPS {
        return Err(Error::InvalidSpec(format!(
            "first knot survival {} does not match q0 = {q0}",
            knots[0].1
        )));
    }
    for (x, s) in knots {
        if !x.is_finite() || !math::is_probability(*s) {
            return Err(Error::InvalidSpec(format!("invalid knot ({x}, {s})")));
        }
    }
    for w in knots.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidSpec("knot abscissae must be strictly increasing".into()));
        }
        if w[1].1 > w[0].1 {
            return Err(Error::InvalidSpec("knot survivals must be non-increasing".into()));
        }
    }
    let last = knots[knots.len() - 1].1;
    if last != 0.0 {
        return Err(Error::InvalidSpec(format!("last knot survival must be 0, got {last}")));
    }
    Ok(())
}

fn piecewise_survival(knots: &[(f64, f64)], x: f64) -> f64 {
    // first knot with abscissa > x
    let k = knots.partition_point(|kn| kn.0 <= x);
    if k == 0 {
        return knots[0].1;
    }
    if k == knots.len() {
        return knots[k - 1].1;
    }
    let (x0, s0) = knots[k - 1];
    let (x1, s1) = knots[k];
    s0 + (s1 - s0) * (x - x0) / (x1 - x0)
}

/// `inf{x : F̄(x) ≤ p}` where `deficit = q0 − p` (passed separately for accuracy
/// on the first segment). Assumes `p < q0`.
fn piecewise_inverse(knots: &[(f64, f64)], p: f64, deficit: f64) -> f64 {
    for (k, w) in knots.windows(2).enumerate() {
        let (x0, s0) = w[0];
        let (x1, s1) = w[1];
        if s1 <= p {
            // s0 > p here: either k = 0 (s0 = q0 > p) or the previous segment ended above p.
            let drop = if k == 0 { deficit } else { s0 - p };
            let frac = drop / (s0 - s1);
            return x0 + frac.min(1.0) * (x1 - x0);
        }
    }
    knots[knots.len() - 1].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half_uniform() -> MarginalSpec {
        MarginalSpec::scaled_uniform(0.5, 1.0).unwrap()
    }

    #[test]
    fn survival_examples() {
        let m = half_uniform();
        assert_eq!(m.survival(0.0).unwrap(), 0.5);
        assert_eq!(m.survival(1.0).unwrap(), 0.0);
        assert_eq!(MarginalSpec::point_mass_at_zero().survival(0.0).unwrap(), 0.0);
        assert_eq!(m.survival(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn survival_rejects_negative() {
        assert!(matches!(half_uniform().survival(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn inverse_examples() {
        let m = half_uniform();
        assert!((m.inverse_survival(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(m.inverse_survival(0.5).unwrap(), 0.0);
        let e = MarginalSpec::scaled_exponential(0.3, 1.0).unwrap();
        let p = 0.3 * (-2.0f64).exp();
        assert!((e.inverse_survival(p).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(e.inverse_survival(0.0).unwrap(), f64::INFINITY);
        assert!(m.inverse_survival(1.5).is_err());
    }

    #[test]
    fn positive_part_examples() {
        let m = half_uniform();
        assert!((m.sample_positive_part(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(m.sample_positive_part(1.0).unwrap(), 0.0);
        // 0.4 (1 − x/2) = 0.2  ⇒  x = 1
        let pl = MarginalSpec::piecewise_linear(vec![(0.0, 0.4), (2.0, 0.0)]).unwrap();
        assert!((pl.sample_positive_part(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            MarginalSpec::point_mass_at_zero().sample_positive_part(0.5),
            Err(Error::InvalidConditional)
        ));
        assert!(m.sample_positive_part(0.0).is_err());
    }

    #[test]
    fn flat_segment_maps_to_left_endpoint() {
        let pl =
            MarginalSpec::piecewise_linear(vec![(0.0, 0.4), (1.0, 0.2), (2.0, 0.2), (3.0, 0.0)])
                .unwrap();
        assert!((pl.inverse_survival(0.2).unwrap() - 1.0).abs() < 1e-15);
        assert!((pl.inverse_survival(0.1).unwrap() - 2.5).abs() < 1e-15);
        assert!((pl.survival(1.5).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn flat_leading_segment() {
        let pl = MarginalSpec::piecewise_linear(vec![(0.0, 0.6), (1.0, 0.6), (2.0, 0.0)]).unwrap();
        assert_eq!(pl.inverse_survival(0.6).unwrap(), 0.0);
        assert!((pl.inverse_survival(0.3).unwrap() - 1.5).abs() < 1e-15);
        // just below q0 the inverse jumps to the end of the flat run
        assert!(pl.sample_positive_part(0.999_999).unwrap() >= 1.0);
    }

    #[test]
    fn knot_validation() {
        assert!(MarginalSpec::piecewise_linear(vec![(0.0, 0.4)]).is_err());
        assert!(MarginalSpec::piecewise_linear(vec![(0.5, 0.4), (1.0, 0.0)]).is_err());
        assert!(MarginalSpec::piecewise_linear(vec![(0.0, 0.4), (1.0, 0.5), (2.0, 0.0)]).is_err());
        assert!(MarginalSpec::piecewise_linear(vec![(0.0, 0.4), (1.0, 0.1)]).is_err());
        assert!(MarginalSpec::piecewise_linear(vec![(0.0, 0.4), (0.0, 0.0)]).is_err());
        assert!(MarginalSpec::new(MarginalFamily::PointMassAtZero, 0.3).is_err());
        assert!(MarginalSpec::scaled_uniform(1.2, 1.0).is_err());
        assert!(MarginalSpec::scaled_exponential(0.5, 0.0).is_err());
    }

    #[test]
    fn conditional_inverse_matches_generalized_inverse() {
        let specs = [
            half_uniform(),
            MarginalSpec::scaled_exponential(0.3, 2.0).unwrap(),
            MarginalSpec::piecewise_linear(vec![(0.0, 0.7), (0.5, 0.5), (1.0, 0.5), (3.0, 0.0)])
                .unwrap(),
        ];
        for m in &specs {
            for k in 1..=1000 {
                let u = k as f64 / 1000.0;
                let a = m.conditional_inverse(u);
                let b = m.inverse_at(u * m.q0());
                assert!((a - b).abs() < 1e-12, "{m:?} u={u}: {a} vs {b}");
            }
        }
    }
}
