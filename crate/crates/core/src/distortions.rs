//! Marginal distortions `G : [0,1] → [0,1]` and their moduli `G*`.
//!
//! A distortion is non-decreasing and left-continuous with `G = 0` on
//! `[0, a]` and `G = 1` on `[b, 1]`. In a distorted model the face laws use
//! `G_i(F̄_i(x_i))` in place of `F̄_i(x_i) / F̄_i(0)`, and the axis capacity of
//! coordinate `i` becomes
//!
//! ```text
//! G_i* = inf { (F̄(x) − F̄(y)) / (G(F̄(x)) − G(F̄(y))) : 0 ≤ x < y, G(F̄(x)) ≠ G(F̄(y)) }.
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::marginals::MarginalSpec;
use crate::math::{self, EPS};

/// Survival levels in the coarse scan of [`DistortionSpec::g_star_numeric`].
pub const G_STAR_GRID: usize = 1000;
const G_STAR_MIN_DG: f64 = 1e-12;
const REFINE_CANDIDATES: usize = 8;
const REFINE_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub enum DistortionFamily {
    /// `G(u) = u / q0` on `[0, q0]`.
    IdentityCanonical,
    /// `G(u) = (u − a) / (b − a)` on `[a, b]`.
    LinearTruncation,
    /// `G(u) = ((u − a) / (b − a))^γ` on `[a, b]`.
    Power { gamma: f64 },
    /// Linear interpolation between `(u, G(u))` knots. A repeated `u` marks a
    /// jump; the value at the jump is the first (left) one.
    Tabulated { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    family: DistortionFamily,
    a: f64,
    b: f64,
}

impl DistortionSpec {
    /// The canonical distortion for a marginal with `F̄(0) = q0`.
    pub fn identity(q0: f64) -> Result<Self> {
        if !(q0 > 0.0 && q0 <= 1.0) {
            return Err(Error::Domain { what: "q0 of identity distortion", value: q0 });
        }
        Ok(Self { family: DistortionFamily::IdentityCanonical, a: 0.0, b: q0 })
    }

    pub fn linear(a: f64, b: f64) -> Result<Self> {
        check_ab(a, b)?;
        Ok(Self { family: DistortionFamily::LinearTruncation, a, b })
    }

    pub fn power(a: f64, b: f64, gamma: f64) -> Result<Self> {
        check_ab(a, b)?;
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain { what: "gamma", value: gamma });
        }
        Ok(Self { family: DistortionFamily::Power { gamma }, a, b })
    }

    /// Knots must be sorted by `u` with non-decreasing values, start at
    /// value 0 and end at value 1, and use each `u` at most twice.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidSpec("a tabulated distortion needs at least 2 knots".into()));
        }
        for &(u, g) in &knots {
            if !math::is_probability(u) || !math::is_probability(g) {
                return Err(Error::InvalidSpec(format!("knot ({u}, {g}) outside [0,1]²")));
            }
        }
        for w in knots.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::InvalidSpec("knots must be non-decreasing in u and G".into()));
            }
        }
        for w in knots.windows(3) {
            if w[0].0 == w[2].0 {
                return Err(Error::InvalidSpec(format!("more than two knots at u = {}", w[0].0)));
            }
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 1.0 {
            return Err(Error::InvalidSpec("tabulated values must run from 0 to 1".into()));
        }
        let a = knots.iter().rev().find(|k| k.1 == 0.0).map(|k| k.0).unwrap_or(0.0);
        let b = knots.iter().find(|k| k.1 == 1.0).map(|k| k.0).unwrap_or(1.0);
        Ok(Self { family: DistortionFamily::Tabulated { knots }, a, b })
    }

    pub fn family(&self) -> &DistortionFamily {
        &self.family
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `G(u)`; arguments outside `[0, 1]` are clamped.
    pub fn distort(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if let DistortionFamily::Tabulated { knots } = &self.family {
            return tabulated_value(knots, u);
        }
        if u <= self.a {
            return 0.0;
        }
        if u >= self.b {
            return 1.0;
        }
        let r = (u - self.a) / (self.b - self.a);
        match &self.family {
            DistortionFamily::IdentityCanonical | DistortionFamily::LinearTruncation => r,
            DistortionFamily::Power { gamma } => math::powf(r, *gamma),
            DistortionFamily::Tabulated { .. } => unreachable!(),
        }
    }

    /// `max{ u ∈ [0,1] : G(u) ≤ v }`.
    pub fn level_sup(&self, v: f64) -> f64 {
        if v >= 1.0 {
            return 1.0;
        }
        let v = v.max(0.0);
        let span = self.b - self.a;
        match &self.family {
            DistortionFamily::IdentityCanonical | DistortionFamily::LinearTruncation => {
                self.a + v * span
            }
            DistortionFamily::Power { gamma } => self.a + math::powf(v, 1.0 / gamma) * span,
            DistortionFamily::Tabulated { .. } => {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.distort(mid) <= v {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    fn check_pairing(&self, m: &MarginalSpec) -> Result<()> {
        if self.b > m.q0() + EPS {
            return Err(Error::Pairing { index: 0, b: self.b, q0: m.q0() });
        }
        Ok(())
    }

    /// `G*` for this distortion paired with `m`.
    ///
    /// Closed forms are used for the built-in families; tabulated
    /// distortions go through [`DistortionSpec::g_star_numeric`].
    pub fn g_star(&self, m: &MarginalSpec) -> Result<f64> {
        self.check_pairing(m)?;
        let span = self.b - self.a;
        Ok(match &self.family {
            DistortionFamily::IdentityCanonical => m.q0(),
            DistortionFamily::LinearTruncation => span,
            DistortionFamily::Power { gamma } if *gamma >= 1.0 => span / gamma,
            DistortionFamily::Power { .. } => 0.0,
            DistortionFamily::Tabulated { .. } => return self.g_star_numeric(m),
        })
    }

    /// Numeric infimum of `Δs / ΔG(s)` over survival levels `s ∈ [0, F̄(0)]`.
    ///
    /// The built-in marginals have continuous survival functions, so every
    /// level in `(0, F̄(0)]` is attained. Adjacent grid intervals with
    /// `ΔG ≤ 1e-12` are skipped, and the smallest ratios are refined by
    /// repeatedly keeping the steeper half.
    pub fn g_star_numeric(&self, m: &MarginalSpec) -> Result<f64> {
        self.check_pairing(m)?;
        let q0 = m.q0();
        let mut levels: Vec<f64> =
            (0..=G_STAR_GRID).map(|k| q0 * k as f64 / G_STAR_GRID as f64).collect();
        levels.push(self.a);
        levels.push(self.b.min(q0));
        if let DistortionFamily::Tabulated { knots } = &self.family {
            levels.extend(knots.iter().map(|k| k.0).filter(|&u| u <= q0));
        }
        levels.sort_by(f64::total_cmp);
        levels.dedup();

        let mut scored: Vec<(f64, f64, f64)> = levels
            .windows(2)
            .filter_map(|w| self.ratio(w[0], w[1]).map(|r| (r, w[0], w[1])))
            .collect();
        if scored.is_empty() {
            // G ∘ F̄ is constant: no admissible pair
            return Ok(q0);
        }
        scored.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut best = scored[0].0;
        for &(_, mut lo, mut hi) in scored.iter().take(REFINE_CANDIDATES) {
            for _ in 0..REFINE_STEPS {
                let mid = 0.5 * (lo + hi);
                let left = self.ratio(lo, mid);
                let right = self.ratio(mid, hi);
                match (left, right) {
                    (Some(l), Some(r)) if l <= r => hi = mid,
                    (Some(_), None) => hi = mid,
                    (_, Some(_)) => lo = mid,
                    (None, None) => break,
                }
                if let Some(r) = self.ratio(lo, hi) {
                    best = best.min(r);
                }
            }
        }
        Ok(best.clamp(0.0, q0))
    }

    fn ratio(&self, lo: f64, hi: f64) -> Option<f64> {
        let dg = self.distort(hi) - self.distort(lo);
        (dg > G_STAR_MIN_DG).then(|| (hi - lo) / dg)
    }

    /// `inf{ x ≥ 0 : G(F̄(x)) ≤ v }`.
    pub fn inverse_distorted_survival(&self, m: &MarginalSpec, v: f64) -> Result<f64> {
        if !math::is_probability(v) {
            return Err(Error::Domain { what: "v", value: v });
        }
        Ok(m.inverse_at(self.level_sup(v).min(1.0)))
    }
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && a < b && b <= 1.0) {
        return Err(Error::InvalidSpec(format!("need 0 ≤ a < b ≤ 1, got a = {a}, b = {b}")));
    }
    Ok(())
}

fn tabulated_value(knots: &[(f64, f64)], u: f64) -> f64 {
    let first = knots[0];
    if u <= first.0 {
        return if u < first.0 { 0.0 } else { first.1 };
    }
    let k = match knots.iter().position(|kn| kn.0 >= u) {
        Some(k) => k,
        None => return 1.0,
    };
    let (u1, g1) = knots[k];
    if u1 == u {
        return g1;
    }
    let (u0, g0) = knots[k - 1];
    g0 + (g1 - g0) * (u - u0) / (u1 - u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unif(q0: f64) -> MarginalSpec {
        MarginalSpec::scaled_uniform(q0, 1.0).unwrap()
    }

    #[test]
    fn distort_examples() {
        let g = DistortionSpec::linear(0.125, 0.5).unwrap();
        assert!((g.distort(5.0 / 16.0) - 0.5).abs() < 1e-15);
        let p = DistortionSpec::power(0.0, 0.5, 2.0).unwrap();
        assert!((p.distort(0.25) - 0.25).abs() < 1e-15);
        for d in [g, p, DistortionSpec::identity(0.5).unwrap()] {
            assert_eq!(d.distort(d.b()), 1.0);
            assert_eq!(d.distort(d.a()), 0.0);
            assert_eq!(d.distort(1.0), 1.0);
        }
    }

    #[test]
    fn g_star_examples() {
        let m = unif(0.5);
        assert_eq!(DistortionSpec::identity(0.5).unwrap().g_star(&m).unwrap(), 0.5);
        let g = DistortionSpec::linear(0.125, 0.5).unwrap();
        assert_eq!(g.g_star(&m).unwrap(), 0.375);
        let p = DistortionSpec::power(0.0, 0.5, 2.0).unwrap();
        assert_eq!(p.g_star(&m).unwrap(), 0.25);
        let p = DistortionSpec::power(0.0, 0.5, 0.5).unwrap();
        assert_eq!(p.g_star(&m).unwrap(), 0.0);
        let bad = DistortionSpec::linear(0.1, 0.6).unwrap();
        assert!(matches!(bad.g_star(&m), Err(Error::Pairing { .. })));
    }

    #[test]
    fn numeric_agrees_with_closed_forms() {
        let cases = [
            (DistortionSpec::identity(0.5).unwrap(), unif(0.5)),
            (DistortionSpec::linear(0.125, 0.5).unwrap(), unif(0.5)),
            (
                DistortionSpec::linear(0.1, 0.3).unwrap(),
                MarginalSpec::scaled_exponential(0.4, 2.0).unwrap(),
            ),
            (DistortionSpec::power(0.0, 0.5, 2.0).unwrap(), unif(0.5)),
            (DistortionSpec::power(0.05, 0.45, 4.0).unwrap(), unif(0.5)),
            (DistortionSpec::power(0.0, 0.5, 1.0).unwrap(), unif(0.5)),
            (DistortionSpec::power(0.0, 0.5, 0.5).unwrap(), unif(0.5)),
            (DistortionSpec::power(0.1, 0.4, 0.25).unwrap(), unif(0.9)),
        ];
        for (g, m) in cases {
            let exact = g.g_star(&m).unwrap();
            let numeric = g.g_star_numeric(&m).unwrap();
            assert!((exact - numeric).abs() < 1e-3, "{g:?}: {exact} vs {numeric}");
            assert!((0.0..=m.q0()).contains(&numeric));
        }
    }

    #[test]
    fn step_distortion_has_zero_modulus() {
        // jump from 0 to 1/2 at u = 0.2, then linear to 1 at u = 0.4
        let g = DistortionSpec::tabulated(vec![(0.0, 0.0), (0.2, 0.0), (0.2, 0.5), (0.4, 1.0)])
            .unwrap();
        assert_eq!(g.distort(0.2), 0.0);
        assert!(g.distort(0.2 + 1e-12) >= 0.5);
        let gs = g.g_star(&unif(0.5)).unwrap();
        assert!(gs < 1e-3, "{gs}");
    }

    #[test]
    fn flat_segments_are_ignored() {
        // G rises on [0.1, 0.2] and [0.3, 0.4] and is flat in between
        let g = DistortionSpec::tabulated(vec![
            (0.0, 0.0),
            (0.1, 0.0),
            (0.2, 0.5),
            (0.3, 0.5),
            (0.4, 1.0),
        ])
        .unwrap();
        assert_eq!((g.a(), g.b()), (0.1, 0.4));
        let gs = g.g_star(&unif(0.5)).unwrap();
        assert!((gs - 0.2).abs() < 1e-3, "{gs}");
    }

    #[test]
    fn tabulated_validation() {
        assert!(DistortionSpec::tabulated(vec![(0.0, 0.0)]).is_err());
        assert!(DistortionSpec::tabulated(vec![(0.0, 0.0), (0.5, 0.4)]).is_err());
        assert!(DistortionSpec::tabulated(vec![(0.0, 0.0), (0.5, 0.6), (0.4, 1.0)]).is_err());
        assert!(DistortionSpec::tabulated(vec![(0.0, 0.0), (0.2, 0.1), (0.2, 0.2), (0.2, 1.0)])
            .is_err());
        assert!(DistortionSpec::linear(0.5, 0.5).is_err());
        assert!(DistortionSpec::power(0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let m = unif(0.5);
        let id = DistortionSpec::identity(0.5).unwrap();
        assert!((id.inverse_distorted_survival(&m, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let g = DistortionSpec::linear(0.125, 0.5).unwrap();
        assert_eq!(g.inverse_distorted_survival(&m, 1.0).unwrap(), 0.0);
        assert!((g.inverse_distorted_survival(&m, 0.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn inverse_is_generalized_inverse() {
        let m = unif(0.5);
        let g = DistortionSpec::power(0.05, 0.45, 3.0).unwrap();
        for k in 0..=50 {
            let v = k as f64 / 50.0;
            let x = g.inverse_distorted_survival(&m, v).unwrap();
            assert!(g.distort(m.survival(x).unwrap()) <= v + 1e-12);
            if x > 1e-9 {
                assert!(g.distort(m.survival(x - 1e-9).unwrap()) > v - 1e-9);
            }
        }
    }

    #[test]
    fn level_sup_matches_bisection() {
        let specs = [
            DistortionSpec::linear(0.125, 0.5).unwrap(),
            DistortionSpec::power(0.0, 0.5, 2.0).unwrap(),
            DistortionSpec::identity(0.7).unwrap(),
        ];
        for g in specs {
            let knots: Vec<(f64, f64)> =
                (0..=2000).map(|k| k as f64 / 2000.0).map(|u| (u, g.distort(u))).collect();
            let t = DistortionSpec::tabulated(knots).unwrap();
            for k in 0..20 {
                let v = k as f64 / 20.0;
                assert!((g.level_sup(v) - t.level_sup(v)).abs() < 2e-3, "{g:?} at {v}");
            }
        }
    }
}
