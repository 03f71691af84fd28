//! Face masses `p_I` and the constraints they must satisfy.
//!
//! For capacities `cap_i` (the atoms `F̄_i(0)` in the canonical construction,
//! the moduli `G_i*` for distorted margins) an allocation is feasible when
//!
//! ```text
//! Σ_{I ∋ i} p_I ≤ cap_i                  for every axis i
//! Σ_I (|I| − 1) p_I ≥ Σ_i F̄_i(0) − 1    (origin mass stays non-negative)
//! ```

mod faces;
mod lp;

use alloc::vec::Vec;

pub use faces::{enumerate_faces, FaceSet, MAX_DIMENSION};
pub use lp::{
    closed_form_optimum, lp_max_weighted_mass, DualPolytope, LpSolution, MAX_DUAL_DIMENSION,
    MAX_LP_DIMENSION,
};

use crate::error::{Constraint, Error, Result};
use crate::existence::{check_caps, gje_report, ExistenceKind, ExistenceReport};
use crate::math::{self, EPS};

/// Which axis constraint an allocation is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapKind {
    /// `cap_i = F̄_i(0)`.
    Canonical,
    /// `cap_i = G_i*`.
    Distorted,
}

impl CapKind {
    fn constraint(self) -> Constraint {
        match self {
            CapKind::Canonical => Constraint::AxisCapacity,
            CapKind::Distorted => Constraint::DistortedAxisCapacity,
        }
    }

    fn infer(q0: &[f64], caps: &[f64]) -> Self {
        if q0 == caps {
            CapKind::Canonical
        } else {
            CapKind::Distorted
        }
    }
}

/// Masses on every face `2 ≤ |I| ≤ n − 1`, in [`enumerate_faces`] order,
/// together with the axis capacities they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceAllocation {
    n: usize,
    faces: Vec<FaceSet>,
    masses: Vec<f64>,
    caps: Vec<f64>,
}

impl FaceAllocation {
    pub(crate) fn from_parts(
        n: usize,
        faces: Vec<FaceSet>,
        masses: Vec<f64>,
        caps: Vec<f64>,
    ) -> Self {
        Self { n, faces, masses, caps }
    }

    /// Explicit masses. Faces not listed get mass 0.
    ///
    /// Only the shape and the range `p_I ∈ [0, 1]` are checked here; the axis
    /// and origin constraints are checked by [`FaceAllocation::validate`] and
    /// when a model is built.
    pub fn from_masses(n: usize, masses: &[(FaceSet, f64)], caps: Vec<f64>) -> Result<Self> {
        if caps.len() != n {
            return Err(Error::Shape { expected: n, found: caps.len() });
        }
        let faces = enumerate_faces(n)?;
        let mut p = alloc::vec![0.0; faces.len()];
        for &(face, mass) in masses {
            let k = faces.iter().position(|&f| f == face).ok_or_else(|| {
                Error::InvalidSpec(alloc::format!("{face} is not a face in dimension {n}"))
            })?;
            if !math::is_probability(mass) {
                return Err(Error::ConstraintViolation {
                    constraint: Constraint::FaceMassRange,
                    index: None,
                    excess: if mass < 0.0 { -mass } else { mass - 1.0 },
                });
            }
            p[k] = mass;
        }
        Ok(Self { n, faces, masses: p, caps })
    }

    /// The all-zero allocation.
    pub fn zero(n: usize, caps: Vec<f64>) -> Result<Self> {
        Self::from_masses(n, &[], caps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[FaceSet] {
        &self.faces
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    pub fn iter(&self) -> impl Iterator<Item = (FaceSet, f64)> + '_ {
        self.faces.iter().copied().zip(self.masses.iter().copied())
    }

    /// `p_I`, or 0 for sets that are not faces.
    pub fn mass(&self, face: FaceSet) -> f64 {
        self.faces.iter().position(|&f| f == face).map_or(0.0, |k| self.masses[k])
    }

    /// `L_i = Σ_{I ∋ i} p_I`.
    pub fn axis_load(&self, i: usize) -> f64 {
        self.iter().filter(|(f, _)| f.contains(i)).map(|(_, p)| p).sum()
    }

    pub fn axis_loads(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.axis_load(i)).collect()
    }

    /// `Σ_I (|I| − 1) p_I`.
    pub fn weighted_mass(&self) -> f64 {
        self.iter().map(|(f, p)| (f.len() as f64 - 1.0) * p).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Check both constraint families, reporting the first violation.
    pub fn validate(&self, q0: &[f64], kind: CapKind) -> Result<()> {
        if q0.len() != self.n {
            return Err(Error::Shape { expected: self.n, found: q0.len() });
        }
        for &p in &self.masses {
            if !math::is_probability(p) {
                return Err(Error::ConstraintViolation {
                    constraint: Constraint::FaceMassRange,
                    index: None,
                    excess: if p < 0.0 { -p } else { p - 1.0 },
                });
            }
        }
        for (i, &cap) in self.caps.iter().enumerate() {
            let excess = self.axis_load(i) - cap;
            if excess > EPS {
                return Err(Error::ConstraintViolation {
                    constraint: kind.constraint(),
                    index: Some(i),
                    excess,
                });
            }
        }
        let excess = math::sum(q0) - 1.0 - self.weighted_mass();
        if excess > EPS {
            return Err(Error::ConstraintViolation {
                constraint: Constraint::OriginMass,
                index: None,
                excess,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AllocationStrategy {
    /// The LP maximizer of `Σ (|I| − 1) p_I`.
    MaxFaceMass,
    /// `t · p*` for the LP maximizer `p*` and `t ∈ [t_min, 1]`.
    Scaled(f64),
    /// The one-parameter trivariate family, `n = 3` only.
    TrivariateLambda(f64),
}

/// Existence check for capacities `caps`: `Σ q0 − 1 ≤ closed_form_optimum(caps)`.
fn existence(q0: &[f64], caps: &[f64]) -> Result<ExistenceReport> {
    if q0.len() < 2 {
        return Err(Error::Shape { expected: 2, found: q0.len() });
    }
    for &q in q0 {
        if !math::is_probability(q) {
            return Err(Error::Domain { what: "F̄(0)", value: q });
        }
    }
    check_caps(q0, caps)?;
    let mut report = gje_report(q0, caps);
    if CapKind::infer(q0, caps) == CapKind::Canonical {
        // with caps = q0 the bound reduces to Σ q0 ≤ n − 1
        report = ExistenceReport::new(ExistenceKind::Je, math::sum(q0), q0.len() as f64 - 1.0);
    }
    report.into_result()
}

/// Smallest admissible scale `t_min = (Σ q0 − 1)_+ / value`.
pub fn scaled_t_min(q0: &[f64], lp_value: f64) -> f64 {
    let need = (math::sum(q0) - 1.0).max(0.0);
    if need == 0.0 {
        0.0
    } else {
        need / lp_value
    }
}

pub fn feasible_allocation(
    q0: &[f64],
    caps: &[f64],
    strategy: AllocationStrategy,
) -> Result<FaceAllocation> {
    existence(q0, caps)?;
    let kind = CapKind::infer(q0, caps);
    let alloc = match strategy {
        AllocationStrategy::MaxFaceMass => lp_max_weighted_mass(caps)?.allocation,
        AllocationStrategy::Scaled(t) => {
            let sol = lp_max_weighted_mass(caps)?;
            let t_min = scaled_t_min(q0, sol.value);
            if !(t <= 1.0 + EPS && t >= t_min - EPS) {
                return Err(Error::Domain { what: "scale t", value: t });
            }
            let t = t.min(1.0);
            let masses = sol.allocation.masses.iter().map(|p| t * p).collect();
            FaceAllocation { masses, ..sol.allocation }
        }
        AllocationStrategy::TrivariateLambda(lambda) => {
            if q0.len() != 3 {
                return Err(Error::Usage("the trivariate-lambda strategy needs n = 3"));
            }
            trivariate_allocation(q0, caps, lambda)?
        }
    };
    alloc.validate(q0, kind)?;
    Ok(alloc)
}

fn require_trivariate(q0: &[f64], caps: &[f64]) -> Result<()> {
    if q0.len() != 3 {
        return Err(Error::Shape { expected: 3, found: q0.len() });
    }
    if caps.len() != 3 {
        return Err(Error::Shape { expected: 3, found: caps.len() });
    }
    Ok(())
}

/// Extremal values `(U_I, L_I)` for the three faces `{1,2}, {1,3}, {2,3}`.
fn trivariate_extremes(q0: &[f64], caps: &[f64]) -> [(FaceSet, f64, f64); 3] {
    let total = math::sum(q0);
    let pair = |i: usize, j: usize, k: usize| {
        let face = FaceSet::from_indices(&[i, j]).expect("index below 3");
        (face, caps[i].min(caps[j]), (total - caps[k] - 1.0).max(0.0))
    };
    [pair(0, 1, 2), pair(0, 2, 1), pair(1, 2, 0)]
}

/// Admissible interval `[λ_lo, λ_hi] ⊂ [0, 1]` of the trivariate family.
pub fn trivariate_lambda_bounds(q0: &[f64], caps: &[f64]) -> Result<(f64, f64)> {
    require_trivariate(q0, caps)?;
    existence(q0, caps)?;
    let ext = trivariate_extremes(q0, caps);
    let sum_l: f64 = ext.iter().map(|e| e.2).sum();
    let sum_gap: f64 = ext.iter().map(|e| e.1 - e.2).sum();
    let need = math::sum(q0) - 1.0 - sum_l;
    let lo = if need <= 0.0 {
        0.0
    } else if sum_gap > 0.0 {
        need / sum_gap
    } else {
        // existence makes this unreachable beyond round-off
        1.0
    };
    let mut hi: f64 = 1.0;
    for i in 0..3 {
        let mut load_l = 0.0;
        let mut gap = 0.0;
        for (face, u, l) in &ext {
            if face.contains(i) {
                load_l += l;
                gap += u - l;
            }
        }
        let room = caps[i] - load_l;
        if gap > 0.0 {
            hi = hi.min(room / gap);
        } else if room < -EPS {
            hi = f64::NEG_INFINITY;
        }
    }
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    if lo > hi + EPS {
        return Err(Error::Existence(ExistenceReport::new(ExistenceKind::Gje, lo, hi)));
    }
    Ok((lo, hi.max(lo)))
}

/// `p_I = λ U_I + (1 − λ) L_I` for `λ` inside [`trivariate_lambda_bounds`].
pub fn trivariate_allocation(q0: &[f64], caps: &[f64], lambda: f64) -> Result<FaceAllocation> {
    let (lo, hi) = trivariate_lambda_bounds(q0, caps)?;
    if !(lambda >= lo - EPS && lambda <= hi + EPS) {
        return Err(Error::Domain { what: "lambda", value: lambda });
    }
    let ext = trivariate_extremes(q0, caps);
    let masses: Vec<f64> = ext.iter().map(|(_, u, l)| lambda * u + (1.0 - lambda) * l).collect();
    let faces = ext.iter().map(|e| e.0).collect();
    let alloc = FaceAllocation::from_parts(3, faces, masses, caps.to_vec());
    alloc.validate(q0, CapKind::infer(q0, caps))?;
    Ok(alloc)
}

/// Raw coefficients `max{(q0_i + q0_j − q0_k)/2, 0}` for the faces
/// `{1,2}, {1,3}, {2,3}`, without any feasibility check.
pub fn axes_free_coefficients(q0: &[f64]) -> Result<[f64; 3]> {
    if q0.len() != 3 {
        return Err(Error::Shape { expected: 3, found: q0.len() });
    }
    let c = |i: usize, j: usize, k: usize| ((q0[i] + q0[j] - q0[k]) / 2.0).max(0.0);
    Ok([c(0, 1, 2), c(0, 2, 1), c(1, 2, 0)])
}

/// Allocation that leaves no mass on the axes, when it is feasible.
pub fn axes_free_trivariate(q0: &[f64]) -> Result<FaceAllocation> {
    let p = axes_free_coefficients(q0)?;
    for &q in q0 {
        if !math::is_probability(q) {
            return Err(Error::Domain { what: "F̄(0)", value: q });
        }
    }
    let alloc = FaceAllocation::from_parts(3, enumerate_faces(3)?, p.to_vec(), q0.to_vec());
    alloc.validate(q0, CapKind::Canonical)?;
    Ok(alloc)
}
