//! The assembled model: marginals, face masses, face copulas and optional
//! distortions.
//!
//! Probability is split into three kinds of regions:
//!
//! - face `I`: exactly the coordinates in `I` are positive, with
//!   `P(X_I > x_I, X_{N∖I} = 0) = p_I · C_I(s_i(x_i), i ∈ I)`;
//! - axis `i`: only coordinate `i` is positive, with survival
//!   `F̄_i(x) − L_i · s_i(x)` where `L_i = Σ_{I∋i} p_I`;
//! - the origin, with mass `1 − Σ_i F̄_i(0) + Σ_I (|I| − 1) p_I`.
//!
//! The face scale is `s_i(x) = F̄_i(x) / F̄_i(0)` for canonical coordinates
//! and `s_i(x) = G_i(F̄_i(x))` for distorted ones.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::distr::Open01;
use rand::Rng;

use crate::allocation::{enumerate_faces, CapKind, FaceAllocation, FaceSet};
use crate::copulas::CopulaSpec;
use crate::distortions::DistortionSpec;
use crate::error::{Constraint, Error, Result};
use crate::existence::{check_gje, check_je, check_me, survival_at_zero};
use crate::marginals::MarginalSpec;
use crate::math::EPS;

/// Tolerance for allocation capacities that were computed separately from
/// the model's own `G*` values.
const CAP_MATCH_TOL: f64 = 1e-9;
const AXIS_BISECTION_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Face(FaceSet),
    /// Zero-based coordinate.
    Axis(usize),
    Origin,
    /// Rows of an unconstrained control sample.
    Free,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Face(face) => {
                f.write_str("face:")?;
                let mut first = true;
                for i in face.indices() {
                    if !first {
                        f.write_str("-")?;
                    }
                    write!(f, "{}", i + 1)?;
                    first = false;
                }
                Ok(())
            }
            Region::Axis(i) => write!(f, "axis:{}", i + 1),
            Region::Origin => f.write_str("origin"),
            Region::Free => f.write_str("free"),
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("bad region tag {s:?}"));
        match s {
            "origin" => return Ok(Region::Origin),
            "free" => return Ok(Region::Free),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("face:") {
            let face: FaceSet = rest.replace('-', ",").parse().map_err(|_| bad())?;
            return Ok(Region::Face(face));
        }
        if let Some(rest) = s.strip_prefix("axis:") {
            let i: usize = rest.parse().map_err(|_| bad())?;
            if i == 0 {
                return Err(bad());
            }
            return Ok(Region::Axis(i - 1));
        }
        Err(bad())
    }
}

impl Region {
    /// Whether coordinate `i` is strictly positive in this region.
    pub fn is_active(self, i: usize) -> bool {
        match self {
            Region::Face(f) => f.contains(i),
            Region::Axis(k) => k == i,
            Region::Origin => false,
            Region::Free => true,
        }
    }
}

/// Rows in `[0, ∞)^n` stored row-major, with the region each row came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    n: usize,
    values: Vec<f64>,
    regions: Vec<Region>,
}

impl SampleBatch {
    pub fn new(n: usize) -> Self {
        Self { n, values: Vec::new(), regions: Vec::new() }
    }

    pub fn from_rows(n: usize, values: Vec<f64>, regions: Vec<Region>) -> Result<Self> {
        if values.len() != n * regions.len() {
            return Err(Error::Shape { expected: n * regions.len(), found: values.len() });
        }
        Ok(Self { n, values, regions })
    }

    pub fn push(&mut self, row: &[f64], region: Region) {
        assert_eq!(row.len(), self.n, "row has wrong length");
        self.values.extend_from_slice(row);
        self.regions.push(region);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n.max(1))
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone)]
pub struct JeModel {
    marginals: Vec<MarginalSpec>,
    allocation: FaceAllocation,
    copulas: Vec<CopulaSpec>,
    distortions: Vec<Option<DistortionSpec>>,
    caps: Vec<f64>,
    axis_mass: Vec<f64>,
    origin_mass: f64,
    /// Cumulative region masses: faces, then axes, then the origin.
    cumulative: Vec<f64>,
}

impl JeModel {
    /// Assemble and validate a model.
    ///
    /// `copulas` follows the face order of `allocation`. `distortions`, when
    /// given, has one entry per coordinate; `None` entries keep the
    /// canonical scale `F̄_i / F̄_i(0)`.
    pub fn build(
        marginals: Vec<MarginalSpec>,
        allocation: FaceAllocation,
        copulas: Vec<CopulaSpec>,
        distortions: Option<Vec<Option<DistortionSpec>>>,
    ) -> Result<Self> {
        let n = marginals.len();
        if n < 2 {
            return Err(Error::Shape { expected: 2, found: n });
        }
        if allocation.n() != n {
            return Err(Error::Shape { expected: n, found: allocation.n() });
        }
        if copulas.len() != allocation.faces().len() {
            return Err(Error::Shape { expected: allocation.faces().len(), found: copulas.len() });
        }
        for (face, c) in allocation.faces().iter().zip(&copulas) {
            if c.dimension() != face.len() {
                return Err(Error::Shape { expected: face.len(), found: c.dimension() });
            }
        }
        let distortions = distortions.unwrap_or_else(|| vec![None; n]);
        if distortions.len() != n {
            return Err(Error::Shape { expected: n, found: distortions.len() });
        }
        let q0 = survival_at_zero(&marginals);
        let distorted = distortions.iter().any(Option::is_some);

        let mut caps = Vec::with_capacity(n);
        for (i, (m, d)) in marginals.iter().zip(&distortions).enumerate() {
            caps.push(match d {
                None => m.q0(),
                Some(g) => g.g_star(m).map_err(|e| match e {
                    Error::Pairing { b, q0, .. } => Error::Pairing { index: i, b, q0 },
                    other => other,
                })?,
            });
        }
        if distorted {
            check_gje(&marginals, &caps)?.into_result()?;
        } else {
            check_je(&marginals)?.into_result()?;
        }
        for (i, (&mine, &theirs)) in caps.iter().zip(allocation.caps()).enumerate() {
            if (mine - theirs).abs() > CAP_MATCH_TOL {
                return Err(Error::InvalidSpec(format!(
                    "allocation capacity {theirs} for coordinate {} does not match {mine}",
                    i + 1
                )));
            }
        }
        let kind = if distorted { CapKind::Distorted } else { CapKind::Canonical };
        allocation.validate(&q0, kind)?;

        let loads = allocation.axis_loads();
        let axis_mass: Vec<f64> = q0.iter().zip(&loads).map(|(q, l)| q - l).collect();
        let origin_mass = 1.0 - q0.iter().sum::<f64>() + allocation.weighted_mass();
        for (i, &m) in axis_mass.iter().enumerate() {
            if m < -EPS {
                return Err(Error::ConstraintViolation {
                    constraint: if distorted {
                        Constraint::DistortedAxisCapacity
                    } else {
                        Constraint::AxisCapacity
                    },
                    index: Some(i),
                    excess: -m,
                });
            }
        }
        if origin_mass < -EPS {
            return Err(Error::ConstraintViolation {
                constraint: Constraint::OriginMass,
                index: None,
                excess: -origin_mass,
            });
        }

        let mut cumulative = Vec::with_capacity(allocation.faces().len() + n + 1);
        let mut acc = 0.0;
        for &m in allocation.masses().iter().chain(&axis_mass).chain(core::iter::once(&origin_mass))
        {
            acc += m.max(0.0);
            cumulative.push(acc);
        }

        Ok(Self {
            marginals,
            allocation,
            copulas,
            distortions,
            caps,
            axis_mass,
            origin_mass,
            cumulative,
        })
    }

    /// Mutually exclusive model: no face mass, independence copulas.
    pub fn me_model(marginals: Vec<MarginalSpec>) -> Result<Self> {
        check_me(&marginals)?.into_result()?;
        let n = marginals.len();
        let q0 = survival_at_zero(&marginals);
        let allocation = FaceAllocation::zero(n, q0)?;
        let copulas = independence_copulas(n)?;
        Self::build(marginals, allocation, copulas, None)
    }

    pub fn n(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[MarginalSpec] {
        &self.marginals
    }

    pub fn allocation(&self) -> &FaceAllocation {
        &self.allocation
    }

    pub fn copulas(&self) -> &[CopulaSpec] {
        &self.copulas
    }

    pub fn distortions(&self) -> &[Option<DistortionSpec>] {
        &self.distortions
    }

    pub fn is_distorted(&self) -> bool {
        self.distortions.iter().any(Option::is_some)
    }

    /// Axis capacities: `F̄_i(0)` or `G_i*`.
    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    pub fn axis_mass(&self) -> &[f64] {
        &self.axis_mass
    }

    pub fn origin_mass(&self) -> f64 {
        self.origin_mass
    }

    /// Every region with its mass: faces in enumeration order, then the
    /// axes, then the origin.
    pub fn region_masses(&self) -> Vec<(Region, f64)> {
        let mut out: Vec<(Region, f64)> =
            self.allocation.iter().map(|(f, p)| (Region::Face(f), p)).collect();
        out.extend(self.axis_mass.iter().enumerate().map(|(i, &m)| (Region::Axis(i), m)));
        out.push((Region::Origin, self.origin_mass));
        out
    }

    /// Face scale `s_i` at survival level `t = F̄_i(x)`.
    fn face_scale(&self, i: usize, t: f64) -> f64 {
        match &self.distortions[i] {
            Some(g) => g.distort(t),
            None => {
                let q = self.marginals[i].q0();
                if q == 0.0 {
                    0.0
                } else {
                    t / q
                }
            }
        }
    }

    /// Exact joint CDF `P(X ≤ x)`.
    pub fn cdf(&self, x: &[f64]) -> Result<f64> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::Shape { expected: n, found: x.len() });
        }
        if let Some(&bad) = x.iter().find(|v| v.is_nan()) {
            return Err(Error::Domain { what: "x", value: bad });
        }
        if x.iter().any(|&v| v < 0.0) {
            return Ok(0.0);
        }
        if x.iter().all(|&v| v == 0.0) {
            // non-negative vector: P(X ≤ 0) is the atom at the origin
            return Ok(self.origin_mass);
        }
        let surv: Vec<f64> =
            self.marginals.iter().zip(x).map(|(m, &xi)| m.survival_at(xi)).collect();
        let scale: Vec<f64> =
            surv.iter().enumerate().map(|(i, &t)| self.face_scale(i, t)).collect();
        let mut total = 1.0 - surv.iter().sum::<f64>();
        let mut u = Vec::new();
        for ((face, p), copula) in self.allocation.iter().zip(&self.copulas) {
            if p == 0.0 {
                continue;
            }
            let members: Vec<usize> = face.indices().collect();
            let k = members.len();
            // every sub-face I ⊆ J with |I| ≥ 2
            for mask in 1u32..(1 << k) {
                let size = mask.count_ones();
                if size < 2 {
                    continue;
                }
                u.clear();
                u.extend(members.iter().enumerate().map(|(pos, &i)| {
                    if mask & (1 << pos) != 0 {
                        scale[i]
                    } else {
                        1.0
                    }
                }));
                let sign = if size % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * p * copula.cdf_at(&u);
            }
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Draw `count` rows.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> SampleBatch {
        let n = self.n();
        let mut batch = SampleBatch {
            n,
            values: Vec::with_capacity(n * count),
            regions: Vec::with_capacity(count),
        };
        let mut row = vec![0.0; n];
        let mut scratch = Vec::new();
        for _ in 0..count {
            let region = self.sample_row(rng, &mut row, &mut scratch);
            batch.values.extend_from_slice(&row);
            batch.regions.push(region);
        }
        batch
    }

    fn pick_region<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let r: f64 = rng.random();
        let total = *self.cumulative.last().expect("at least the origin");
        let target = r * total;
        match self.cumulative.iter().position(|&c| target < c) {
            Some(k) => k,
            None => {
                // round-off at the top end: last region with positive mass
                let mut k = self.cumulative.len() - 1;
                while k > 0 && self.cumulative[k] == self.cumulative[k - 1] {
                    k -= 1;
                }
                k
            }
        }
    }

    fn sample_row<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        row: &mut [f64],
        u: &mut Vec<f64>,
    ) -> Region {
        row.fill(0.0);
        let faces = self.allocation.faces();
        let k = self.pick_region(rng);
        if k < faces.len() {
            let face = faces[k];
            let copula = &self.copulas[k];
            u.resize(face.len(), 0.0);
            loop {
                copula.sample_into(rng, u);
                let mut ok = true;
                for (&ui, i) in u.iter().zip(face.indices()) {
                    let x = self.face_coordinate(i, ui);
                    ok &= x > 0.0;
                    row[i] = x;
                }
                // a face row must be strictly positive on the face; rounding
                // at the top of the scale can produce an exact zero
                if ok {
                    return Region::Face(face);
                }
            }
        }
        let k = k - faces.len();
        if k < self.n() {
            let i = k;
            loop {
                let v: f64 = rng.sample(Open01);
                let x = self.axis_coordinate(i, v);
                if x > 0.0 {
                    row[i] = x;
                    return Region::Axis(i);
                }
            }
        }
        Region::Origin
    }

    fn face_coordinate(&self, i: usize, u: f64) -> f64 {
        let m = &self.marginals[i];
        match &self.distortions[i] {
            None => m.conditional_inverse(u),
            Some(g) => m.inverse_at(g.level_sup(u)),
        }
    }

    /// Inverse of the normalized axis survival `(F̄ − L s)(x) / (F̄(0) − L)`.
    fn axis_coordinate(&self, i: usize, v: f64) -> f64 {
        let m = &self.marginals[i];
        if self.distortions[i].is_none() {
            // (F̄ − L F̄/q0) / (q0 − L) = F̄ / q0
            return m.conditional_inverse(v);
        }
        let load = self.allocation.axis_load(i);
        let q = m.q0();
        let target = v * (q - load);
        let h = |t: f64| t - load * self.face_scale(i, t);
        // largest survival level t with h(t) ≤ target; h is non-decreasing
        let (mut lo, mut hi) = (0.0, q);
        for _ in 0..AXIS_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if h(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        m.inverse_at(lo)
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (r, m) in self.region_masses() {
            s.push_str(&format!("{r}\t{m}\n"));
        }
        s
    }
}

/// One independence copula per face of dimension `n`, in face order.
pub fn independence_copulas(n: usize) -> Result<Vec<CopulaSpec>> {
    enumerate_faces(n)?.iter().map(|f| CopulaSpec::independence(f.len())).collect()
}

/// Draw `count` rows with independent coordinates from the given marginals.
///
/// This is the control coupling for the exclusivity checks; rows are
/// tagged [`Region::Free`].
pub fn sample_independent<R: Rng + ?Sized>(
    marginals: &[MarginalSpec],
    rng: &mut R,
    count: usize,
) -> SampleBatch {
    let n = marginals.len();
    let mut batch = SampleBatch::new(n);
    let mut row = vec![0.0; n];
    for _ in 0..count {
        for (x, m) in row.iter_mut().zip(marginals) {
            // P(X > 0) = q0, then the positive part by inversion
            *x = if rng.random::<f64>() < m.q0() {
                m.conditional_inverse(rng.sample(Open01))
            } else {
                0.0
            };
        }
        batch.push(&row, Region::Free);
    }
    batch
}
