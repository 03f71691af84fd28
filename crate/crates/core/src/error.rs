use alloc::string::String;
use core::fmt;

use crate::existence::ExistenceReport;

pub type Result<T> = core::result::Result<T, Error>;

/// Named feasibility constraints on the face masses.
///
/// The display names are the tags used in diagnostics so that callers can
/// grep for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Axis capacity `Σ_{I∋i} p_I ≤ F̄_i(0)` (canonical construction).
    AxisCapacity,
    /// Axis capacity `Σ_{I∋i} p_I ≤ G_i*` (distorted construction).
    DistortedAxisCapacity,
    /// Origin non-negativity `Σ_I (|I|−1) p_I ≥ Σ_i F̄_i(0) − 1`.
    OriginMass,
    /// Each face mass lies in `[0, 1]`.
    FaceMassRange,
}

impl Constraint {
    pub fn tag(self) -> &'static str {
        match self {
            Constraint::AxisCapacity => "JE_parameters_1",
            Constraint::DistortedAxisCapacity => "G-JE_parameters_1",
            Constraint::OriginMass => "JE_parameters_2",
            Constraint::FaceMassRange => "face_mass_range",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {what} = {value} is out of range")]
    Domain { what: &'static str, value: f64 },

    #[error("shape error: expected length {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("cannot condition on a positive value: survival at zero is 0")]
    InvalidConditional,

    #[error("existence condition fails: {0}")]
    Existence(ExistenceReport),

    #[error("{constraint} violated{}: excess {excess:e}", index.map(|i| alloc::format!(" at index {}", i + 1)).unwrap_or_default())]
    ConstraintViolation {
        constraint: Constraint,
        /// Zero-based coordinate for the axis constraints.
        index: Option<usize>,
        /// Amount by which the constraint is exceeded (positive).
        excess: f64,
    },

    #[error("dimension {n} exceeds the supported maximum {max}")]
    Capacity { n: usize, max: usize },

    #[error("usage error: {0}")]
    Usage(&'static str),

    #[error("distortion for coordinate {} is incompatible with its marginal: b = {b} > F̄(0) = {q0}", index + 1)]
    Pairing { index: usize, b: f64, q0: f64 },

    #[error("correlation of coordinates {} and {} is undefined (zero variance)", i + 1, j + 1)]
    UndefinedCorrelation { i: usize, j: usize },

    #[error("point is not in {set}: {reason}")]
    Membership { set: &'static str, reason: &'static str },

    #[error("linear program did not converge within {0} pivots")]
    LpIterationLimit(usize),
}
