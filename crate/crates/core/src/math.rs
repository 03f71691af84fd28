//! Float helpers that work without `std`.

/// Absolute tolerance for probability comparisons during validation.
pub const EPS: f64 = 1e-12;

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub(crate) fn sum(xs: &[f64]) -> f64 {
    xs.iter().sum()
}

pub(crate) fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `min{ (n−2)/(n−1) Σ c_i , Σ c_i − max_i c_i }`.
pub(crate) fn face_capacity_bound(caps: &[f64]) -> f64 {
    let n = caps.len();
    if n < 2 {
        return 0.0;
    }
    let total = sum(caps);
    let first = (n as f64 - 2.0) / (n as f64 - 1.0) * total;
    let second = total - max_of(caps);
    first.min(second)
}

pub(crate) fn is_probability(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}
