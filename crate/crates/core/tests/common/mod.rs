#![allow(dead_code)]

use jointex_core::allocation::{trivariate_allocation, FaceAllocation};
use jointex_core::copulas::CopulaSpec;
use jointex_core::distortions::DistortionSpec;
use jointex_core::marginals::MarginalSpec;
use jointex_core::model::JeModel;

pub const HALF: [f64; 3] = [0.5; 3];

pub fn uniforms(q0: &[f64]) -> Vec<MarginalSpec> {
    q0.iter().map(|&q| MarginalSpec::scaled_uniform(q, 1.0).unwrap()).collect()
}

/// Independence on {1,2}, comonotone on {1,3}, countermonotone on {2,3}.
pub fn trivariate_copulas() -> Vec<CopulaSpec> {
    vec![
        CopulaSpec::independence(2).unwrap(),
        CopulaSpec::comonotone(2).unwrap(),
        CopulaSpec::countermonotone(),
    ]
}

/// Three uniform marginals with atom 1/2 at zero and the trivariate
/// λ-allocation.
pub fn half_uniform_model(lambda: f64) -> JeModel {
    let alloc = trivariate_allocation(&HALF, &HALF, lambda).unwrap();
    JeModel::build(uniforms(&HALF), alloc, trivariate_copulas(), None).unwrap()
}

pub fn truncation() -> DistortionSpec {
    DistortionSpec::linear(0.125, 0.5).unwrap()
}

/// The same marginals and copulas with linear truncation `(1/8, 1/2)` on
/// every coordinate, so `G* = 3/8`.
pub fn truncated_model(lambda: f64) -> JeModel {
    let alloc: FaceAllocation = trivariate_allocation(&HALF, &[0.375; 3], lambda).unwrap();
    let g = truncation();
    JeModel::build(
        uniforms(&HALF),
        alloc,
        trivariate_copulas(),
        Some(vec![Some(g.clone()), Some(g.clone()), Some(g)]),
    )
    .unwrap()
}

/// Pearson correlations of the half-uniform model, from the moments
/// `E[X] = 1/4`, `Var X = 5/48` and the face contributions to `E[X_i X_j]`.
pub fn half_uniform_correlations(lambda: f64) -> [f64; 3] {
    let p = lambda / 2.0;
    let var = 1.0 / 6.0 - 1.0 / 16.0;
    // E[U V] on a face: 1/4 independent, 1/3 comonotone, 1/6 countermonotone
    let rho = |e: f64| (p * e - 1.0 / 16.0) / var;
    [rho(0.25), rho(1.0 / 3.0), rho(1.0 / 6.0)]
}

/// Advance an odometer over `dim` digits with `base` values each.
pub fn next_index(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
