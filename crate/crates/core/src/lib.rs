//! Jointly exclusive (JE) random vectors.
//!
//! A non-negative random vector is jointly exclusive when its components are
//! never simultaneously strictly positive: the support avoids the open orthant
//! `(0, ∞)^n`. This crate builds such vectors with prescribed marginals by
//! spreading probability over the orthant's boundary faces, the coordinate
//! axes and the origin, with a free copula on each face.
//!
//! The building blocks are:
//!
//! - [`marginals`]: laws on `[0, ∞)` with an explicit atom at zero.
//! - [`copulas`]: the per-face dependence (independence, comonotone,
//!   countermonotone and convex mixtures).
//! - [`existence`]: the marginal conditions under which mutually exclusive,
//!   jointly exclusive and distorted (G-JE) vectors exist.
//! - [`allocation`]: face enumeration and the face-mass linear program.
//! - [`distortions`]: marginal distortion functions and their moduli `G*`.
//! - [`model`]: the assembled model with sampling and an exact CDF.
//! - [`stats`]: Monte Carlo verification statistics over sample batches.
//! - [`transforms`]: reflection, translation and the bijection between the
//!   JE support and the zero-sum hyperplane of joint mixability.
//!
//! The crate is `no_std` (it needs `alloc`). Randomness is supplied by the
//! caller through [`rand::Rng`], so every draw is reproducible given a seeded
//! generator.
//!
//! ```
//! use jointex_core::allocation::trivariate_allocation;
//! use jointex_core::copulas::CopulaSpec;
//! use jointex_core::marginals::MarginalSpec;
//! use jointex_core::model::JeModel;
//!
//! let m = MarginalSpec::scaled_uniform(0.5, 1.0).unwrap();
//! let marginals = vec![m.clone(), m.clone(), m];
//! let q0 = [0.5, 0.5, 0.5];
//! let alloc = trivariate_allocation(&q0, &q0, 0.4).unwrap();
//! let copulas = vec![
//!     CopulaSpec::independence(2).unwrap(),
//!     CopulaSpec::comonotone(2).unwrap(),
//!     CopulaSpec::countermonotone(),
//! ];
//! let model = JeModel::build(marginals, alloc, copulas, None).unwrap();
//! assert!((model.origin_mass() - 0.1).abs() < 1e-12);
//! ```
#![no_std]
#![deny(unsafe_code)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod allocation;
pub mod copulas;
pub mod distortions;
mod error;
pub mod existence;
pub mod marginals;
mod math;
pub mod model;
pub mod stats;
pub mod transforms;

pub use error::{Constraint, Error, Result};
pub use math::EPS;
