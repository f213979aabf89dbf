//! Energies of maps between model Riemannian manifolds.
//!
//! The crate evaluates p-energies, pullback volumes, averaging formulas over
//! spaces of geodesics and projective lines, and harmonic-map diagnostics for
//! maps between round spheres, real and complex projective spaces. Every
//! numerical routine is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the double-precision lane used by the experiments.

// `!(x > 0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod energy;
pub mod error;
pub mod flow;
pub mod harmonic;
pub mod intgeo;
pub mod linalg;
pub mod manifolds;
pub mod maps;
pub mod report;
pub mod rng;
pub mod scalar;

pub use error::{GeometryError, Result};
pub use manifolds::{Isometry, LieAlgebraElement, ModelManifold, Point, TangentVector};
pub use maps::{GridScheme, MapObject, QuadratureGrid, TangentFrame};
pub use rng::RngStream;
pub use scalar::Scalar;

pub type Manifold64 = ModelManifold<f64>;
pub type Point64 = Point<f64>;
pub type Tangent64 = TangentVector<f64>;
pub type Manifold32 = ModelManifold<f32>;
pub type Point32 = Point<f32>;
pub type Map64 = MapObject<f64>;
pub type Grid64 = QuadratureGrid<f64>;
pub type Map32 = MapObject<f32>;
