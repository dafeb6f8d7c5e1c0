//! Parametric surface assemblies built from spheres and catenoidal necks, with
//! adaptive quadrature of area, Willmore and Helfrich energies and the
//! diagnostics used to study them (monotonicity, density bounds, meshes).

pub mod constructions;
pub mod diagnostics;
pub mod energy;
mod error;
pub mod optimizer;
pub mod quadrature;
pub mod suites;
pub mod surface;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
