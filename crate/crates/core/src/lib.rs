//! Numerical laboratory for ill-posedness counterexamples of geodesic wave
//! maps: torus fields and spectral propagation, fractional Sobolev/Besov
//! norms, radial solution kernels, target geometries, the counterexample
//! data families and the experiment drivers.

pub mod constants;
pub mod construct;
pub mod error;
pub mod experiment;
pub mod family;
pub mod field;
pub mod geometry;
pub mod norms;
pub mod quad;
pub mod spectral;
pub mod wave;

pub use error::{LabError, Result};
