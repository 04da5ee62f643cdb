//! Boundary-integral solver for time-harmonic scattering by a dielectric body.

pub mod analytic;
pub mod error;
pub mod geom;
pub mod kernels;
pub mod linalg;
pub mod medium;
pub mod ops;
pub mod pencil;
pub mod solve;
pub mod vec3;
pub mod wave;

pub use error::{Result, SieError};
pub use medium::MediumParams;
pub use wave::PlaneWave;
