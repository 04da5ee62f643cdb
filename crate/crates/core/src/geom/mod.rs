//! Surface grids and spherical-harmonic tools.

mod grid;
pub mod harmonics;
pub mod quadrature;

pub use grid::{build_ellipsoid_grid, build_sphere_grid, Shape, SurfaceGrid};
pub(crate) use grid::{map_jacobian_normal, map_point};
pub use harmonics::{
    complex_harmonic, sh_synthesis, sh_transform, surface_divergence, surface_gradient,
    ShCoefficients,
};
