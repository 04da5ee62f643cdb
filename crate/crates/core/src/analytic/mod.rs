//! Closed-form sphere results and the Mie series.

mod bessel;
mod mie;
mod singular;
mod sphere;

pub use bessel::{spherical_hn1, spherical_jn, spherical_yn};
pub use mie::{mie_traces, MieSolution};
pub use singular::{
    find_singular_pair, scan_singular_pairs, singular_null_trace, singular_residual, singular_residual_gradient,
    SingularPair,
};
pub use sphere::{sphere_layer_potential, sphere_layer_potential_dr};
