//! Tensor-product quadrature grids on spheres and ellipsoids.
//!
//! Both shapes are parameterized over the unit sphere by `x = A s` with
//! `A = diag(a, b, c)`. Nodes use Gauss–Legendre points in `cos θ` and a
//! uniform trapezoid rule in `φ`, stored polar-major (`i * n_az + j`).

use super::quadrature::gauss_legendre;
use crate::error::{Result, SieError};
use crate::vec3::{cross, norm, normalize, scale, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameterization descriptor of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Sphere { radius: f64 },
    Ellipsoid { semi_axes: [f64; 3] },
}

impl Shape {
    pub fn semi_axes(&self) -> [f64; 3] {
        match *self {
            Shape::Sphere { radius } => [radius; 3],
            Shape::Ellipsoid { semi_axes } => semi_axes,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Shape::Sphere { .. })
    }

    pub fn diameter(&self) -> f64 {
        let a = self.semi_axes();
        2.0 * a[0].max(a[1]).max(a[2])
    }
}

/// Quadrature grid on a smooth closed surface.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub nodes: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    /// Surface-measure weights.
    pub weights: Vec<f64>,
    /// `(n_polar, n_azimuthal)`.
    pub param_orders: (usize, usize),
    pub shape_tag: Shape,
    /// Parameter point on the unit sphere for each node.
    pub param_points: Vec<Vec3>,
    /// Weights of the underlying unit-sphere rule (solid angle).
    pub param_weights: Vec<f64>,
    /// Unit tangents: `t1 = x_θ / |x_θ|`, `t2 = n × t1`.
    pub tangents: Vec<[Vec3; 2]>,
    /// Parametric derivatives `(x_θ, x_φ)`.
    pub param_derivatives: Vec<[Vec3; 2]>,
    /// Polar angle per ring, ascending.
    pub thetas: Vec<f64>,
    /// Azimuth per column.
    pub phis: Vec<f64>,
}

/// Grid on a sphere of the given radius.
pub fn build_sphere_grid(radius: f64, n_polar: usize, n_azimuthal: usize) -> Result<SurfaceGrid> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(SieError::Config(format!("radius must be positive, got {radius}")));
    }
    build(Shape::Sphere { radius }, n_polar, n_azimuthal)
}

/// Grid on the ellipsoid `x²/a² + y²/b² + z²/c² = 1`.
pub fn build_ellipsoid_grid(
    semi_axes: [f64; 3],
    n_polar: usize,
    n_azimuthal: usize,
) -> Result<SurfaceGrid> {
    if semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(SieError::Config(format!(
            "semi-axes must be positive, got {semi_axes:?}"
        )));
    }
    build(Shape::Ellipsoid { semi_axes }, n_polar, n_azimuthal)
}

/// Jacobian `|x_θ × x_φ| / sin θ` of `s ↦ A s` at the unit vector `s`,
/// together with the outward unit normal.
pub(crate) fn map_jacobian_normal(axes: &[f64; 3], s: &Vec3) -> (f64, Vec3) {
    let [a, b, c] = *axes;
    let m = [b * c * s[0], a * c * s[1], a * b * s[2]];
    let j = norm(&m);
    (j, scale(1.0 / j, &m))
}

pub(crate) fn map_point(axes: &[f64; 3], s: &Vec3) -> Vec3 {
    [axes[0] * s[0], axes[1] * s[1], axes[2] * s[2]]
}

fn build(shape: Shape, n_polar: usize, n_az: usize) -> Result<SurfaceGrid> {
    if n_polar < 4 {
        return Err(SieError::Config(format!("n_polar must be >= 4, got {n_polar}")));
    }
    if n_az < 8 {
        return Err(SieError::Config(format!("n_azimuthal must be >= 8, got {n_az}")));
    }
    let axes = shape.semi_axes();
    let (t, wt) = gauss_legendre(n_polar);
    // descending cos θ gives ascending θ
    let thetas: Vec<f64> = t.iter().rev().map(|c| c.acos()).collect();
    let wts: Vec<f64> = wt.iter().rev().copied().collect();
    let dphi = 2.0 * PI / n_az as f64;
    let phis: Vec<f64> = (0..n_az).map(|j| j as f64 * dphi).collect();

    let n = n_polar * n_az;
    let mut g = SurfaceGrid {
        nodes: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        param_orders: (n_polar, n_az),
        shape_tag: shape,
        param_points: Vec::with_capacity(n),
        param_weights: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        param_derivatives: Vec::with_capacity(n),
        thetas: thetas.clone(),
        phis: phis.clone(),
    };
    for (i, &th) in thetas.iter().enumerate() {
        let (st, ct) = th.sin_cos();
        for &ph in &phis {
            let (sp, cp) = ph.sin_cos();
            let s = [st * cp, st * sp, ct];
            let s_th = [ct * cp, ct * sp, -st];
            let s_ph = [-st * sp, st * cp, 0.0];
            let (jac, nrm) = map_jacobian_normal(&axes, &s);
            let x_th = map_point(&axes, &s_th);
            let x_ph = map_point(&axes, &s_ph);
            let t1 = normalize(&x_th);
            let t2 = cross(&nrm, &t1);
            let pw = wts[i] * dphi;
            g.nodes.push(map_point(&axes, &s));
            g.normals.push(nrm);
            g.weights.push(pw * jac);
            g.param_points.push(s);
            g.param_weights.push(pw);
            g.tangents.push([t1, t2]);
            g.param_derivatives.push([x_th, x_ph]);
        }
    }
    Ok(g)
}

impl SurfaceGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_polar(&self) -> usize {
        self.param_orders.0
    }

    pub fn n_azimuthal(&self) -> usize {
        self.param_orders.1
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        self.shape_tag.semi_axes()
    }

    pub fn diameter(&self) -> f64 {
        self.shape_tag.diameter()
    }

    pub fn is_sphere(&self) -> bool {
        self.shape_tag.is_sphere()
    }

    /// Radius if the grid is a sphere.
    pub fn sphere_radius(&self) -> Option<f64> {
        match self.shape_tag {
            Shape::Sphere { radius } => Some(radius),
            Shape::Ellipsoid { .. } => None,
        }
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest spherical-harmonic degree resolved exactly by the node rule.
    pub fn max_degree(&self) -> usize {
        let (np, na) = self.param_orders;
        (np - 1).min((na - 1) / 2)
    }

    /// Same surface with other orders.
    pub fn with_orders(&self, n_polar: usize, n_azimuthal: usize) -> Result<SurfaceGrid> {
        build(self.shape_tag, n_polar, n_azimuthal)
    }
}
