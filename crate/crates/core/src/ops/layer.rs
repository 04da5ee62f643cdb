//! Scalar single-layer and `K`-type operators.

use super::nystrom::{Kernel, Nystrom, SingularQuadrature, Source, Target};
use crate::geom::SurfaceGrid;
use crate::kernels::green_radial;
use crate::vec3::{cross, norm, scale, sub};
use faer::Mat;
use num_complex::Complex64;

pub(crate) struct SingleLayer {
    pub k: Complex64,
}

impl Kernel for SingleLayer {
    fn rows(&self) -> usize {
        1
    }
    fn channels(&self) -> usize {
        1
    }
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]) {
        let r = norm(&sub(&t.x, &s.y));
        out[0] = green_radial(self.k, r).0;
    }
}

/// `[grad_x G_k × n(y)]_c` for the three Cartesian components of the density.
pub(crate) struct CrossGradient {
    pub k: Complex64,
}

impl Kernel for CrossGradient {
    fn rows(&self) -> usize {
        1
    }
    fn channels(&self) -> usize {
        3
    }
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]) {
        let d = sub(&t.x, &s.y);
        let r = norm(&d);
        let (_, dg) = green_radial(self.k, r);
        let v = cross(&scale(1.0 / r, &d), &s.n);
        for c in 0..3 {
            out[c] = dg * v[c];
        }
    }
}

/// Matrix of `w ↦ ∫ G_k(x_i, y) w(y) ds(y)`.
pub fn assemble_single_layer(grid: &SurfaceGrid, k: Complex64) -> Mat<Complex64> {
    assemble_single_layer_with(grid, k, SingularQuadrature::for_grid(grid))
}

pub fn assemble_single_layer_with(
    grid: &SurfaceGrid,
    k: Complex64,
    rule: SingularQuadrature,
) -> Mat<Complex64> {
    let engine = Nystrom::new(grid, rule);
    let n = grid.len();
    let mut a = Mat::<Complex64>::zeros(n, n);
    engine.assemble(&SingleLayer { k }, |i, v| {
        for j in 0..n {
            a[(i, j)] = Complex64::new(v[(0, j)], v[(1, j)]);
        }
    });
    a
}

/// Matrix of `w ↦ ∫ [grad_x G_k × n(y)]·w(y) ds(y)`; column `3j + c` holds
/// Cartesian component `c` of the density at node `j`.
pub fn assemble_k(grid: &SurfaceGrid, k: Complex64) -> Mat<Complex64> {
    assemble_k_with(grid, k, SingularQuadrature::for_grid(grid))
}

pub fn assemble_k_with(grid: &SurfaceGrid, k: Complex64, rule: SingularQuadrature) -> Mat<Complex64> {
    let engine = Nystrom::new(grid, rule);
    let n = grid.len();
    let mut a = Mat::<Complex64>::zeros(n, 3 * n);
    engine.assemble(&CrossGradient { k }, |i, v| {
        for j in 0..n {
            for c in 0..3 {
                a[(i, 3 * j + c)] = Complex64::new(v[(2 * c, j)], v[(2 * c + 1, j)]);
            }
        }
    });
    a
}

/// Laplace instance of [`assemble_k`].
pub fn assemble_d(grid: &SurfaceGrid) -> Mat<Complex64> {
    assemble_k(grid, Complex64::new(0.0, 0.0))
}
