//! Nyström discretization with a target-centred rotated polar rule.
//!
//! For each target node the surface is re-parameterized in polar coordinates
//! whose pole sits at the target. Gauss–Legendre points in the polar angle and
//! an even trapezoid rule in azimuth absorb the `1/r` singularity through the
//! `sin θ'` Jacobian and cancel the odd `1/r²` part of principal-value
//! kernels. Densities are carried to the rotated points by real spherical
//! harmonics of degree `n_polar − 1` fitted on the node grid.

use crate::geom::harmonics::{n_harmonics, real_analysis_matrix, real_harmonics};
use crate::geom::quadrature::gauss_legendre_interval;
use crate::geom::{map_jacobian_normal, map_point, SurfaceGrid};
use crate::vec3::{normalize, Vec3};
use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Orders of the rotated polar rule used for every target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularQuadrature {
    pub n_theta: usize,
    /// Must be even.
    pub n_phi: usize,
}

impl SingularQuadrature {
    /// Default orders for a grid.
    pub fn for_grid(grid: &SurfaceGrid) -> Self {
        let (np, na) = grid.param_orders;
        Self { n_theta: np, n_phi: na + na % 2 }
    }
}

/// Collocation point data.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Target {
    pub x: Vec3,
    pub n: Vec3,
    pub t: [Vec3; 2],
}

/// Integration point data.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Source {
    pub y: Vec3,
    pub n: Vec3,
}

/// Kernel with `rows × channels` complex entries per (target, source) pair,
/// laid out row-major in `out`.
pub(crate) trait Kernel: Sync {
    fn rows(&self) -> usize;
    fn channels(&self) -> usize;
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]);
}

/// Rotated points of one target, plus the basis of its ring.
struct RotatedPoints {
    sources: Vec<Source>,
    weights: Vec<f64>,
}

/// Real harmonics at the rotated points of the first target of a ring,
/// row-major `n_points × n_harmonics`, and those parameter points.
struct RingBasis {
    points: Vec<Vec3>,
    values: Vec<f64>,
}

pub(crate) struct Nystrom<'g> {
    grid: &'g SurfaceGrid,
    lmax: usize,
    nc: usize,
    /// `nc × N`.
    analysis: Mat<f64>,
    theta: Vec<(f64, f64, f64)>,
    phi: Vec<(f64, f64)>,
    dphi: f64,
}

/// Target rows stacked per product; bounds the working set.
const CHUNK_ROWS: usize = 1536;

impl<'g> Nystrom<'g> {
    pub fn new(grid: &'g SurfaceGrid, rule: SingularQuadrature) -> Self {
        let lmax = grid.max_degree();
        let nc = n_harmonics(lmax);
        let n = grid.len();
        let t = real_analysis_matrix(grid, lmax);
        let analysis = Mat::from_fn(nc, n, |i, j| t[i * n + j]);
        let (th, wt) = gauss_legendre_interval(rule.n_theta, 0.0, PI);
        let theta = th
            .iter()
            .zip(&wt)
            .map(|(t, w)| {
                let (s, c) = t.sin_cos();
                (s, c, *w)
            })
            .collect();
        let n_phi = rule.n_phi + rule.n_phi % 2;
        let dphi = 2.0 * PI / n_phi as f64;
        let phi = (0..n_phi)
            .map(|j| {
                let (s, c) = (j as f64 * dphi).sin_cos();
                (c, s)
            })
            .collect();
        Self { grid, lmax, nc, analysis, theta, phi, dphi }
    }

    pub fn grid(&self) -> &SurfaceGrid {
        self.grid
    }

    pub fn target(&self, index: usize) -> Target {
        let g = self.grid;
        Target { x: g.nodes[index], n: g.normals[index], t: g.tangents[index] }
    }

    fn ring_basis(&self, ring: usize) -> RingBasis {
        let g = self.grid;
        let (st, ct) = g.thetas[ring].sin_cos();
        let s0 = [st, 0.0, ct];
        let e_th = [ct, 0.0, -st];
        let e_ph = [0.0, 1.0, 0.0];
        let nq = self.theta.len() * self.phi.len();
        let mut points = Vec::with_capacity(nq);
        let mut values = vec![0.0; nq * self.nc];
        let mut scratch = vec![0.0; (self.lmax + 1) * (self.lmax + 2) / 2];
        for &(sth, cth, _) in &self.theta {
            for &(cph, sph) in &self.phi {
                let a = sth * cph;
                let b = sth * sph;
                let s = normalize(&[
                    a * e_th[0] + b * e_ph[0] + cth * s0[0],
                    a * e_th[1] + b * e_ph[1] + cth * s0[1],
                    a * e_th[2] + b * e_ph[2] + cth * s0[2],
                ]);
                let q = points.len();
                real_harmonics(self.lmax, &s, &mut scratch, &mut values[q * self.nc..(q + 1) * self.nc]);
                points.push(s);
            }
        }
        RingBasis { points, values }
    }

    /// Sources for a target obtained by rotating its ring's base points
    /// about the polar axis.
    fn rotated(&self, index: usize, ring: &RingBasis) -> RotatedPoints {
        let g = self.grid;
        let (sa, ca) = g.phis[index % g.n_azimuthal()].sin_cos();
        let axes = g.semi_axes();
        let mut sources = Vec::with_capacity(ring.points.len());
        let mut weights = Vec::with_capacity(ring.points.len());
        let mut q = 0;
        for &(sth, _, wth) in &self.theta {
            for _ in 0..self.phi.len() {
                let p = ring.points[q];
                let s = [ca * p[0] - sa * p[1], sa * p[0] + ca * p[1], p[2]];
                let (jac, n) = map_jacobian_normal(&axes, &s);
                sources.push(Source { y: map_point(&axes, &s), n });
                weights.push(wth * sth * self.dphi * jac);
                q += 1;
            }
        }
        RotatedPoints { sources, weights }
    }

    /// Azimuthal angle of a node.
    fn azimuth(&self, index: usize) -> f64 {
        self.grid.phis[index % self.grid.n_azimuthal()]
    }

    /// Apply the z-rotation by `alpha` to real-harmonic coefficients stored
    /// along the columns of `m` (one harmonic per column), i.e. turn
    /// `Σ_q w_q Y(s_q)` into `Σ_q w_q Y(R s_q)`.
    fn rotate_columns(&self, m: &mut Mat<f64>, rows: std::ops::Range<usize>, alpha: f64) {
        for l in 1..=self.lmax {
            for mm in 1..=l {
                let (s, c) = (mm as f64 * alpha).sin_cos();
                let ic = l * l + l + mm;
                let is = l * l + l - mm;
                for r in rows.clone() {
                    let (a, b) = (m[(r, ic)], m[(r, is)]);
                    m[(r, ic)] = a * c - b * s;
                    m[(r, is)] = b * c + a * s;
                }
            }
        }
    }

    /// Adjoint of [`rotate_columns`] acting on rows of a coefficient matrix.
    fn rotate_rows(&self, m: &mut Mat<f64>, alpha: f64) {
        for l in 1..=self.lmax {
            for mm in 1..=l {
                let (s, c) = (mm as f64 * alpha).sin_cos();
                let ic = l * l + l + mm;
                let is = l * l + l - mm;
                for k in 0..m.ncols() {
                    let (a, b) = (m[(ic, k)], m[(is, k)]);
                    m[(ic, k)] = c * a + s * b;
                    m[(is, k)] = c * b - s * a;
                }
            }
        }
    }

    /// Dense assembly. For each target, `consume(target, values)` receives a
    /// `2·rows·channels × N` real matrix whose row `2(r·C + c) + p` holds the
    /// real (`p = 0`) or imaginary (`p = 1`) part of the coefficient that maps
    /// channel `c` at each node to output row `r`.
    pub fn assemble<K, F>(&self, kernel: &K, mut consume: F)
    where
        K: Kernel,
        F: FnMut(usize, MatRef<'_, f64>),
    {
        let n = self.grid.len();
        let rc = kernel.rows() * kernel.channels();
        let m = 2 * rc;
        let na = self.grid.n_azimuthal();
        let chunk_len = (CHUNK_ROWS / m).clamp(1, na);
        for ring in 0..self.grid.n_polar() {
            let basis = self.ring_basis(ring);
            let nq = basis.points.len();
            let y = MatRef::from_row_major_slice(&basis.values, nq, self.nc);
            let targets: Vec<usize> = (ring * na..(ring + 1) * na).collect();
            for chunk in targets.chunks(chunk_len) {
                let blocks: Vec<Mat<f64>> = chunk
                    .par_iter()
                    .map(|&i| {
                        let tgt = self.target(i);
                        let pts = self.rotated(i, &basis);
                        let mut w = Mat::<f64>::zeros(m, nq);
                        let mut buf = vec![Complex64::new(0.0, 0.0); rc];
                        for q in 0..nq {
                            kernel.eval(&tgt, &pts.sources[q], &mut buf);
                            let wq = pts.weights[q];
                            let col = w.col_mut(q).try_as_col_major_mut().unwrap().as_slice_mut();
                            for (k, v) in buf.iter().enumerate() {
                                col[2 * k] = v.re * wq;
                                col[2 * k + 1] = v.im * wq;
                            }
                        }
                        w
                    })
                    .collect();
                let rows = chunk.len() * m;
                let stacked = Mat::<f64>::from_fn(rows, nq, |r, q| blocks[r / m][(r % m, q)]);
                drop(blocks);
                let mut coef = Mat::<f64>::zeros(rows, self.nc);
                matmul(coef.as_mut(), Accum::Replace, stacked.as_ref(), y, 1.0, Par::Seq);
                for (t, &i) in chunk.iter().enumerate() {
                    self.rotate_columns(&mut coef, t * m..(t + 1) * m, self.azimuth(i));
                }
                let mut vals = Mat::<f64>::zeros(rows, n);
                matmul(
                    vals.as_mut(),
                    Accum::Replace,
                    coef.as_ref(),
                    self.analysis.as_ref(),
                    1.0,
                    Par::Seq,
                );
                for (t, &i) in chunk.iter().enumerate() {
                    consume(i, vals.as_ref().subrows(t * m, m));
                }
            }
        }
    }

    /// Matrix-free application to channel fields `fields[j·C + c]`; returns
    /// `out[i·R + r]`.
    pub fn apply<K: Kernel>(&self, kernel: &K, fields: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.len();
        let (nr, ncha) = (kernel.rows(), kernel.channels());
        assert_eq!(fields.len(), n * ncha);
        let f = Mat::<f64>::from_fn(n, 2 * ncha, |j, k| {
            let v = fields[j * ncha + k / 2];
            if k % 2 == 0 { v.re } else { v.im }
        });
        let mut coef = Mat::<f64>::zeros(self.nc, 2 * ncha);
        matmul(coef.as_mut(), Accum::Replace, self.analysis.as_ref(), f.as_ref(), 1.0, Par::Seq);
        let na = self.grid.n_azimuthal();
        let mut out = Vec::with_capacity(n * nr);
        for ring in 0..self.grid.n_polar() {
            let basis = self.ring_basis(ring);
            let nq = basis.points.len();
            let y = MatRef::from_row_major_slice(&basis.values, nq, self.nc);
            let rows: Vec<Vec<Complex64>> = (ring * na..(ring + 1) * na)
                .into_par_iter()
                .map(|i| {
                    let tgt = self.target(i);
                    let pts = self.rotated(i, &basis);
                    let mut rc = coef.clone();
                    self.rotate_rows(&mut rc, self.azimuth(i));
                    let mut at = Mat::<f64>::zeros(nq, 2 * ncha);
                    matmul(at.as_mut(), Accum::Replace, y, rc.as_ref(), 1.0, Par::Seq);
                    let mut buf = vec![Complex64::new(0.0, 0.0); nr * ncha];
                    let mut acc = vec![Complex64::new(0.0, 0.0); nr];
                    for q in 0..nq {
                        kernel.eval(&tgt, &pts.sources[q], &mut buf);
                        let wq = pts.weights[q];
                        for r in 0..nr {
                            let mut s = Complex64::new(0.0, 0.0);
                            for c in 0..ncha {
                                s += buf[r * ncha + c]
                                    * Complex64::new(at[(q, 2 * c)], at[(q, 2 * c + 1)]);
                            }
                            acc[r] += s * wq;
                        }
                    }
                    acc
                })
                .collect();
            out.extend(rows.into_iter().flatten());
        }
        out
    }
}
