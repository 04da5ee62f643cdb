//! Spherical harmonics on Gauss–Legendre grids.
//!
//! Complex harmonics `Y_lm = P̄_l^m(cos θ) e^{imφ}` are orthonormal on the unit
//! sphere and include the Condon–Shortley phase. Coefficients are stored
//! flat at index `l² + l + m`.

use super::grid::SurfaceGrid;
use crate::error::{Result, SieError};
use crate::vec3::{cdot_r, CVec3, Vec3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Flat coefficient index of degree `l`, order `m`.
#[inline]
pub fn sh_index(l: usize, m: i64) -> usize {
    idx(l, m)
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre values `P̄_l^m(cos θ)`, `0 ≤ m ≤ l ≤ lmax`,
/// written to `out` at `l(l+1)/2 + m`.
pub fn legendre_table(lmax: usize, ct: f64, st: f64, out: &mut [f64]) {
    out[0] = 0.5 / PI.sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        out[tri(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st * out[tri(m - 1, m - 1)];
    }
    for m in 0..lmax {
        out[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * ct * out[tri(m, m)];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            out[tri(l, m)] = a * (ct * out[tri(l - 1, m)] - b * out[tri(l - 2, m)]);
        }
    }
}

/// Polar derivatives `dP̄_l^m/dθ` from a filled table. Requires `sin θ > 0`.
fn legendre_dtheta(lmax: usize, ct: f64, st: f64, p: &[f64], out: &mut [f64]) {
    for l in 0..=lmax {
        let lf = l as f64;
        for m in 0..=l {
            let mf = m as f64;
            let prev = if m < l {
                ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt()
                    * p[tri(l - 1, m)]
            } else {
                0.0
            };
            out[tri(l, m)] = (lf * ct * p[tri(l, m)] - prev) / st;
        }
    }
}

/// Real orthonormal harmonics at the unit vector `s`, index `l² + l + m`:
/// `m > 0` uses `√2 P̄ cos mφ`, `m < 0` uses `√2 P̄ sin |m|φ`.
/// `scratch` must hold `(lmax+1)(lmax+2)/2` values.
pub fn real_harmonics(lmax: usize, s: &Vec3, scratch: &mut [f64], out: &mut [f64]) {
    let ct = s[2].clamp(-1.0, 1.0);
    let rho = (s[0] * s[0] + s[1] * s[1]).sqrt();
    let st = rho;
    let (cp, sp) = if rho > 0.0 { (s[0] / rho, s[1] / rho) } else { (1.0, 0.0) };
    legendre_table(lmax, ct, st, scratch);
    let sq2 = std::f64::consts::SQRT_2;
    for l in 0..=lmax {
        out[l * l + l] = scratch[tri(l, 0)];
    }
    let (mut cm, mut sm) = (1.0, 0.0);
    for m in 1..=lmax {
        let c = cm * cp - sm * sp;
        sm = sm * cp + cm * sp;
        cm = c;
        for l in m..=lmax {
            let p = sq2 * scratch[tri(l, m)];
            out[l * l + l + m] = p * cm;
            out[l * l + l - m] = p * sm;
        }
    }
}

/// Number of harmonics of degree at most `lmax`.
pub fn n_harmonics(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Complex spherical-harmonic coefficients up to degree `lmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    pub lmax: usize,
    pub data: Vec<Complex64>,
}

impl ShCoefficients {
    pub fn zeros(lmax: usize) -> Self {
        Self { lmax, data: vec![Complex64::new(0.0, 0.0); n_harmonics(lmax)] }
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.data[idx(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        let i = idx(l, m);
        self.data[i] = v;
    }
}

#[inline]
fn idx(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Complex `Y_lm` at the unit vector `s`.
pub fn complex_harmonic(l: usize, m: i64, s: &Vec3) -> Complex64 {
    let ma = m.unsigned_abs() as usize;
    let mut p = vec![0.0; tri(l, l) + 1];
    let rho = (s[0] * s[0] + s[1] * s[1]).sqrt();
    legendre_table(l, s[2].clamp(-1.0, 1.0), rho, &mut p);
    let phi = s[1].atan2(s[0]);
    let y = Complex64::from_polar(p[tri(l, ma)], ma as f64 * phi);
    if m < 0 {
        if ma % 2 == 1 { -y.conj() } else { y.conj() }
    } else {
        y
    }
}

fn require_sphere(grid: &SurfaceGrid) -> Result<f64> {
    grid.sphere_radius().ok_or_else(|| {
        SieError::UnsupportedGeometry("spherical-harmonic operations need a sphere grid".into())
    })
}

/// Per-node complex harmonic values and surface gradients on the unit sphere,
/// evaluated lazily per node.
struct NodeHarmonics {
    lmax: usize,
    p: Vec<f64>,
    dp: Vec<f64>,
}

impl NodeHarmonics {
    fn new(lmax: usize) -> Self {
        let n = tri(lmax, lmax) + 1;
        Self { lmax, p: vec![0.0; n], dp: vec![0.0; n] }
    }

    fn fill(&mut self, theta: f64, with_derivative: bool) {
        let (st, ct) = theta.sin_cos();
        legendre_table(self.lmax, ct, st, &mut self.p);
        if with_derivative {
            legendre_dtheta(self.lmax, ct, st, &self.p, &mut self.dp);
        }
    }
}

/// Analysis `c_lm = Σ w conj(Y_lm) f` with unit-sphere weights.
pub fn sh_transform(grid: &SurfaceGrid, f: &[Complex64]) -> Result<ShCoefficients> {
    require_sphere(grid)?;
    check_len(grid, f.len())?;
    let lmax = grid.max_degree();
    let (np, na) = grid.param_orders;
    let mut out = ShCoefficients::zeros(lmax);
    let mut nh = NodeHarmonics::new(lmax);
    // azimuthal DFT per ring, then Legendre sums
    let mut fm = vec![Complex64::new(0.0, 0.0); 2 * lmax + 1];
    for i in 0..np {
        nh.fill(grid.thetas[i], false);
        let w = grid.param_weights[i * na];
        for (k, mm) in (-(lmax as i64)..=lmax as i64).enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..na {
                let e = Complex64::from_polar(1.0, -(mm as f64) * grid.phis[j]);
                acc += f[i * na + j] * e;
            }
            fm[k] = acc * w;
        }
        for l in 0..=lmax {
            for mm in -(l as i64)..=l as i64 {
                let ma = mm.unsigned_abs() as usize;
                let mut p = nh.p[tri(l, ma)];
                if mm < 0 && ma % 2 == 1 {
                    p = -p;
                }
                out.data[idx(l, mm)] += fm[(mm + lmax as i64) as usize] * p;
            }
        }
    }
    Ok(out)
}

/// Synthesis of a scalar field at the grid nodes.
pub fn sh_synthesis(grid: &SurfaceGrid, c: &ShCoefficients) -> Result<Vec<Complex64>> {
    require_sphere(grid)?;
    let lmax = c.lmax;
    let (np, na) = grid.param_orders;
    let mut nh = NodeHarmonics::new(lmax);
    let mut out = vec![Complex64::new(0.0, 0.0); np * na];
    let mut ring = vec![Complex64::new(0.0, 0.0); 2 * lmax + 1];
    for i in 0..np {
        nh.fill(grid.thetas[i], false);
        for (k, mm) in (-(lmax as i64)..=lmax as i64).enumerate() {
            let ma = mm.unsigned_abs() as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for l in ma..=lmax {
                let mut p = nh.p[tri(l, ma)];
                if mm < 0 && ma % 2 == 1 {
                    p = -p;
                }
                acc += c.data[idx(l, mm)] * p;
            }
            ring[k] = acc;
        }
        for j in 0..na {
            let mut v = Complex64::new(0.0, 0.0);
            for (k, mm) in (-(lmax as i64)..=lmax as i64).enumerate() {
                v += ring[k] * Complex64::from_polar(1.0, mm as f64 * grid.phis[j]);
            }
            out[i * na + j] = v;
        }
    }
    Ok(out)
}

/// Unit-sphere surface gradient of `Y_lm` at polar angle θ and azimuth φ,
/// given filled tables.
fn harmonic_gradient(nh: &NodeHarmonics, l: usize, mm: i64, theta: f64, phi: f64) -> CVec3 {
    let ma = mm.unsigned_abs() as usize;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let e = Complex64::from_polar(1.0, ma as f64 * phi);
    let dth = e * nh.dp[tri(l, ma)];
    let dph = e * Complex64::new(0.0, ma as f64 * nh.p[tri(l, ma)] / st);
    let eth = [ct * cp, ct * sp, -st];
    let eph = [-sp, cp, 0.0];
    let mut g = [
        dth * eth[0] + dph * eph[0],
        dth * eth[1] + dph * eph[1],
        dth * eth[2] + dph * eph[2],
    ];
    if mm < 0 {
        let sgn = if ma % 2 == 1 { -1.0 } else { 1.0 };
        for v in g.iter_mut() {
            *v = v.conj() * sgn;
        }
    }
    g
}

/// Surface gradient of the band-limited field with coefficients `c`.
pub fn surface_gradient(grid: &SurfaceGrid, c: &ShCoefficients) -> Result<Vec<CVec3>> {
    let radius = require_sphere(grid)?;
    let (np, na) = grid.param_orders;
    let mut nh = NodeHarmonics::new(c.lmax);
    let mut out = vec![[Complex64::new(0.0, 0.0); 3]; np * na];
    for i in 0..np {
        nh.fill(grid.thetas[i], true);
        for j in 0..na {
            let o = &mut out[i * na + j];
            for l in 1..=c.lmax {
                for mm in -(l as i64)..=l as i64 {
                    let cl = c.data[idx(l, mm)];
                    if cl == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let g = harmonic_gradient(&nh, l, mm, grid.thetas[i], grid.phis[j]);
                    for k in 0..3 {
                        o[k] += cl * g[k] / radius;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Surface divergence of a tangential field on a sphere grid.
///
/// Coefficients come from `c_lm = -(1/R) Σ w ∇conj(Y_lm)·v`; the result is
/// synthesized back at the nodes.
pub fn surface_divergence(grid: &SurfaceGrid, v: &[CVec3]) -> Result<Vec<Complex64>> {
    let radius = require_sphere(grid)?;
    check_len(grid, v.len())?;
    let scale = v.iter().map(|x| crate::vec3::cnorm_sqr(x).sqrt()).fold(1.0, f64::max);
    for (i, (x, n)) in v.iter().zip(&grid.normals).enumerate() {
        if cdot_r(x, n).norm() > 1e-10 * scale {
            return Err(SieError::Precondition(format!(
                "field is not tangential at node {i} (|v·n| = {:.3e})",
                cdot_r(x, n).norm()
            )));
        }
    }
    let lmax = grid.max_degree();
    let (np, na) = grid.param_orders;
    let mut c = ShCoefficients::zeros(lmax);
    let mut nh = NodeHarmonics::new(lmax);
    for i in 0..np {
        nh.fill(grid.thetas[i], true);
        for j in 0..na {
            let node = i * na + j;
            let w = grid.param_weights[node];
            for l in 1..=lmax {
                for mm in -(l as i64)..=l as i64 {
                    let g = harmonic_gradient(&nh, l, mm, grid.thetas[i], grid.phis[j]);
                    let d = g[0].conj() * v[node][0]
                        + g[1].conj() * v[node][1]
                        + g[2].conj() * v[node][2];
                    c.data[idx(l, mm)] -= d * (w / radius);
                }
            }
        }
    }
    sh_synthesis(grid, &c)
}

/// Real analysis matrix `T[lm, node] = w_node Y^real_lm(s_node)`, row-major
/// `(lmax+1)² × N`, over the parameter sphere of any grid.
pub(crate) fn real_analysis_matrix(grid: &SurfaceGrid, lmax: usize) -> Vec<f64> {
    let n = grid.len();
    let nc = n_harmonics(lmax);
    let mut t = vec![0.0; nc * n];
    let mut scratch = vec![0.0; tri(lmax, lmax) + 1];
    let mut row = vec![0.0; nc];
    for node in 0..n {
        real_harmonics(lmax, &grid.param_points[node], &mut scratch, &mut row);
        let w = grid.param_weights[node];
        for k in 0..nc {
            t[k * n + node] = w * row[k];
        }
    }
    t
}

fn check_len(grid: &SurfaceGrid, n: usize) -> Result<()> {
    if n != grid.len() {
        return Err(SieError::Input(format!(
            "expected {} samples, got {n}",
            grid.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build_ellipsoid_grid, build_sphere_grid};
    use crate::vec3::rcross_c;

    fn sample(grid: &SurfaceGrid, l: usize, m: i64) -> Vec<Complex64> {
        grid.param_points.iter().map(|s| complex_harmonic(l, m, s)).collect()
    }

    #[test]
    fn constant_field() {
        let g = build_sphere_grid(1.0, 12, 24).unwrap();
        let c = sh_transform(&g, &vec![Complex64::new(1.0, 0.0); g.len()]).unwrap();
        assert!((c.get(0, 0) - (4.0 * PI).sqrt()).norm() < 1e-12);
        for (k, v) in c.data.iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-12, "coef {k} = {v}");
        }
    }

    #[test]
    fn single_harmonic() {
        let g = build_sphere_grid(1.0, 12, 24).unwrap();
        let c = sh_transform(&g, &sample(&g, 2, 1)).unwrap();
        for l in 0..=c.lmax {
            for m in -(l as i64)..=l as i64 {
                let want = if (l, m) == (2, 1) { 1.0 } else { 0.0 };
                assert!((c.get(l, m) - want).norm() < 1e-10, "({l},{m}) {}", c.get(l, m));
            }
        }
    }

    #[test]
    fn negative_order_symmetry() {
        let s = crate::vec3::normalize(&[0.3, -0.5, 0.8]);
        for l in 0..6 {
            for m in 1..=l as i64 {
                let a = complex_harmonic(l, -m, &s);
                let b = complex_harmonic(l, m, &s).conj() * if m % 2 == 1 { -1.0 } else { 1.0 };
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn real_harmonics_orthonormal() {
        let g = build_ellipsoid_grid([1.0, 2.0, 0.5], 10, 20).unwrap();
        let lmax = g.max_degree();
        let t = real_analysis_matrix(&g, lmax);
        let n = g.len();
        let nc = n_harmonics(lmax);
        let mut scratch = vec![0.0; tri(lmax, lmax) + 1];
        let mut y = vec![0.0; nc * n];
        let mut row = vec![0.0; nc];
        for node in 0..n {
            real_harmonics(lmax, &g.param_points[node], &mut scratch, &mut row);
            for k in 0..nc {
                y[k * n + node] = row[k];
            }
        }
        for a in 0..nc {
            for b in 0..nc {
                let d: f64 = (0..n).map(|j| t[a * n + j] * y[b * n + j]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12, "({a},{b}) {d}");
            }
        }
    }

    #[test]
    fn gradient_of_y10_diverges_to_minus_two_y10() {
        let g = build_sphere_grid(1.0, 10, 20).unwrap();
        let mut c = ShCoefficients::zeros(g.max_degree());
        c.set(1, 0, Complex64::new(1.0, 0.0));
        let v = surface_gradient(&g, &c).unwrap();
        let d = surface_divergence(&g, &v).unwrap();
        let y = sample(&g, 1, 0);
        for (a, b) in d.iter().zip(&y) {
            assert!((a + 2.0 * b).norm() < 1e-12);
        }
    }

    #[test]
    fn rotated_gradient_is_solenoidal() {
        let g = build_sphere_grid(1.0, 10, 20).unwrap();
        let mut c = ShCoefficients::zeros(g.max_degree());
        c.set(2, 0, Complex64::new(1.0, 0.0));
        let grad = surface_gradient(&g, &c).unwrap();
        let v: Vec<CVec3> = grad.iter().zip(&g.normals).map(|(x, n)| rcross_c(n, x)).collect();
        let d = surface_divergence(&g, &v).unwrap();
        assert!(d.iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn radius_scaling_of_divergence() {
        let g = build_sphere_grid(2.0, 10, 20).unwrap();
        let mut c = ShCoefficients::zeros(g.max_degree());
        c.set(3, -2, Complex64::new(0.5, 1.0));
        let v = surface_gradient(&g, &c).unwrap();
        let d = surface_divergence(&g, &v).unwrap();
        let f = sh_synthesis(&g, &c).unwrap();
        // Laplace–Beltrami eigenvalue -l(l+1)/R²
        for (a, b) in d.iter().zip(&f) {
            assert!((a + 12.0 / 4.0 * b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_normal_component_and_ellipsoid() {
        let g = build_sphere_grid(1.0, 8, 16).unwrap();
        let v: Vec<CVec3> = g.normals.iter().map(crate::vec3::to_complex).collect();
        assert!(matches!(surface_divergence(&g, &v), Err(SieError::Precondition(_))));
        let e = build_ellipsoid_grid([1.0, 1.0, 2.0], 8, 16).unwrap();
        let f = vec![Complex64::new(1.0, 0.0); e.len()];
        assert!(matches!(sh_transform(&e, &f), Err(SieError::UnsupportedGeometry(_))));
    }
}
