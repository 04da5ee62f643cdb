//! Plane-wave scattering by a homogeneous sphere as a vector spherical wave
//! series.
//!
//! Fields are expanded in a frame with `x̂ = p`, `ŷ = d × p`, `ẑ = d`, where the
//! incident wave is `x̂`-polarized and travels along `ẑ`.

use super::bessel::{riccati_derivative_ratio, spherical_hn1, spherical_jn};
use crate::error::{Result, SieError};
use crate::geom::SurfaceGrid;
use crate::medium::MediumParams;
use crate::ops::TraceField;
use crate::vec3::{cross, dot, norm, CVec3, Vec3};
use crate::wave::PlaneWave;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Expansion coefficients of the scattered (`a`, `b`) and interior (`c`, `d`)
/// fields, indexed by degree (entry 0 unused).
#[derive(Debug, Clone)]
pub struct MieSolution {
    pub medium: MediumParams,
    pub radius: f64,
    pub wave: PlaneWave,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
    frame: [Vec3; 3],
}

/// Vector spherical wave functions of one degree in spherical components.
struct Vsh {
    m_o: CVec3,
    m_e: CVec3,
    n_o: CVec3,
    n_e: CVec3,
}

/// Angle functions `π_n`, `τ_n` for `n = 0..=nmax`.
fn angle_functions(mu: f64, nmax: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pi = vec![0.0; nmax + 1];
    let mut tau = vec![0.0; nmax + 1];
    if nmax >= 1 {
        pi[1] = 1.0;
    }
    for n in 2..=nmax {
        let nf = n as f64;
        pi[n] = (2.0 * nf - 1.0) / (nf - 1.0) * mu * pi[n - 1] - nf / (nf - 1.0) * pi[n - 2];
    }
    for n in 1..=nmax {
        tau[n] = n as f64 * mu * pi[n] - (n as f64 + 1.0) * pi[n - 1];
    }
    (pi, tau)
}

impl MieSolution {
    pub fn new(medium: &MediumParams, radius: f64, wave: &PlaneWave, max_degree: usize) -> Result<Self> {
        medium.validate()?;
        wave.validate()?;
        if !(radius > 0.0) {
            return Err(SieError::Input(format!("radius must be positive, got {radius}")));
        }
        let k = medium.k_plus().re;
        let k1 = medium.k_minus();
        let x = k * radius;
        if (max_degree as f64) < x + 15.0 {
            return Err(SieError::Precondition(format!(
                "series degree {max_degree} too low for ka = {x:.3} (need ≥ ka + 15)"
            )));
        }
        let mx = k1 * radius;
        let nmax = max_degree;
        let jx = spherical_jn(Complex64::new(x, 0.0), nmax);
        let hx = spherical_hn1(x, nmax);
        let jm = spherical_jn(mx, nmax);
        let djx = riccati_derivative_ratio(&jx, Complex64::new(x, 0.0));
        let dhx = riccati_derivative_ratio(&hx, Complex64::new(x, 0.0));
        let djm = riccati_derivative_ratio(&jm, mx);
        let zo = k / medium.mu_plus;
        let zi = k1 / medium.mu_minus;

        let zero = Complex64::new(0.0, 0.0);
        let (mut a, mut b, mut c, mut d) = (vec![zero; nmax + 1], vec![zero; nmax + 1], vec![zero; nmax + 1], vec![zero; nmax + 1]);
        let solve2 = |m: [[Complex64; 2]; 2], r: [Complex64; 2]| {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            ((r[0] * m[1][1] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - m[1][0] * r[0]) / det)
        };
        for n in 1..=nmax {
            // tangential E (N part) and tangential H (M part)
            let (an, dn) = solve2([[dhx[n], djm[n]], [zo * hx[n], zi * jm[n]]], [djx[n], zo * jx[n]]);
            // tangential E (M part) and tangential H (N part)
            let (bn, cn) = solve2([[hx[n], jm[n]], [zo * dhx[n], zi * djm[n]]], [jx[n], zo * djx[n]]);
            a[n] = an;
            b[n] = bn;
            c[n] = cn;
            d[n] = dn;
        }
        if [&a, &b, &c, &d].iter().any(|v| v.iter().any(|z| !z.is_finite())) {
            return Err(SieError::Accuracy("non-finite Mie coefficient".into()));
        }

        let weight = |n: usize| (2 * n + 1) as f64 / (n * (n + 1)) as f64;
        let ratio = |t: Vec<f64>| {
            let top = t.iter().cloned().fold(0.0, f64::max);
            if top == 0.0 { 0.0 } else { t[nmax] / top }
        };
        let outer: Vec<f64> = (0..=nmax)
            .map(|n| if n == 0 { 0.0 } else { weight(n) * (a[n].norm() + b[n].norm()) * (hx[n].norm() + dhx[n].norm()) })
            .collect();
        let inner: Vec<f64> = (0..=nmax)
            .map(|n| if n == 0 { 0.0 } else { weight(n) * (c[n].norm() + d[n].norm()) * (jm[n].norm() + djm[n].norm()) })
            .collect();
        let last = ratio(outer).max(ratio(inner));
        if !(last <= 1e-12) {
            return Err(SieError::Accuracy(format!("Mie series not converged: last-term ratio {last:.3e}")));
        }

        let p = wave.polarization;
        let dir = wave.direction;
        let frame = [p, cross(&dir, &p), dir];
        Ok(Self { medium: *medium, radius, wave: *wave, a, b, c, d, frame })
    }

    pub fn max_degree(&self) -> usize {
        self.a.len() - 1
    }

    fn local(&self, x: &Vec3) -> Vec3 {
        [dot(&self.frame[0], x), dot(&self.frame[1], x), dot(&self.frame[2], x)]
    }

    /// Spherical components at `x` to global Cartesian.
    fn to_global(&self, xl: &Vec3, v: &CVec3) -> CVec3 {
        let rho = xl[0].hypot(xl[1]);
        let r = norm(xl);
        let (st, ct) = (rho / r, xl[2] / r);
        let (sp, cp) = if rho > 0.0 { (xl[1] / rho, xl[0] / rho) } else { (0.0, 1.0) };
        let er = [st * cp, st * sp, ct];
        let et = [ct * cp, ct * sp, -st];
        let ep = [-sp, cp, 0.0];
        let loc: [Complex64; 3] = std::array::from_fn(|i| v[0] * er[i] + v[1] * et[i] + v[2] * ep[i]);
        std::array::from_fn(|i| loc[0] * self.frame[0][i] + loc[1] * self.frame[1][i] + loc[2] * self.frame[2][i])
    }

    /// Wave functions of degree `1..=nmax` at local point `xl` built on the
    /// radial functions `z` and ratios `dz` evaluated at `ρ = k r`.
    fn wave_functions(xl: &Vec3, rho: Complex64, z: &[Complex64], dz: &[Complex64]) -> Vec<Vsh> {
        let r = norm(xl);
        let sxy = xl[0].hypot(xl[1]);
        let (st, ct) = (sxy / r, xl[2] / r);
        let (sp, cp) = if sxy > 0.0 { (xl[1] / sxy, xl[0] / sxy) } else { (0.0, 1.0) };
        let nmax = z.len() - 1;
        let (pi, tau) = angle_functions(ct, nmax);
        let zero = Complex64::new(0.0, 0.0);
        (0..=nmax)
            .map(|n| {
                if n == 0 {
                    return Vsh { m_o: [zero; 3], m_e: [zero; 3], n_o: [zero; 3], n_e: [zero; 3] };
                }
                let nn = (n * (n + 1)) as f64;
                let radial = nn * st * pi[n] * z[n] / rho;
                Vsh {
                    m_o: [zero, cp * pi[n] * z[n], -sp * tau[n] * z[n]],
                    m_e: [zero, -sp * pi[n] * z[n], -cp * tau[n] * z[n]],
                    n_o: [sp * radial, sp * tau[n] * dz[n], cp * pi[n] * dz[n]],
                    n_e: [cp * radial, cp * tau[n] * dz[n], -sp * pi[n] * dz[n]],
                }
            })
            .collect()
    }

    fn en(n: usize) -> Complex64 {
        I.powu(n as u32) * ((2 * n + 1) as f64 / (n * (n + 1)) as f64)
    }

    /// Scattered `(E, H)` at an exterior point.
    pub fn scattered(&self, x: &Vec3) -> Result<(CVec3, CVec3)> {
        let r = norm(x);
        if r < self.radius * (1.0 - 1e-12) {
            return Err(SieError::Input("scattered field requested inside the sphere".into()));
        }
        let k = self.medium.k_plus().re;
        let rho = Complex64::new(k * r, 0.0);
        let h = spherical_hn1(k * r, self.max_degree());
        let dh = riccati_derivative_ratio(&h, rho);
        let xl = self.local(x);
        let w = Self::wave_functions(&xl, rho, &h, &dh);
        let hs = k / (self.medium.omega * self.medium.mu_plus);
        let zero = Complex64::new(0.0, 0.0);
        let (mut e, mut hf) = ([zero; 3], [zero; 3]);
        for n in 1..=self.max_degree() {
            let en = Self::en(n);
            for i in 0..3 {
                e[i] += en * (I * self.a[n] * w[n].n_e[i] - self.b[n] * w[n].m_o[i]);
                hf[i] += hs * en * (I * self.b[n] * w[n].n_o[i] + self.a[n] * w[n].m_e[i]);
            }
        }
        Ok((self.to_global(&xl, &e), self.to_global(&xl, &hf)))
    }

    /// Incident plus scattered field at an exterior point.
    pub fn exterior_total(&self, x: &Vec3) -> Result<(CVec3, CVec3)> {
        let (es, hs) = self.scattered(x)?;
        let (ei, hi) = self.wave.fields(&self.medium, x);
        Ok((std::array::from_fn(|i| es[i] + ei[i]), std::array::from_fn(|i| hs[i] + hi[i])))
    }

    /// Transmitted `(E, H)` at an interior point other than the centre.
    pub fn interior(&self, x: &Vec3) -> Result<(CVec3, CVec3)> {
        let r = norm(x);
        if r > self.radius * (1.0 + 1e-12) || r == 0.0 {
            return Err(SieError::Input("interior field requested outside the sphere or at its centre".into()));
        }
        let k1 = self.medium.k_minus();
        let rho = k1 * r;
        let j = spherical_jn(rho, self.max_degree());
        let dj = riccati_derivative_ratio(&j, rho);
        let xl = self.local(x);
        let w = Self::wave_functions(&xl, rho, &j, &dj);
        let hs = -k1 / (self.medium.omega * self.medium.mu_minus);
        let zero = Complex64::new(0.0, 0.0);
        let (mut e, mut hf) = ([zero; 3], [zero; 3]);
        for n in 1..=self.max_degree() {
            let en = Self::en(n);
            for i in 0..3 {
                e[i] += en * (self.c[n] * w[n].m_o[i] - I * self.d[n] * w[n].n_e[i]);
                hf[i] += hs * en * (self.d[n] * w[n].m_e[i] + I * self.c[n] * w[n].n_o[i]);
            }
        }
        Ok((self.to_global(&xl, &e), self.to_global(&xl, &hf)))
    }

    /// Incident wave re-expanded in regular wave functions; used to check the
    /// conventions of the expansion.
    pub fn incident_series(&self, x: &Vec3) -> (CVec3, CVec3) {
        let k = self.medium.k_plus().re;
        let rho = Complex64::new(k * norm(x), 0.0);
        let j = spherical_jn(rho, self.max_degree());
        let dj = riccati_derivative_ratio(&j, rho);
        let xl = self.local(x);
        let w = Self::wave_functions(&xl, rho, &j, &dj);
        let hs = -k / (self.medium.omega * self.medium.mu_plus);
        let zero = Complex64::new(0.0, 0.0);
        let (mut e, mut hf) = ([zero; 3], [zero; 3]);
        for n in 1..=self.max_degree() {
            let en = Self::en(n);
            for i in 0..3 {
                e[i] += en * (w[n].m_o[i] - I * w[n].n_e[i]);
                hf[i] += hs * en * (w[n].m_e[i] + I * w[n].n_o[i]);
            }
        }
        (self.to_global(&xl, &e), self.to_global(&xl, &hf))
    }

    /// Electric dipole polarizability read off the leading coefficient.
    pub fn dipole_polarizability(&self) -> Complex64 {
        let k = self.medium.k_plus().re;
        3.0 * I * self.a[1] / (2.0 * k * k * k)
    }
}

/// Exterior total-field traces on a sphere grid centred at the origin.
pub fn mie_traces(grid: &SurfaceGrid, medium: &MediumParams, wave: &PlaneWave, max_degree: usize) -> Result<TraceField> {
    let radius = grid
        .sphere_radius()
        .ok_or_else(|| SieError::UnsupportedGeometry("Mie traces need a sphere grid".into()))?;
    let sol = MieSolution::new(medium, radius, wave, max_degree)?;
    let mut t = TraceField::zeros(grid.len());
    for (j, x) in grid.nodes.iter().enumerate() {
        let (e, h) = sol.exterior_total(x)?;
        t.e[j] = e;
        t.h[j] = h;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points(r: f64) -> Vec<Vec3> {
        [[0.3, -0.5, 0.81], [-0.7, 0.1, -0.2], [0.05, 0.9, 0.4], [0.6, 0.6, -0.5]]
            .iter()
            .map(|v| {
                let s = r / norm(v);
                [v[0] * s, v[1] * s, v[2] * s]
            })
            .collect()
    }

    fn oblique() -> PlaneWave {
        let d = [0.6, 0.0, 0.8];
        PlaneWave::new(d, [0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn incident_series_reproduces_plane_wave() {
        let m = MediumParams::real(1.5, 2.0, 1.0, 1.0, 1.1).unwrap();
        let sol = MieSolution::new(&m, 1.0, &oblique(), 30).unwrap();
        for x in sample_points(0.9) {
            let (es, hs) = sol.incident_series(&x);
            let (ei, hi) = sol.wave.fields(&m, &x);
            for i in 0..3 {
                assert!((es[i] - ei[i]).norm() < 1e-12, "E {i}: {} vs {}", es[i], ei[i]);
                assert!((hs[i] - hi[i]).norm() < 1e-12, "H {i}: {} vs {}", hs[i], hi[i]);
            }
        }
    }

    #[test]
    fn degree_precondition() {
        let m = MediumParams::real(1.0, 2.0, 1.0, 1.0, 5.0).unwrap();
        assert!(matches!(MieSolution::new(&m, 1.0, &oblique(), 18), Err(SieError::Precondition(_))));
    }
}
