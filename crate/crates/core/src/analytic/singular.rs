//! Parameter pairs for which the unstabilized sphere system has a null vector.

use crate::error::{Result, SieError};
use crate::geom::SurfaceGrid;
use crate::medium::MediumParams;
use crate::ops::TraceField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Root of [`singular_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPair {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    pub residual: Complex64,
}

impl SingularPair {
    /// A medium realizing the pair: `μ⁺ = 1`, `ω = k₊/√ε⁺` and `μ⁻` chosen so
    /// that the interior wavenumber equals `k₋`.
    pub fn medium(&self) -> Result<MediumParams> {
        let omega = self.k_plus / self.eps_plus.sqrt();
        let mu_minus = self.k_minus * self.k_minus / (omega * omega * self.eps_minus);
        MediumParams::real(self.eps_plus, self.eps_minus, 1.0, mu_minus, omega)
    }
}

/// `ε⁺ sin(k₋) e^{ik₋} (i − 1/k₋) − ε⁻ e^{ik₊} (cos k₊ − sin k₊/k₊)`.
pub fn singular_residual(eps_plus: f64, eps_minus: f64, k_plus: f64, k_minus: f64) -> Complex64 {
    let em = Complex64::from_polar(1.0, k_minus);
    let ep = Complex64::from_polar(1.0, k_plus);
    eps_plus * k_minus.sin() * em * (I - 1.0 / k_minus)
        - eps_minus * ep * (k_plus.cos() - k_plus.sin() / k_plus)
}

/// Partial derivatives of [`singular_residual`] in the order
/// `(ε⁺, ε⁻, k₊, k₋)`.
pub fn singular_residual_gradient(
    eps_plus: f64,
    eps_minus: f64,
    k_plus: f64,
    k_minus: f64,
) -> [Complex64; 4] {
    let em = Complex64::from_polar(1.0, k_minus);
    let ep = Complex64::from_polar(1.0, k_plus);
    let (sm, cm) = k_minus.sin_cos();
    let (sp, cp) = k_plus.sin_cos();
    let interior = sm * em * (I - 1.0 / k_minus);
    let exterior = ep * (cp - sp / k_plus);
    let d_kp = -eps_minus * (I * exterior + ep * (-sp - cp / k_plus + sp / (k_plus * k_plus)));
    let d_km = eps_plus * ((cm + I * sm) * em * (I - 1.0 / k_minus) + sm * em / (k_minus * k_minus));
    [interior, -exterior, d_kp, d_km]
}

/// Damped Newton iteration on `(Re, Im)` of the residual in the unknowns `(k₊, k₋)`.
pub fn find_singular_pair(eps_plus: f64, eps_minus: f64, guess: (f64, f64)) -> Result<SingularPair> {
    if !(guess.0 > 0.0 && guess.1 > 0.0) {
        return Err(SieError::Input(format!("guess must be positive, got {guess:?}")));
    }
    if !(eps_plus > 0.0 && eps_minus > 0.0) {
        return Err(SieError::Input("permittivities must be positive".into()));
    }
    let (mut kp, mut km) = guess;
    let mut f = singular_residual(eps_plus, eps_minus, kp, km);
    let mut iterates = vec![(kp, km, f.norm())];
    for _ in 0..100 {
        if f.norm() <= 1e-14 {
            break;
        }
        let g = singular_residual_gradient(eps_plus, eps_minus, kp, km);
        let (a, b, c, d) = (g[2].re, g[3].re, g[2].im, g[3].im);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(SieError::RootNotFound { iterates });
        }
        let dkp = -(d * f.re - b * f.im) / det;
        let dkm = -(-c * f.re + a * f.im) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let (np, nm) = (kp + step * dkp, km + step * dkm);
            if np > 0.0 && nm > 0.0 {
                let nf = singular_residual(eps_plus, eps_minus, np, nm);
                if nf.norm() < f.norm() || step == 1.0 && nf.norm() <= 1e-13 {
                    kp = np;
                    km = nm;
                    f = nf;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        iterates.push((kp, km, f.norm()));
        if !accepted || (step * dkp).hypot(step * dkm) < 1e-16 * kp.hypot(km) {
            break;
        }
    }
    if f.norm() > 1e-12 {
        return Err(SieError::RootNotFound { iterates });
    }
    Ok(SingularPair { eps_plus, eps_minus, k_plus: kp, k_minus: km, residual: f })
}

/// All roots with `0 < k± ≤ k_max` found by refining grid cells in which both
/// the real and the imaginary part change sign.
pub fn scan_singular_pairs(eps_plus: f64, eps_minus: f64, k_max: f64, cells: usize) -> Result<Vec<SingularPair>> {
    if !(k_max > 0.0) || cells < 2 {
        return Err(SieError::Input("scan needs k_max > 0 and at least two cells".into()));
    }
    let at = |i: usize| k_max * (i as f64 + 0.5) / (cells as f64 + 0.5);
    let values: Vec<Vec<Complex64>> = (0..=cells)
        .map(|i| (0..=cells).map(|j| singular_residual(eps_plus, eps_minus, at(i), at(j))).collect())
        .collect();
    let mut roots: Vec<SingularPair> = Vec::new();
    for i in 0..cells {
        for j in 0..cells {
            let corners = [values[i][j], values[i + 1][j], values[i][j + 1], values[i + 1][j + 1]];
            let changes = |part: fn(&Complex64) -> f64| {
                let lo = corners.iter().map(part).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(part).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if !(changes(|z| z.re) && changes(|z| z.im)) {
                continue;
            }
            let guess = (0.5 * (at(i) + at(i + 1)), 0.5 * (at(j) + at(j + 1)));
            let Ok(p) = find_singular_pair(eps_plus, eps_minus, guess) else { continue };
            if p.k_plus > k_max || p.k_minus > k_max {
                continue;
            }
            if roots.iter().all(|q| (q.k_plus - p.k_plus).hypot(q.k_minus - p.k_minus) > 1e-8) {
                roots.push(p);
            }
        }
    }
    roots.sort_by(|a, b| a.k_plus.total_cmp(&b.k_plus).then(a.k_minus.total_cmp(&b.k_minus)));
    Ok(roots)
}

/// The trace `e = n`, `h = 0` on the unit sphere.
pub fn singular_null_trace(grid: &SurfaceGrid) -> Result<TraceField> {
    match grid.sphere_radius() {
        Some(r) if (r - 1.0).abs() <= 1e-12 => {}
        _ => return Err(SieError::UnsupportedGeometry("the null trace lives on the unit sphere".into())),
    }
    let mut t = TraceField::zeros(grid.len());
    for (e, n) in t.e.iter_mut().zip(&grid.normals) {
        *e = [Complex64::new(n[0], 0.0), Complex64::new(n[1], 0.0), Complex64::new(n[2], 0.0)];
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_differences() {
        let x = [1.3, 4.0, 0.9, 2.2];
        let g = singular_residual_gradient(x[0], x[1], x[2], x[3]);
        for a in 0..4 {
            let h = 1e-6;
            let mut p = x;
            let mut m = x;
            p[a] += h;
            m[a] -= h;
            let fd = (singular_residual(p[0], p[1], p[2], p[3]) - singular_residual(m[0], m[1], m[2], m[3])) / (2.0 * h);
            assert!((fd - g[a]).norm() < 1e-6, "arg {a}: {fd} vs {}", g[a]);
        }
    }

    #[test]
    fn generic_parameters_are_not_singular() {
        assert!(singular_residual(1.0, 1.0, 1.0, 1.0).norm() > 0.1);
    }

    #[test]
    fn bad_guess_is_rejected() {
        assert!(find_singular_pair(1.0, 6.0, (-1.0, 1.0)).is_err());
    }

    #[test]
    fn medium_realizes_wavenumbers() {
        let p = find_singular_pair(1.0, 6.0, (0.8, 1.8)).unwrap();
        let m = p.medium().unwrap();
        assert!((m.k_plus().re - p.k_plus).abs() < 1e-14);
        assert!((m.k_minus().re - p.k_minus).abs() < 1e-14);
    }
}
