//! Helmholtz Green functions and the smooth difference kernel `G₊ − G₋`.

use crate::error::{Result, SieError};
use crate::vec3::{cscale_r, norm, scale, sub, CVec3, Vec3, CZERO3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const FOUR_PI: f64 = 4.0 * PI;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exterior and interior wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveNumberPair {
    pub k_plus: Complex64,
    pub k_minus: Complex64,
}

impl WaveNumberPair {
    pub fn new(k_plus: Complex64, k_minus: Complex64) -> Result<Self> {
        if k_plus.im < 0.0 || k_minus.im < 0.0 {
            return Err(SieError::Parameter(format!(
                "wavenumbers need Im k >= 0, got {k_plus} and {k_minus}"
            )));
        }
        Ok(Self { k_plus, k_minus })
    }
}

/// `G(r) = e^{ikr}/(4πr)` and `dG/dr`.
#[inline]
pub(crate) fn green_radial(k: Complex64, r: f64) -> (Complex64, Complex64) {
    let g = (I * k * r).exp() / (FOUR_PI * r);
    (g, g * (I * k - 1.0 / r))
}

/// `e^z - 1` without cancellation for small `|z|`.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // e^{x+iy} - 1 = expm1(x) cos y - 2 sin²(y/2) + i e^x sin y
        let (x, y) = (z.re, z.im);
        let s = (0.5 * y).sin();
        Complex64::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
    } else {
        z.exp() - 1.0
    }
}

/// Radial profile `f(r) = G₊(r) − G₋(r)` and `f'(r)`.
///
/// The power series in `r` is used below `switch_radius` and wherever
/// `max|k| r < 1`; elsewhere a cancellation-free direct form.
pub(crate) fn difference_radial(
    kp: &WaveNumberPair,
    r: f64,
    switch_radius: f64,
) -> (Complex64, Complex64) {
    let (a, b) = (kp.k_plus, kp.k_minus);
    let delta = a - b;
    if delta == Complex64::new(0.0, 0.0) {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let kmax = a.norm().max(b.norm());
    if r < switch_radius || kmax * r < 1.0 {
        return difference_series(a, b, r);
    }
    let eb = (I * b * r).exp();
    let em = cexpm1(I * delta * r);
    let f = eb * em / (FOUR_PI * r);
    // d/dr [e^{ibr}(e^{iΔr}-1)/r]
    let num = I * b * eb * em + I * delta * eb * (em + 1.0);
    let df = num / (FOUR_PI * r) - f / r;
    (f, df)
}

fn difference_series(a: Complex64, b: Complex64, r: f64) -> (Complex64, Complex64) {
    let delta = a - b;
    // s_n = (aⁿ - bⁿ)/(a - b)
    let mut s = Complex64::new(1.0, 0.0);
    let mut bpow = Complex64::new(1.0, 0.0);
    let mut f = I;
    let mut df = Complex64::new(0.0, 0.0);
    // c0 = iⁿ / n!
    let mut c0 = I;
    for n in 2..400usize {
        bpow *= b;
        s = a * s + bpow;
        c0 *= I / n as f64;
        let rp = r.powi(n as i32 - 2);
        let term_df = c0 * s * ((n - 1) as f64 * rp);
        let term_f = c0 * s * (rp * r);
        f += term_f;
        df += term_df;
        if n > 3
            && term_f.norm() <= 1e-17 * f.norm()
            && term_df.norm() <= 1e-17 * df.norm()
        {
            break;
        }
    }
    (f * delta / FOUR_PI, df * delta / FOUR_PI)
}

/// Default switch radius when no surface scale is supplied.
pub const DEFAULT_SWITCH_RADIUS: f64 = 1e-3;

fn separation(x: &Vec3, y: &Vec3) -> (Vec3, f64) {
    let d = sub(x, y);
    (d, norm(&d))
}

/// `e^{ik|x−y|}/(4π|x−y|)`.
pub fn helmholtz_green(k: Complex64, x: &Vec3, y: &Vec3) -> Result<Complex64> {
    let (_, r) = separation(x, y);
    if r == 0.0 {
        return Err(SieError::SingularEvaluation);
    }
    Ok(green_radial(k, r).0)
}

/// Gradient of the Green function in its first argument.
pub fn grad_x_helmholtz_green(k: Complex64, x: &Vec3, y: &Vec3) -> Result<CVec3> {
    let (d, r) = separation(x, y);
    if r == 0.0 {
        return Err(SieError::SingularEvaluation);
    }
    let (_, dg) = green_radial(k, r);
    Ok(cscale_r(dg, &scale(1.0 / r, &d)))
}

/// `G₊ − G₋`, continuous at `x = y` where it equals `i(k₊−k₋)/(4π)`.
pub fn green_difference(kp: &WaveNumberPair, x: &Vec3, y: &Vec3) -> Complex64 {
    green_difference_with_switch(kp, x, y, DEFAULT_SWITCH_RADIUS)
}

pub fn green_difference_with_switch(
    kp: &WaveNumberPair,
    x: &Vec3,
    y: &Vec3,
    switch_radius: f64,
) -> Complex64 {
    let (_, r) = separation(x, y);
    difference_radial(kp, r, switch_radius).0
}

/// `grad_x (G₊ − G₋)`; returns the zero vector at `x = y`.
pub fn grad_green_difference(kp: &WaveNumberPair, x: &Vec3, y: &Vec3) -> CVec3 {
    grad_green_difference_with_switch(kp, x, y, DEFAULT_SWITCH_RADIUS)
}

pub fn grad_green_difference_with_switch(
    kp: &WaveNumberPair,
    x: &Vec3,
    y: &Vec3,
    switch_radius: f64,
) -> CVec3 {
    let (d, r) = separation(x, y);
    if r == 0.0 {
        return CZERO3;
    }
    let (_, df) = difference_radial(kp, r, switch_radius);
    cscale_r(df, &scale(1.0 / r, &d))
}

/// Limit of `d/dr (G₊ − G₋)` at `r = 0`.
pub fn difference_slope_at_origin(kp: &WaveNumberPair) -> Complex64 {
    -(kp.k_plus * kp.k_plus - kp.k_minus * kp.k_minus) / (2.0 * FOUR_PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn direct_values() {
        let x = [0.0; 3];
        let y = [1.0, 0.0, 0.0];
        let g0 = helmholtz_green(c(0.0, 0.0), &x, &y).unwrap();
        assert!((g0 - 1.0 / FOUR_PI).norm() < 1e-16);
        let g1 = helmholtz_green(c(1.0, 0.0), &x, &y).unwrap();
        assert!((g1 - c(1f64.cos(), 1f64.sin()) / FOUR_PI).norm() < 1e-16);
        let gr = grad_x_helmholtz_green(c(0.0, 0.0), &y, &x).unwrap();
        assert!((gr[0] + 1.0 / FOUR_PI).norm() < 1e-16 && gr[1].norm() == 0.0);
        assert_eq!(helmholtz_green(c(1.0, 0.0), &x, &x), Err(SieError::SingularEvaluation));
        assert_eq!(
            grad_x_helmholtz_green(c(1.0, 0.0), &x, &x).unwrap_err(),
            SieError::SingularEvaluation
        );
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let x = [0.1, 0.2, 0.3];
        let y = [0.1 + 0.3, 0.2 - 0.4, 0.3];
        let k = c(0.0, 0.0);
        let g = grad_x_helmholtz_green(k, &x, &y).unwrap();
        let h = 1e-5;
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let fd = (helmholtz_green(k, &xp, &y).unwrap() - helmholtz_green(k, &xm, &y).unwrap())
                / (2.0 * h);
            assert!((fd - g[a]).norm() < 1e-7);
        }
    }

    #[test]
    fn difference_at_coincidence() {
        let kp = WaveNumberPair::new(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let x = [0.3, 0.1, -0.2];
        let v = green_difference(&kp, &x, &x);
        assert!((v - c(0.0, -1.0 / FOUR_PI)).norm() < 1e-16);
        assert_eq!(grad_green_difference(&kp, &x, &x), CZERO3);
    }

    #[test]
    fn identical_wavenumbers_vanish() {
        let kp = WaveNumberPair::new(c(1.3, 0.1), c(1.3, 0.1)).unwrap();
        let x = [0.0; 3];
        for r in [0.0, 1e-6, 0.5, 3.0] {
            let y = [r, 0.0, 0.0];
            assert_eq!(green_difference(&kp, &x, &y), c(0.0, 0.0));
            assert_eq!(grad_green_difference(&kp, &x, &y), CZERO3);
        }
    }

    #[test]
    fn slope_limit_magnitude() {
        let kp = WaveNumberPair::new(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let x = [0.0; 3];
        let y = [-1e-9, 0.0, 0.0];
        let g = grad_green_difference(&kp, &x, &y);
        let want = (1.0f64 - 4.0).abs() / (8.0 * PI);
        assert!((g[0].norm() - want).abs() < 1e-9);
        assert!((g[0] - difference_slope_at_origin(&kp)).norm() < 1e-9);
    }

    #[test]
    fn continuous_across_switch() {
        let kp = WaveNumberPair::new(c(3.0, 0.2), c(7.5, 0.0)).unwrap();
        let x = [0.0; 3];
        for r in [0.13, 0.5, 1.0 / 7.5] {
            let y = [0.0, 0.0, r];
            let a = green_difference_with_switch(&kp, &x, &y, r * (1.0 + 1e-12));
            let b = green_difference_with_switch(&kp, &x, &y, r * (1.0 - 1e-12));
            assert!((a - b).norm() < 1e-12, "r={r}: {a} {b}");
            let ga = grad_green_difference_with_switch(&kp, &x, &y, r * (1.0 + 1e-12));
            let gb = grad_green_difference_with_switch(&kp, &x, &y, r * (1.0 - 1e-12));
            assert!((ga[2] - gb[2]).norm() < 1e-12, "r={r}: {} {}", ga[2], gb[2]);
        }
    }

    #[test]
    fn rejects_negative_damping() {
        assert!(matches!(
            WaveNumberPair::new(c(1.0, -0.1), c(1.0, 0.0)),
            Err(SieError::Parameter(_))
        ));
    }
}
