//! Exterior scattered fields from surface traces.

use crate::error::{Result, SieError};
use crate::geom::SurfaceGrid;
use crate::medium::MediumParams;
use crate::ops::TraceField;
use crate::vec3::{norm, sub, CVec3, Vec3};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(E, H)` of the scattered field at exterior points from the exterior
/// total-field traces.
///
/// Points closer to the surface than a tenth of the diameter are evaluated
/// with a warning, since the product rule loses accuracy there.
pub fn evaluate_scattered_field(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    trace: &TraceField,
    points: &[Vec3],
) -> Result<Vec<(CVec3, CVec3)>> {
    medium.validate()?;
    if trace.e.len() != grid.len() || trace.h.len() != grid.len() {
        return Err(SieError::Input("trace does not match the grid".into()));
    }
    let axes = grid.semi_axes();
    let k = medium.k_plus();
    // H' = √(μ/ε) H turns the curl equations into curl E = ik H', curl H' = -ik E
    let imp = (medium.mu_plus / medium.eps_plus).sqrt();
    let a: Vec<CVec3> = trace.e_cross_n(grid).iter().map(|v| v.map(|c| -c)).collect();
    let b: Vec<CVec3> = trace.h_cross_n(grid).iter().map(|v| v.map(|c| -imp * c)).collect();
    let near = 0.1 * grid.diameter();
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        let level: f64 = (0..3).map(|i| (x[i] / axes[i]).powi(2)).sum();
        if level <= 1.0 {
            return Err(SieError::Input(format!("point {x:?} is not outside the scatterer")));
        }
        let dist = grid.nodes.iter().map(|y| norm(&sub(x, y))).fold(f64::INFINITY, f64::min);
        if dist < near {
            log::warn!("field point {x:?} lies within {dist:.3e} of the surface; accuracy reduced");
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut e = [zero; 3];
        let mut hp = [zero; 3];
        for j in 0..grid.len() {
            let d = sub(x, &grid.nodes[j]);
            let r = norm(&d);
            let u = [d[0] / r, d[1] / r, d[2] / r];
            let phi = (I * k * r).exp() / (4.0 * std::f64::consts::PI * r);
            let d1 = (I * k - 1.0 / r) * phi;
            let d2 = phi / (r * r) + (I * k - 1.0 / r) * d1;
            let w = grid.weights[j];
            let (aj, bj) = (&a[j], &b[j]);
            let ua: Complex64 = (0..3).map(|i| u[i] * aj[i]).sum();
            let ub: Complex64 = (0..3).map(|i| u[i] * bj[i]).sum();
            let ga = cross_rc(&u, aj);
            let gb = cross_rc(&u, bj);
            for i in 0..3 {
                // curl ∫Φ a = ∫∇Φ × a,  curl curl ∫Φ a = ∫ (k²Φ a + Hess Φ · a)
                let cca = k * k * phi * aj[i] + (d2 - d1 / r) * u[i] * ua + d1 / r * aj[i];
                let ccb = k * k * phi * bj[i] + (d2 - d1 / r) * u[i] * ub + d1 / r * bj[i];
                e[i] += w * (d1 * ga[i] - ccb / (I * k));
                hp[i] += w * (d1 * gb[i] + cca / (I * k));
            }
        }
        out.push((e, hp.map(|c| c / imp)));
    }
    Ok(out)
}

fn cross_rc(u: &Vec3, v: &CVec3) -> CVec3 {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Relative Silver–Müller defect `|√μ⁺ H × x̂ − √ε⁺ E| / |E|` at a point.
pub fn radiation_defect(medium: &MediumParams, x: &Vec3, e: &CVec3, h: &CVec3) -> f64 {
    let r = norm(x);
    let xh = [x[0] / r, x[1] / r, x[2] / r];
    let hx = [
        h[1] * xh[2] - h[2] * xh[1],
        h[2] * xh[0] - h[0] * xh[2],
        h[0] * xh[1] - h[1] * xh[0],
    ];
    let (sm, se) = (medium.mu_plus.sqrt(), medium.eps_plus.sqrt());
    let num: f64 = (0..3).map(|i| (sm * hx[i] - se * e[i]).norm_sqr()).sum();
    let den: f64 = e.iter().map(|c| c.norm_sqr()).sum();
    (num / den).sqrt()
}
