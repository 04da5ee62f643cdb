//! Kernels of the coupled trace system, the stabilizer and the constraints.
//!
//! Every kernel reads the eight channel fields `[e×n (xyz), e·n, h×n (xyz),
//! h·n]` at the source point.

use super::nystrom::{Kernel, Source, Target};
use super::trace::Block;
use crate::kernels::{difference_radial, green_radial, WaveNumberPair};
use crate::medium::MediumParams;
use crate::vec3::{cross, dot, norm, scale, sub, Vec3};
use num_complex::Complex64;

pub(crate) const N_CHANNELS: usize = 8;
const A: usize = 0;
const ALPHA: usize = 3;
const B: usize = 4;
const BETA: usize = 7;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Output rows of the full system, in kernel order.
pub(crate) const SYSTEM_ROWS: [(Block, usize); 6] = [
    (Block::ETangential, 0),
    (Block::ETangential, 1),
    (Block::ENormal, 0),
    (Block::HTangential, 0),
    (Block::HTangential, 1),
    (Block::HNormal, 0),
];

/// Output rows of the stabilizer.
pub(crate) const NORMAL_ROWS: [(Block, usize); 2] = [(Block::ENormal, 0), (Block::HNormal, 0)];

/// Medium-dependent constants shared by the kernels.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coefficients {
    pub ep: Complex64,
    pub em: Complex64,
    pub mp: Complex64,
    pub mm: Complex64,
    pub omega: f64,
    pub waves: WaveNumberPair,
    pub switch_radius: f64,
}

impl Coefficients {
    pub fn new(medium: &MediumParams, diameter: f64) -> Self {
        Self {
            ep: Complex64::new(medium.eps_plus, 0.0),
            em: medium.eps_minus,
            mp: Complex64::new(medium.mu_plus, 0.0),
            mm: Complex64::new(medium.mu_minus, 0.0),
            omega: medium.omega,
            waves: medium.wavenumbers(),
            switch_radius: 1e-3 * diameter,
        }
    }
}

/// Radial quantities of one target/source pair.
struct Pair {
    u: Vec3,
    gp: Complex64,
    dgp: Complex64,
    dgm: Complex64,
    f: Complex64,
    df: Complex64,
}

impl Pair {
    fn new(c: &Coefficients, t: &Target, s: &Source) -> Self {
        let d = sub(&t.x, &s.y);
        let r = norm(&d);
        let (gp, dgp) = green_radial(c.waves.k_plus, r);
        let (_, dgm) = green_radial(c.waves.k_minus, r);
        let (f, df) = difference_radial(&c.waves, r, c.switch_radius);
        Self { u: scale(1.0 / r, &d), gp, dgp, dgm, f, df }
    }
}

/// The operator `M`: rows `[e·t1, e·t2, e·n, h·t1, h·t2, h·n]` in the order of
/// [`SYSTEM_ROWS`].
pub(crate) struct MKernel {
    pub c: Coefficients,
}

impl Kernel for MKernel {
    fn rows(&self) -> usize {
        6
    }
    fn channels(&self) -> usize {
        N_CHANNELS
    }
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]) {
        let c = &self.c;
        let p = Pair::new(c, t, s);
        let z = Complex64::new(0.0, 0.0);
        out.fill(z);
        let (ep, em, mp, mm) = (c.ep, c.em, c.mp, c.mm);
        let c1 = 2.0 / (ep + em);
        let c2 = 2.0 * em / (ep + em);
        let c3 = 2.0 / (mp + mm);
        let c4 = 2.0 * mm / (mp + mm);
        let iw = I * c.omega;
        let nx = &t.n;
        let un = dot(&p.u, nx);
        let dp = p.dgp * un;
        let dm = p.dgm * un;
        let dd = p.df * un;
        // splittings keep every entry an exact zero for identical media
        let a1 = (ep - em) * dp + em * dd;
        let b1 = (mp - mm) * dp + mm * dd;
        let g1 = (ep - em) * p.dgp + em * p.df;
        let g3 = (mp - mm) * p.dgp + mm * p.df;
        let k3 = (ep * mp - em * mm) * p.gp + em * mm * p.f;
        let ge = (ep - em) * p.gp + em * p.f;
        let gm = (mp - mm) * p.gp + mm * p.f;
        let dn = sub(nx, &s.n);
        let g2xn = cross(&p.u, nx);

        for side in 0..2 {
            let tv = &t.t[side];
            let nt = cross(nx, tv);
            let tu = dot(tv, &p.u);
            let g2nt = p.df * dot(&p.u, &nt);
            let re = &mut out[side * N_CHANNELS..(side + 1) * N_CHANNELS];
            for k in 0..3 {
                re[A + k] = c1 * (a1 * tv[k] - g1 * tu * dn[k]);
                re[B + k] = c1 * iw * k3 * nt[k];
            }
            re[ALPHA] = c1 * ep * g2nt;
            let rh = &mut out[(3 + side) * N_CHANNELS..(4 + side) * N_CHANNELS];
            for k in 0..3 {
                rh[B + k] = c3 * (b1 * tv[k] - g3 * tu * dn[k]);
                rh[A + k] = -c3 * iw * k3 * nt[k];
            }
            rh[BETA] = c3 * mp * g2nt;
        }
        let en = &mut out[2 * N_CHANNELS..3 * N_CHANNELS];
        for k in 0..3 {
            en[B + k] = c2 * iw * gm * nx[k];
            en[A + k] = -c2 * p.df * g2xn[k];
        }
        en[ALPHA] = c2 * (dd + (1.0 - ep / em) * dm);
        let hn = &mut out[5 * N_CHANNELS..6 * N_CHANNELS];
        for k in 0..3 {
            hn[A + k] = -c4 * iw * ge * nx[k];
            hn[B + k] = -c4 * p.df * g2xn[k];
        }
        hn[BETA] = c4 * (dd + (1.0 - mp / mm) * dm);
    }
}

/// The stabilizer `J`: rows `[e·n, h·n]`.
pub(crate) struct JKernel {
    pub c: Coefficients,
}

impl Kernel for JKernel {
    fn rows(&self) -> usize {
        2
    }
    fn channels(&self) -> usize {
        N_CHANNELS
    }
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]) {
        let c = &self.c;
        let d = sub(&t.x, &s.y);
        let r = norm(&d);
        let g0 = 1.0 / (4.0 * std::f64::consts::PI * r);
        // grad_x G₀ = -G₀ (x - y)/r²
        let grad = scale(-g0 / (r * r), &d);
        let w2 = c.omega * c.omega;
        let iw = I * c.omega;
        out.fill(Complex64::new(0.0, 0.0));
        // D h = -∫ grad_x G₀ · (h × n)
        out[ALPHA] = w2 * c.ep * g0;
        for k in 0..3 {
            out[B + k] = -iw * grad[k];
            out[N_CHANNELS + A + k] = iw * grad[k];
        }
        out[N_CHANNELS + BETA] = w2 * c.mp * g0;
    }
}

/// The two constraint functionals.
pub(crate) struct ConstraintKernel {
    pub c: Coefficients,
}

impl Kernel for ConstraintKernel {
    fn rows(&self) -> usize {
        2
    }
    fn channels(&self) -> usize {
        N_CHANNELS
    }
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]) {
        let c = &self.c;
        let d = sub(&t.x, &s.y);
        let r = norm(&d);
        let (f, df) = difference_radial(&c.waves, r, c.switch_radius);
        let iw = I * c.omega;
        out.fill(Complex64::new(0.0, 0.0));
        // (K₊ − K₋) w = -∫ grad_x(G₊ − G₋) · (w × n)
        out[ALPHA] = -iw * c.ep * f;
        out[N_CHANNELS + BETA] = iw * c.mp * f;
        for k in 0..3 {
            let g = df * d[k] / r;
            out[B + k] = -g;
            out[N_CHANNELS + A + k] = -g;
        }
    }
}

/// Which normal-component equation to reduce to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduced {
    Electric,
    Magnetic,
}

/// Scalar kernel of `K₁ + ξω²ε⁺S` (or the magnetic analogue).
pub(crate) struct ReducedKernel {
    pub c: Coefficients,
    pub which: Reduced,
    pub xi: Complex64,
}

impl Kernel for ReducedKernel {
    fn rows(&self) -> usize {
        1
    }
    fn channels(&self) -> usize {
        1
    }
    fn eval(&self, t: &Target, s: &Source, out: &mut [Complex64]) {
        let c = &self.c;
        let d = sub(&t.x, &s.y);
        let r = norm(&d);
        let un = dot(&d, &t.n) / r;
        let (_, dgm) = green_radial(c.waves.k_minus, r);
        let (_, df) = difference_radial(&c.waves, r, c.switch_radius);
        let g0 = 1.0 / (4.0 * std::f64::consts::PI * r);
        let w2 = c.omega * c.omega;
        let (pref, ratio, outer) = match self.which {
            Reduced::Electric => (2.0 * c.em / (c.ep + c.em), c.ep / c.em, c.ep),
            Reduced::Magnetic => (2.0 * c.mm / (c.mp + c.mm), c.mp / c.mm, c.mp),
        };
        out[0] = pref * (df * un + (1.0 - ratio) * dgm * un) + self.xi * w2 * outer * g0;
    }
}
