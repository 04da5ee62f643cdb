//! Finite-dimensional pencils `I + M + ξJ`.

use crate::error::{Result, SieError};
use faer::{Mat, MatRef, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative tolerance for hermiticity, definiteness and nullspace tests.
const STRUCT_TOL: f64 = 1e-12;
/// Tolerance for the invariance of `N(J)` under `M`.
const INVARIANCE_TOL: f64 = 1e-10;
/// `σ_min` below which a grid point counts as singular.
pub const SINGULAR_TOL: f64 = 1e-8;

/// Properties of `J` (and of `M` relative to `N(J)`) recomputed from the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilFlags {
    pub j_self_adjoint: bool,
    pub j_nonnegative: bool,
    pub j_injective: bool,
    pub nullspace_invariant: bool,
    /// `N(J) ∩ N(I + M) = {0}`.
    pub nullspaces_disjoint: bool,
}

#[derive(Debug, Clone)]
pub struct PencilInstance {
    pub m: Mat<Complex64>,
    pub j: Mat<Complex64>,
    pub flags: PencilFlags,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn spectral_norm(a: MatRef<'_, Complex64>) -> f64 {
    a.singular_values().map(|s| s.first().copied().unwrap_or(0.0)).unwrap_or(f64::NAN)
}

fn sigma_min(a: MatRef<'_, Complex64>) -> f64 {
    a.singular_values().map(|s| s.last().copied().unwrap_or(0.0)).unwrap_or(f64::NAN)
}

fn hermitian_part(a: MatRef<'_, Complex64>) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, k| 0.5 * (a[(i, k)] + a[(k, i)].conj()))
}

fn min_eigenvalue(h: MatRef<'_, Complex64>) -> f64 {
    h.self_adjoint_eigenvalues(Side::Lower)
        .map(|v| v.first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN)
}

impl PencilInstance {
    pub fn new(m: Mat<Complex64>, j: Mat<Complex64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n || j.nrows() != n || j.ncols() != n || n == 0 {
            return Err(SieError::Input("M and J must be square of the same positive size".into()));
        }
        let flags = Self::compute_flags(m.as_ref(), j.as_ref());
        Ok(Self { m, j, flags })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn compute_flags(m: MatRef<'_, Complex64>, j: MatRef<'_, Complex64>) -> PencilFlags {
        let n = m.nrows();
        let jn = spectral_norm(j).max(f64::MIN_POSITIVE);
        let skew = Mat::from_fn(n, n, |a, b| j[(a, b)] - j[(b, a)].conj());
        let j_self_adjoint = skew.norm_max() <= STRUCT_TOL * jn.max(1.0);
        let tol = STRUCT_TOL * jn.max(1.0);
        let j_nonnegative = j_self_adjoint && min_eigenvalue(hermitian_part(j).as_ref()) >= -tol;
        let svd = j.svd().ok();
        let (j_injective, basis) = match &svd {
            Some(s) => {
                let sv = s.S().column_vector();
                let null: Vec<usize> = (0..n).filter(|&i| sv[i].re <= tol).collect();
                let v = s.V();
                let basis = Mat::from_fn(n, null.len(), |r, k| v[(r, null[k])]);
                (null.is_empty(), basis)
            }
            None => (false, Mat::zeros(n, 0)),
        };
        let (nullspace_invariant, nullspaces_disjoint) = if basis.ncols() == 0 {
            (true, true)
        } else {
            // M B − B (Bᴴ M B) measures how far M moves N(J) out of itself
            let mb = m * &basis;
            let coeff = basis.adjoint() * &mb;
            let leak = (&mb - &basis * &coeff).norm_l2();
            let invariant = leak <= INVARIANCE_TOL * spectral_norm(m).max(1.0);
            let ipm = &basis + &mb;
            let disjoint = sigma_min(ipm.as_ref()) > 1e-10;
            (invariant, disjoint)
        };
        PencilFlags { j_self_adjoint, j_nonnegative, j_injective, nullspace_invariant, nullspaces_disjoint }
    }

    /// `I + M + ξJ`.
    pub fn matrix(&self, xi: Complex64) -> Mat<Complex64> {
        let n = self.dim();
        Mat::from_fn(n, n, |a, b| {
            let id = if a == b { c(1.0) } else { c(0.0) };
            id + self.m[(a, b)] + xi * self.j[(a, b)]
        })
    }

    /// `‖M‖² / λ_min(J)`, the coercivity threshold; `None` unless `J` is
    /// self-adjoint and positive definite.
    pub fn coercive_threshold(&self) -> Option<f64> {
        if !(self.flags.j_self_adjoint && self.flags.j_injective && self.flags.j_nonnegative) {
            return None;
        }
        let lam = min_eigenvalue(hermitian_part(self.j.as_ref()).as_ref());
        let mn = spectral_norm(self.m.as_ref());
        Some(mn * mn / lam)
    }

    /// The 3×3 pencil with `I + M` of rows `(0,0,1), (0,0,1), (1,1,0)` and
    /// `J = diag(1, −1, 0)`, singular for every `ξ`.
    pub fn example_3x3() -> Self {
        let ipm = [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        let m = Mat::from_fn(3, 3, |a, b| c(ipm[a][b] - if a == b { 1.0 } else { 0.0 }));
        let jd = [1.0, -1.0, 0.0];
        let j = Mat::from_fn(3, 3, |a, b| if a == b { c(jd[a]) } else { c(0.0) });
        Self::new(m, j).expect("valid sizes")
    }

    /// Random `M` with `‖M‖ ≤ 2` and `J = AᴴA + δI`.
    pub fn random_coercive(n: usize, delta: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let norm = 2.0 * rng_unit(&mut rng, 0.25);
        let m = random_scaled(&mut rng, n, norm);
        let a = gaussian(&mut rng, n, n, 1.0 / (n as f64).sqrt());
        let mut j = a.adjoint() * &a;
        for i in 0..n {
            j[(i, i)] += c(delta);
        }
        let j = hermitian_part(j.as_ref());
        Self::new(m, j)
    }

    /// `N(J)` of dimension `null_dim` invariant under `M`, with
    /// `P(I + M)P` invertible on it; the structure is hidden by a random
    /// unitary change of basis.
    pub fn random_invariant(n: usize, null_dim: usize, seed: u64) -> Result<Self> {
        Self::random_block(n, null_dim, seed, false)
    }

    /// Like [`Self::random_invariant`] but with `M = −I` on `N(J)`, so that
    /// `N(J) ∩ N(I + M)` is the whole of `N(J)`.
    pub fn random_overlapping(n: usize, null_dim: usize, seed: u64) -> Result<Self> {
        Self::random_block(n, null_dim, seed, true)
    }

    fn random_block(n: usize, null_dim: usize, seed: u64, overlap: bool) -> Result<Self> {
        if null_dim == 0 || null_dim >= n {
            return Err(SieError::Input("nullspace dimension must lie in 1..n".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = n - null_dim;
        let mut m = random_scaled(&mut rng, n, 1.5);
        // columns of N(J) map into N(J)
        for col in r..n {
            for row in 0..r {
                m[(row, col)] = c(0.0);
            }
        }
        let inner = random_scaled(&mut rng, null_dim, 0.5);
        for a in 0..null_dim {
            for b in 0..null_dim {
                m[(r + a, r + b)] = if overlap { if a == b { c(-1.0) } else { c(0.0) } } else { inner[(a, b)] };
            }
        }
        let a = gaussian(&mut rng, r, r, 1.0 / (r as f64).sqrt());
        let jr = a.adjoint() * &a;
        let mut j = Mat::<Complex64>::zeros(n, n);
        for x in 0..r {
            for y in 0..r {
                j[(x, y)] = jr[(x, y)] + if x == y { c(1e-3) } else { c(0.0) };
            }
        }
        let q = random_unitary(&mut rng, n);
        let mq = &q * &m * q.adjoint();
        let jq = hermitian_part((&q * &j * q.adjoint()).as_ref());
        Self::new(mq, jq)
    }
}

fn rng_unit(rng: &mut ChaCha8Rng, lo: f64) -> f64 {
    rng.gen_range(lo..=1.0)
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Mat<Complex64> {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * (scale / std::f64::consts::SQRT_2)
    })
}

/// Gaussian matrix rescaled to spectral norm `target`.
fn random_scaled(rng: &mut ChaCha8Rng, n: usize, target: f64) -> Mat<Complex64> {
    let g = gaussian(rng, n, n, 1.0);
    let s = spectral_norm(g.as_ref());
    Mat::from_fn(n, n, |a, b| g[(a, b)] * (target / s))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Mat<Complex64> {
    let g = gaussian(rng, n, n, 1.0);
    g.qr().compute_Q()
}

/// Smallest singular value of `I + M + ξJ`.
pub fn pencil_sigma_min(p: &PencilInstance, xi: Complex64) -> f64 {
    sigma_min(p.matrix(xi).as_ref())
}

/// `‖(I + M + ξJ)⁻¹‖`.
pub fn pencil_inverse_norm(p: &PencilInstance, xi: Complex64) -> f64 {
    1.0 / pencil_sigma_min(p, xi)
}

/// `σ_min` along a list of `ξ`, in order.
pub fn sigma_min_scan(p: &PencilInstance, xis: &[Complex64]) -> Vec<f64> {
    xis.par_iter().map(|&xi| pencil_sigma_min(p, xi)).collect()
}

/// Points of a real `ξ` interval where `σ_min` has a local minimum below
/// [`SINGULAR_TOL`], each refined by golden-section search.
pub fn singular_set(p: &PencilInstance, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || points < 3 {
        return Err(SieError::Input("scan needs hi > lo and at least three points".into()));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
    let s = sigma_min_scan(p, &xs.iter().map(|&x| c(x)).collect::<Vec<_>>());
    let f = |x: f64| pencil_sigma_min(p, c(x));
    let mut out = Vec::new();
    for i in 0..points {
        let left = if i == 0 { f64::INFINITY } else { s[i - 1] };
        let right = if i + 1 == points { f64::INFINITY } else { s[i + 1] };
        if !(s[i] <= left && s[i] < right) {
            continue;
        }
        let (mut a, mut b) = (xs[i] - step, xs[i] + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..80 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
        }
        let x = 0.5 * (a + b);
        if f(x) < SINGULAR_TOL {
            out.push(x);
        }
    }
    Ok(out)
}

/// `true` when `σ_min` vanishes at every probe point, the pencil then being
/// singular for all `ξ` (a regular pencil has finitely many singular values).
pub fn is_singular_pencil(p: &PencilInstance, probes: &[Complex64]) -> bool {
    !probes.is_empty() && sigma_min_scan(p, probes).iter().all(|&s| s < SINGULAR_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub xi: f64,
    /// Minimum of `Re⟨(I+M+ξJ)x, x⟩` over the sampled unit vectors.
    pub sampled: f64,
    /// Smallest eigenvalue of the hermitian part.
    pub exact: f64,
}

/// Coercivity margin of `I + M + ξJ` for self-adjoint positive injective `J`.
pub fn coercivity_margin(p: &PencilInstance, xi: f64, n_samples: usize, seed: u64) -> Result<CoercivityReport> {
    let f = p.flags;
    if !(f.j_self_adjoint && f.j_nonnegative && f.j_injective) {
        return Err(SieError::Hypothesis(format!("J must be self-adjoint, positive and injective ({f:?})")));
    }
    let a = p.matrix(c(xi));
    let exact = min_eigenvalue(hermitian_part(a.as_ref()).as_ref());
    let n = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = f64::INFINITY;
    for _ in 0..n_samples {
        let x = gaussian(&mut rng, n, 1, 1.0);
        let nx = x.norm_l2();
        let ax = &a * &x;
        let q: Complex64 = (0..n).map(|i| ax[(i, 0)] * x[(i, 0)].conj()).sum();
        sampled = sampled.min(q.re / (nx * nx));
    }
    Ok(CoercivityReport { xi, sampled, exact })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceScan {
    /// Largest grid `ξ` with `σ_min < SINGULAR_TOL`; `None` if there is none.
    pub xi_threshold_empirical: Option<f64>,
    pub singular_xis: Vec<f64>,
    pub sigma_min: Vec<(f64, f64)>,
}

/// Scan `σ_min` over a real grid for an instance satisfying the hypotheses of
/// the invariant-nullspace theorem.
pub fn invariant_nullspace_scan(p: &PencilInstance, xi_grid: &[f64]) -> Result<NullspaceScan> {
    let f = p.flags;
    if !(f.j_self_adjoint && f.j_nonnegative) {
        return Err(SieError::Hypothesis("J must be self-adjoint and non-negative".into()));
    }
    if !f.nullspace_invariant {
        return Err(SieError::Hypothesis("N(J) is not invariant under M".into()));
    }
    if !f.nullspaces_disjoint {
        return Err(SieError::Hypothesis("N(J) and N(I+M) intersect".into()));
    }
    let s = sigma_min_scan(p, &xi_grid.iter().map(|&x| c(x)).collect::<Vec<_>>());
    let pairs: Vec<(f64, f64)> = xi_grid.iter().copied().zip(s).collect();
    let singular_xis: Vec<f64> = pairs.iter().filter(|(_, s)| *s < SINGULAR_TOL).map(|(x, _)| *x).collect();
    let xi_threshold_empirical = singular_xis.iter().copied().fold(None, |m: Option<f64>, x| Some(m.map_or(x, |v| v.max(x))));
    Ok(NullspaceScan { xi_threshold_empirical, singular_xis, sigma_min: pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub xi: Complex64,
    pub truncation: usize,
    /// `‖(I + M + ξJ)u‖/‖u‖` for the `m × m` sections.
    pub residual: f64,
    /// Size of the dropped `e_{m+1}` component, `|ξ|^m/(m+1)!`, relative to `‖u‖`.
    pub tail: f64,
    /// Smallest singular value of the `(m+1) × m` section of `J`.
    pub j_sigma_min: f64,
}

/// Truncation of the pencil with `Me₁ = −e₁`, `Je_k = e_{k+1}/(k+1)` applied to
/// `u = Σ (−ξ)^{k−1} e_k / k!`.
pub fn injective_counterexample(xi: Complex64, m: usize) -> Result<CounterexampleReport> {
    if m < 4 {
        return Err(SieError::Input(format!("truncation must be at least 4, got {m}")));
    }
    let zero = c(0.0);
    // entries of I + M + ξJ below the diagonal
    let sub: Vec<Complex64> = (1..m).map(|k| xi * c(1.0 / (k + 1) as f64)).collect();
    // u_{k+1} = -(ξ/(k+1)) u_k, rescaled whenever it grows too large
    let mut u = vec![zero; m];
    u[0] = c(1.0);
    for k in 1..m {
        u[k] = -(sub[k - 1] * u[k - 1]);
        if u[k].norm() > 1e200 {
            for v in u.iter_mut().take(k + 1) {
                *v *= 1e-200;
            }
        }
    }
    // (I + M) has a zero first row; row k ≥ 1 is u_k + ξ/(k+1) u_{k−1}
    let mut res = 0.0;
    for k in 1..m {
        let row = u[k] + sub[k - 1] * u[k - 1];
        res += row.norm_sqr();
    }
    let unorm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    // dropped component ξ u_m/(m+1), in the same scaling as u
    let tail = (xi * u[m - 1] / c((m + 1) as f64)).norm() / unorm;
    let j_section = Mat::from_fn(m + 1, m, |a, b| if a == b + 1 { c(1.0 / (b + 2) as f64) } else { zero });
    Ok(CounterexampleReport {
        xi,
        truncation: m,
        residual: res.sqrt() / unorm,
        tail,
        j_sigma_min: sigma_min(j_section.as_ref()),
    })
}
