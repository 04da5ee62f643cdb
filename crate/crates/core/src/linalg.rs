//! Dense LU factorization and singular value estimates.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::lu::partial_pivoting::{factor, solve};
use faer::linalg::matmul::matmul;
use faer::{Accum, Conj, Mat, MatMut, MatRef, Par};
use num_complex::Complex64;

/// LU factors with partial pivoting, computed in place.
pub struct Lu {
    factors: Mat<Complex64>,
    perm: Vec<usize>,
    perm_inv: Vec<usize>,
}

impl Lu {
    pub fn factor(mut a: Mat<Complex64>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut perm = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let mut buf = MemBuffer::new(factor::lu_in_place_scratch::<usize, Complex64>(n, n, Par::Seq, Default::default()));
        factor::lu_in_place(a.as_mut(), &mut perm, &mut perm_inv, Par::Seq, MemStack::new(&mut buf), Default::default());
        Self { factors: a, perm, perm_inv }
    }

    pub fn dim(&self) -> usize {
        self.factors.nrows()
    }

    /// Smallest modulus on the diagonal of `U`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim()).map(|i| self.factors[(i, i)].norm()).fold(f64::INFINITY, f64::min)
    }

    fn run(&self, rhs: MatMut<'_, Complex64>, adjoint: bool) {
        let n = self.dim();
        let perm = faer::perm::PermRef::new_checked(&self.perm, &self.perm_inv, n);
        let lu = self.factors.as_ref();
        let req = solve::solve_in_place_scratch::<usize, Complex64>(n, rhs.ncols(), Par::Seq);
        let mut buf = MemBuffer::new(req);
        let stack = MemStack::new(&mut buf);
        if adjoint {
            solve::solve_transpose_in_place_with_conj(lu, lu, perm, Conj::Yes, rhs, Par::Seq, stack);
        } else {
            solve::solve_in_place_with_conj(lu, lu, perm, Conj::No, rhs, Par::Seq, stack);
        }
    }

    /// Overwrite `rhs` with `A⁻¹ rhs`.
    pub fn solve_in_place(&self, rhs: MatMut<'_, Complex64>) {
        self.run(rhs, false)
    }

    /// Overwrite `rhs` with `A⁻ᴴ rhs`.
    pub fn solve_adjoint_in_place(&self, rhs: MatMut<'_, Complex64>) {
        self.run(rhs, true)
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.solve_in_place(x.as_mut());
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }
}

/// Fixed, non-symmetric start vector for the power iterations.
fn start_vector(n: usize) -> Mat<Complex64> {
    let mut v = Mat::from_fn(n, 1, |i, _| {
        let t = i as f64;
        Complex64::new(1.0 + 0.5 * (0.731 * t).sin(), 0.3 * (1.379 * t).cos())
    });
    let s = v.norm_l2();
    v.as_mut().col_mut(0).iter_mut().for_each(|x| *x /= s);
    v
}

const MAX_ITERS: usize = 200;
const REL_TOL: f64 = 1e-8;

/// Largest singular value by power iteration on `AᴴA`.
pub fn sigma_max_estimate(a: MatRef<'_, Complex64>) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = start_vector(n);
    let mut av = Mat::<Complex64>::zeros(a.nrows(), 1);
    let mut est = 0.0;
    for _ in 0..MAX_ITERS {
        matmul(av.as_mut(), Accum::Replace, a, v.as_ref(), Complex64::new(1.0, 0.0), Par::Seq);
        let s = av.norm_l2();
        if s == 0.0 {
            return 0.0;
        }
        matmul(v.as_mut(), Accum::Replace, a.adjoint(), av.as_ref(), Complex64::new(1.0, 0.0), Par::Seq);
        let t = v.norm_l2();
        v.as_mut().col_mut(0).iter_mut().for_each(|x| *x /= t);
        let next = t.sqrt();
        if (next - est).abs() <= REL_TOL * next {
            return next;
        }
        est = next;
    }
    est
}

/// Smallest singular value by inverse iteration on `(AᴴA)⁻¹`.
pub fn sigma_min_estimate(lu: &Lu) -> f64 {
    let n = lu.dim();
    if n == 0 {
        return 0.0;
    }
    if lu.min_pivot() == 0.0 {
        return 0.0;
    }
    let mut v = start_vector(n);
    let mut est = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        lu.solve_adjoint_in_place(v.as_mut());
        lu.solve_in_place(v.as_mut());
        let t = v.norm_l2();
        if !t.is_finite() {
            return 0.0;
        }
        v.as_mut().col_mut(0).iter_mut().for_each(|x| *x /= t);
        let next = 1.0 / t.sqrt();
        if (next - est).abs() <= REL_TOL * next {
            return next;
        }
        est = next;
    }
    est
}

/// Extreme singular values from a full SVD.
pub fn singular_value_extremes(a: MatRef<'_, Complex64>) -> Option<(f64, f64)> {
    let s = a.singular_values().ok()?;
    Some((*s.last()?, s[0]))
}
