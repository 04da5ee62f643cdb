use maxwell_sie::analytic::{spherical_hn1, spherical_jn};
use maxwell_sie::geom::{build_ellipsoid_grid, build_sphere_grid, complex_harmonic, surface_divergence, SurfaceGrid};
use maxwell_sie::ops::{
    apply_system, assemble_d, assemble_j, assemble_m, assemble_single_layer, constraint_residuals, SingularQuadrature,
    TraceField,
};
use maxwell_sie::solve::incident_field;
use maxwell_sie::vec3::CVec3;
use maxwell_sie::{MediumParams, PlaneWave};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn matvec(a: faer::MatRef<'_, Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum()).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

fn harmonic_samples(g: &SurfaceGrid, l: usize, m: i64) -> Vec<Complex64> {
    g.param_points.iter().map(|s| complex_harmonic(l, m, s)).collect()
}

#[test]
fn laplace_single_layer_eigenvalues() {
    for (np, cases, tol) in [
        (12, &[(0, 0), (1, -1), (2, 1), (3, 3), (4, -2)][..], 1e-10),
        (16, &[(5, 2), (6, -6)][..], 1e-12),
    ] {
        let g = build_sphere_grid(1.0, np, 2 * np).unwrap();
        let s = assemble_single_layer(&g, c(0.0));
        for &(l, m) in cases {
            let y = harmonic_samples(&g, l, m);
            let want: Vec<Complex64> = y.iter().map(|v| v / (2 * l + 1) as f64).collect();
            assert!(max_diff(&matvec(s.as_ref(), &y), &want) < tol, "l = {l}");
        }
    }
}

#[test]
fn helmholtz_single_layer_eigenvalues() {
    // S Y_l = i k j_l(k) h_l(k) Y_l on the unit sphere
    let g = build_sphere_grid(1.0, 18, 36).unwrap();
    for k in [0.7, 2.5] {
        let s = assemble_single_layer(&g, c(k));
        let j = spherical_jn(c(k), 8);
        let h = spherical_hn1(k, 8);
        for (l, m) in [(0, 0), (2, -1), (4, 2), (5, 0)] {
            let lam = Complex64::new(0.0, k) * j[l] * h[l];
            let y = harmonic_samples(&g, l, m);
            let want: Vec<Complex64> = y.iter().map(|v| v * lam).collect();
            let err = max_diff(&matvec(s.as_ref(), &y), &want);
            assert!(err < 1e-10, "k = {k}, l = {l}: {err:.2e}");
        }
    }
}

#[test]
fn laplace_single_layer_is_weighted_symmetric_and_positive() {
    let g = build_sphere_grid(1.0, 10, 20).unwrap();
    let s = assemble_single_layer(&g, c(0.0));
    let n = g.len();
    let ws = faer::Mat::from_fn(n, n, |i, j| s[(i, j)] * g.weights[i]);
    for i in 0..n {
        for j in 0..n {
            assert!((ws[(i, j)] - ws[(j, i)]).norm() <= 1e-10, "({i}, {j})");
        }
    }
    // densities enter through degree-(n_polar − 1) interpolation, so positivity
    // is checked on that band-limited subspace
    let lmax = g.max_degree();
    let basis: Vec<Vec<Complex64>> = (0..=lmax)
        .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
        .map(|(l, m)| harmonic_samples(&g, l, m))
        .collect();
    let nb = basis.len();
    let sy: Vec<Vec<Complex64>> = basis.iter().map(|y| matvec(s.as_ref(), y)).collect();
    let gram = faer::Mat::from_fn(nb, nb, |a, b| {
        (0..n).map(|i| g.weights[i] * basis[a][i].conj() * sy[b][i]).sum::<Complex64>()
    });
    let herm = faer::Mat::from_fn(nb, nb, |a, b| 0.5 * (gram[(a, b)] + gram[(b, a)].conj()));
    let ev = herm.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    assert!(ev[0] > 0.9 / (2 * lmax + 1) as f64, "{}", ev[0]);
}

/// Polynomial (band-limited) vector field sampled at the nodes.
fn polynomial_field(g: &SurfaceGrid) -> Vec<CVec3> {
    g.nodes
        .iter()
        .map(|x| {
            [
                Complex64::new(x[1] * x[2], 0.3),
                Complex64::new(x[0] * x[0] - 0.5, x[2]),
                Complex64::new(x[0] + 2.0 * x[1], x[0] * x[1]),
            ]
        })
        .collect()
}

/// `max |D h + S div_Γ(h × n)|` relative to `max |h|`.
fn green_identity_defect(g: &SurfaceGrid) -> f64 {
    let h = polynomial_field(g);
    let d = assemble_d(g);
    let s = assemble_single_layer(g, c(0.0));
    let flat: Vec<Complex64> = h.iter().flat_map(|v| v.iter().copied()).collect();
    let hxn: Vec<CVec3> = h
        .iter()
        .zip(&g.normals)
        .map(|(v, n)| {
            let nc = [c(n[0]), c(n[1]), c(n[2])];
            [v[1] * nc[2] - v[2] * nc[1], v[2] * nc[0] - v[0] * nc[2], v[0] * nc[1] - v[1] * nc[0]]
        })
        .collect();
    let div = surface_divergence(g, &hxn).unwrap();
    let lhs: Vec<Complex64> =
        matvec(d.as_ref(), &flat).iter().zip(matvec(s.as_ref(), &div)).map(|(a, b)| a + b).collect();
    let hmax = flat.iter().map(|v| v.norm()).fold(0.0, f64::max);
    lhs.iter().map(|v| v.norm()).fold(0.0, f64::max) / hmax
}

#[test]
fn green_identity_holds() {
    let g = build_sphere_grid(1.0, 12, 24).unwrap();
    assert!(green_identity_defect(&g) < 1e-9);
}

#[test]
fn identical_media_give_zero_operator() {
    let g = build_sphere_grid(1.0, 6, 12).unwrap();
    let m = MediumParams::real(1.5, 1.5, 0.8, 0.8, 0.9).unwrap();
    assert!(assemble_m(&g, &m).unwrap().matrix.norm_max() <= 1e-13);
}

#[test]
fn incident_traces_satisfy_constraints() {
    let g = build_ellipsoid_grid([1.0, 0.9, 1.1], 14, 28).unwrap();
    let m = MediumParams::real(1.0, 2.0, 1.0, 1.0, 0.9).unwrap();
    let inc = incident_field(&g, &m, &PlaneWave::default()).unwrap();
    let t = inc.incident_trace();
    let (r1, r2) = constraint_residuals(&g, &m, &t).unwrap();
    let worst = r1.iter().chain(&r2).map(|v| v.norm()).fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst}");
}

fn sample_dofs(n: usize, seed: u64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * (seed as f64 * 0.37 + 1.1);
            Complex64::new(t.sin(), (1.7 * t).cos())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn matrix_free_apply_matches_assembly(seed in 0u64..10_000, xi_re in -2.0f64..2.0, xi_im in -2.0f64..2.0, omega in 0.05f64..1.5) {
        let g = build_ellipsoid_grid([1.0, 0.85, 1.15], 5, 10).unwrap();
        let med = MediumParams::new(1.0, Complex64::new(2.5, 0.2), 1.0, 1.3, omega).unwrap();
        let xi = Complex64::new(xi_re, xi_im);
        let x = sample_dofs(6 * g.len(), seed);
        let m = assemble_m(&g, &med).unwrap();
        let j = assemble_j(&g, &med).unwrap();
        let mx = m.apply(&x);
        let jx = j.apply(&x);
        let want: Vec<Complex64> = (0..x.len()).map(|i| x[i] + mx[i] + xi * jx[i]).collect();
        let got = apply_system(&g, &med, SingularQuadrature::for_grid(&g), xi, &x).unwrap();
        let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(max_diff(&got, &want) <= 1e-12 * scale);
    }

    #[test]
    fn trace_dof_roundtrip(seed in 0u64..10_000) {
        let g = build_sphere_grid(1.0, 4, 8).unwrap();
        let x = sample_dofs(6 * g.len(), seed);
        let t = TraceField::from_dofs(&g, &x).unwrap();
        let y = t.to_dofs(&g).unwrap();
        prop_assert!(max_diff(&x, &y) < 1e-14);
    }
}
