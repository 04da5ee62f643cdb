//! Spherical Bessel functions of integer order.

use num_complex::Complex64;

/// `j_0(z) … j_nmax(z)` by downward recurrence normalized against the closed
/// forms of `j_0` and `j_1`.
pub fn spherical_jn(z: Complex64, nmax: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if z.norm() == 0.0 {
        let mut out = vec![zero; nmax + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }
    let start = nmax + z.norm().ceil() as usize + 32;
    let mut vals = vec![zero; start + 2];
    vals[start] = Complex64::new(1.0, 0.0);
    for n in (1..=start).rev() {
        vals[n - 1] = (2 * n + 1) as f64 / z * vals[n] - vals[n + 1];
        if vals[n - 1].norm() > 1e250 {
            for v in vals[n - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    // divide by the modulus first so that norm_sqr cannot overflow
    let (exact, raw) = if j0.norm() >= j1.norm() { (j0, vals[0]) } else { (j1, vals[1]) };
    let size = raw.norm();
    let scale = exact / (raw / size) / size;
    vals.truncate(nmax + 1);
    vals.iter().map(|v| v * scale).collect()
}

/// `y_0(x) … y_nmax(x)` for real `x > 0` by upward recurrence.
pub fn spherical_yn(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let (s, c) = x.sin_cos();
    out.push(-c / x);
    if nmax >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for n in 1..nmax {
        let next = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

/// `h⁽¹⁾_n(x) = j_n(x) + i y_n(x)` for real `x > 0`.
pub fn spherical_hn1(x: f64, nmax: usize) -> Vec<Complex64> {
    let j = spherical_jn(Complex64::new(x, 0.0), nmax);
    let y = spherical_yn(x, nmax);
    j.iter().zip(&y).map(|(a, b)| Complex64::new(a.re, *b)).collect()
}

/// `[ρ z_n(ρ)]' / ρ = z_{n−1}(ρ) − n z_n(ρ)/ρ` for `n ≥ 1`; entry 0 is unused.
pub fn riccati_derivative_ratio(z: &[Complex64], rho: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
    for n in 1..z.len() {
        out[n] = z[n - 1] - n as f64 * z[n] / rho;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn closed_forms() {
        for x in [0.2, 0.7, 3.0, 12.0] {
            let j = spherical_jn(c(x), 3);
            let (s, co) = x.sin_cos();
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * co / (x * x);
            assert!((j[2].re - j2).abs() < 1e-10 * j2.abs(), "x={x}");
            let y = spherical_yn(x, 2);
            let y2 = (-3.0 / (x * x) + 1.0) * co / x - 3.0 * s / (x * x);
            assert!((y[2] - y2).abs() < 1e-12 * y2.abs());
        }
    }

    #[test]
    fn wronskian() {
        // j_n y_{n-1} - j_{n-1} y_n = 1/x²
        let x = 1.7;
        let j = spherical_jn(c(x), 20);
        let y = spherical_yn(x, 20);
        for n in 1..=20 {
            let w = j[n].re * y[n - 1] - j[n - 1].re * y[n];
            assert!((w * x * x - 1.0).abs() < 1e-10, "n={n}: {w}");
        }
    }

    #[test]
    fn complex_argument_satisfies_recurrence_and_closed_form() {
        let z = Complex64::new(1.3, 0.4);
        let j = spherical_jn(z, 12);
        assert!((j[0] - z.sin() / z).norm() < 1e-14);
        let j1 = z.sin() / (z * z) - z.cos() / z;
        assert!((j[1] - j1).norm() < 1e-14);
        for n in 1..12 {
            let r = j[n - 1] + j[n + 1] - (2 * n + 1) as f64 / z * j[n];
            assert!(r.norm() < 1e-12 * j[n - 1].norm());
        }
    }
}
