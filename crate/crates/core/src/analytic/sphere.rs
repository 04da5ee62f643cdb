//! Single-layer potential of the constant density on the unit sphere.

use crate::error::{Result, SieError};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `v(r) = ∫_S e^{ik|x−y|}/(4π|x−y|) ds(y)` at `|x| = r`.
///
/// For `k = 0` the static limit `min(1, 1/r)` is returned.
pub fn sphere_layer_potential(k: Complex64, r: f64) -> Result<Complex64> {
    if !(r >= 0.0) {
        return Err(SieError::Input(format!("radius must be non-negative, got {r}")));
    }
    if k == Complex64::new(0.0, 0.0) {
        if r == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        return Ok(Complex64::new(1.0f64.min(1.0 / r), 0.0));
    }
    let sink = k.sin();
    if r >= 1.0 {
        Ok((I * k * r).exp() / r * sink / k)
    } else if r == 0.0 {
        Ok((I * k).exp())
    } else {
        Ok((k * r).sin() / r * (I * k).exp() / k)
    }
}

/// Radial derivative of [`sphere_layer_potential`]; at `r = 1` the `outside`
/// flag picks the one-sided limit.
pub fn sphere_layer_potential_dr(k: Complex64, r: f64, outside: bool) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(SieError::Input(format!("radius must be positive, got {r}")));
    }
    if k == Complex64::new(0.0, 0.0) {
        return Ok(if r > 1.0 || (r == 1.0 && outside) {
            Complex64::new(-1.0 / (r * r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    let sink = k.sin();
    if r > 1.0 || (r == 1.0 && outside) {
        let e = (I * k * r).exp();
        Ok(e * (I * k / r - 1.0 / (r * r)) * sink / k)
    } else {
        let kr = k * r;
        Ok((k * kr.cos() / r - kr.sin() / (r * r)) * (I * k).exp() / k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        let k = Complex64::new(1.0, 0.0);
        let v0 = sphere_layer_potential(k, 0.0).unwrap();
        assert!((v0 - Complex64::new(0.540302305868, 0.841470984808)).norm() < 1e-12);
        let v1 = sphere_layer_potential(k, 1.0).unwrap();
        assert!((v1 - Complex64::new(0.454648713413, 0.708073418274)).norm() < 1e-12);
    }

    #[test]
    fn branches_agree_and_derivative_jumps() {
        for k in [Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.3)] {
            let below = sphere_layer_potential(k, 1.0 - 1e-15).unwrap();
            let at = sphere_layer_potential(k, 1.0).unwrap();
            assert!((below - at).norm() < 1e-14);
            let jump = sphere_layer_potential_dr(k, 1.0, true).unwrap()
                - sphere_layer_potential_dr(k, 1.0, false).unwrap();
            assert!((jump + 1.0).norm() < 1e-14, "jump {jump}");
        }
    }

    #[test]
    fn static_limit() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(sphere_layer_potential(z, 0.5).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(sphere_layer_potential(z, 4.0).unwrap(), Complex64::new(0.25, 0.0));
        assert!(sphere_layer_potential(z, -1.0).is_err());
    }
}
