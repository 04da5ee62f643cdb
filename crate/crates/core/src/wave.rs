//! Incident plane waves.

use crate::error::{Result, SieError};
use crate::medium::MediumParams;
use crate::vec3::{cross, cscale_r, dot, norm, CVec3, Vec3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Plane wave `E = p e^{ik₊ d·x}`, `H = √(ε⁺/μ⁺) (d × p) e^{ik₊ d·x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneWave {
    pub direction: Vec3,
    pub polarization: Vec3,
}

impl PlaneWave {
    pub fn new(direction: Vec3, polarization: Vec3) -> Result<Self> {
        let w = Self { direction, polarization };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let (d, p) = (&self.direction, &self.polarization);
        if (norm(d) - 1.0).abs() > 1e-12 || (norm(p) - 1.0).abs() > 1e-12 {
            return Err(SieError::Input("direction and polarization must be unit vectors".into()));
        }
        if dot(d, p).abs() > 1e-12 {
            return Err(SieError::Input(format!(
                "polarization not orthogonal to direction (d·p = {:.3e})",
                dot(d, p)
            )));
        }
        Ok(())
    }

    /// `(E, H)` of the wave in the exterior medium at `x`.
    pub fn fields(&self, medium: &MediumParams, x: &Vec3) -> (CVec3, CVec3) {
        let k = medium.k_plus().re;
        let phase = Complex64::from_polar(1.0, k * dot(&self.direction, x));
        let eta = (medium.eps_plus / medium.mu_plus).sqrt();
        let dxp = cross(&self.direction, &self.polarization);
        (
            cscale_r(phase, &self.polarization),
            cscale_r(phase * eta, &dxp),
        )
    }
}

impl Default for PlaneWave {
    fn default() -> Self {
        Self { direction: [0.0, 0.0, 1.0], polarization: [1.0, 0.0, 0.0] }
    }
}
