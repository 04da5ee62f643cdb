//! Material parameters of the exterior (`+`) and interior (`−`) media.

use crate::error::{Result, SieError};
use crate::kernels::WaveNumberPair;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Permittivities, permeabilities and angular frequency.
///
/// The interior permittivity may be lossy (`Im ε⁻ ≥ 0`); the others are real
/// and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub eps_plus: f64,
    pub eps_minus: Complex64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub omega: f64,
}

impl MediumParams {
    pub fn new(
        eps_plus: f64,
        eps_minus: Complex64,
        mu_plus: f64,
        mu_minus: f64,
        omega: f64,
    ) -> Result<Self> {
        let m = Self { eps_plus, eps_minus, mu_plus, mu_minus, omega };
        m.validate()?;
        Ok(m)
    }

    /// Lossless medium with real parameters.
    pub fn real(eps_plus: f64, eps_minus: f64, mu_plus: f64, mu_minus: f64, omega: f64) -> Result<Self> {
        Self::new(eps_plus, Complex64::new(eps_minus, 0.0), mu_plus, mu_minus, omega)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.eps_plus, self.eps_minus.re, self.eps_minus.im, self.mu_plus, self.mu_minus, self.omega]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(SieError::Parameter("non-finite medium parameter".into()));
        }
        if self.eps_plus <= 0.0 || self.mu_plus <= 0.0 || self.mu_minus <= 0.0 {
            return Err(SieError::Parameter(format!(
                "need eps+ > 0, mu+ > 0, mu- > 0 (got {}, {}, {})",
                self.eps_plus, self.mu_plus, self.mu_minus
            )));
        }
        if self.eps_minus.re <= 0.0 || self.eps_minus.im < 0.0 {
            return Err(SieError::Parameter(format!(
                "need Re eps- > 0 and Im eps- >= 0, got {}",
                self.eps_minus
            )));
        }
        if self.omega <= 0.0 {
            return Err(SieError::Parameter(format!("omega must be positive, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..*self }
    }

    pub fn k_plus(&self) -> Complex64 {
        Complex64::new(self.omega * (self.eps_plus * self.mu_plus).sqrt(), 0.0)
    }

    pub fn k_minus(&self) -> Complex64 {
        self.omega * (self.eps_minus * self.mu_minus).sqrt()
    }

    pub fn wavenumbers(&self) -> WaveNumberPair {
        WaveNumberPair { k_plus: self.k_plus(), k_minus: self.k_minus() }
    }

    /// Whether both media coincide exactly.
    pub fn is_homogeneous(&self) -> bool {
        self.eps_minus == Complex64::new(self.eps_plus, 0.0) && self.mu_minus == self.mu_plus
    }
}
