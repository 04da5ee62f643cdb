//! JSON run configuration.

use maxwell_sie::geom::{build_ellipsoid_grid, build_sphere_grid, SurfaceGrid};
use maxwell_sie::{MediumParams, PlaneWave, SieError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;

/// A complex number given either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub geometry: Option<GeometryConfig>,
    pub medium: Option<MediumConfig>,
    #[serde(default)]
    pub incident: Option<PlaneWave>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub sweep: Option<SweepConfig>,
    pub singular_find: Option<SingularFindConfig>,
    pub pencil: Option<PencilConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometryConfig {
    Sphere { radius: f64, n_polar: usize, n_azimuthal: Option<usize> },
    Ellipsoid { semi_axes: [f64; 3], n_polar: usize, n_azimuthal: Option<usize> },
}

impl GeometryConfig {
    pub fn set_order(&mut self, order: usize) {
        match self {
            GeometryConfig::Sphere { n_polar, n_azimuthal, .. }
            | GeometryConfig::Ellipsoid { n_polar, n_azimuthal, .. } => {
                *n_polar = order;
                *n_azimuthal = None;
            }
        }
    }

    pub fn build(&self) -> Result<SurfaceGrid, SieError> {
        match *self {
            GeometryConfig::Sphere { radius, n_polar, n_azimuthal } => {
                build_sphere_grid(radius, n_polar, n_azimuthal.unwrap_or(2 * n_polar))
            }
            GeometryConfig::Ellipsoid { semi_axes, n_polar, n_azimuthal } => {
                build_ellipsoid_grid(semi_axes, n_polar, n_azimuthal.unwrap_or(2 * n_polar))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub eps_plus: f64,
    pub eps_minus: ComplexValue,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub omega: f64,
}

impl MediumConfig {
    pub fn build(&self) -> Result<MediumParams, SieError> {
        MediumParams::new(self.eps_plus, self.eps_minus.value(), self.mu_plus, self.mu_minus, self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Mie,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_xi")]
    pub xi: ComplexValue,
    /// Relative L² tolerance for the oracle comparison.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub oracle: Option<Oracle>,
}

fn default_xi() -> ComplexValue {
    ComplexValue::Real(1.0)
}

fn default_tolerance() -> f64 {
    1e-4
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { xi: default_xi(), tolerance: default_tolerance(), oracle: None }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// JSON report; standard output when absent.
    pub report: Option<PathBuf>,
    /// Per-node trace CSV (solve only).
    pub trace_csv: Option<PathBuf>,
    /// CSV table (sweep and pencil); standard output when absent.
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub omegas: Vec<f64>,
    /// Per-frequency `ξ`; overrides `solver.xi` when present.
    pub xi_table: Option<Vec<ComplexValue>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularFindConfig {
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// Starting `(k₊, k₋)` for Newton's method.
    pub guess: Option<[f64; 2]>,
    pub scan: Option<ScanConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub k_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RealGrid {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PencilKind {
    Example3x3,
    Counterexample,
    Coercive,
    Invariant,
    Overlapping,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilConfig {
    pub kind: PencilKind,
    #[serde(default = "default_pencil_dim")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Dimension of `N(J)` for the invariant and overlapping kinds.
    #[serde(default = "default_null_dim")]
    pub null_dim: usize,
    /// Sample points for `example3x3` and the counterexample.
    pub xis: Option<Vec<ComplexValue>>,
    /// Real grid for the coercive and invariant scans.
    pub xi_grid: Option<RealGrid>,
    /// Truncation sizes for the counterexample.
    pub truncations: Option<Vec<usize>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_pencil_dim() -> usize {
    64
}

fn default_null_dim() -> usize {
    4
}

fn default_samples() -> usize {
    200
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, SieError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| SieError::Input(format!("config: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(SieError::Input(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        if let Some(m) = &cfg.medium {
            m.build()?;
        }
        if let Some(w) = &cfg.incident {
            w.validate()?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SieError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn geometry(&self) -> Result<&GeometryConfig, SieError> {
        self.geometry.as_ref().ok_or_else(|| SieError::Input("config has no geometry block".into()))
    }

    pub fn medium(&self) -> Result<MediumParams, SieError> {
        self.medium.as_ref().ok_or_else(|| SieError::Input("config has no medium block".into()))?.build()
    }

    pub fn wave(&self) -> PlaneWave {
        self.incident.clone().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"{"version": 1,
        "geometry": {"shape": "sphere", "radius": 1.0, "n_polar": 6},
        "medium": {"eps_plus": 1.0, "eps_minus": [2.0, 0.5], "mu_plus": 1.0, "mu_minus": 1.0, "omega": 1.0}}"#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::from_json(MIN).unwrap();
        assert_eq!(c.medium().unwrap().eps_minus, Complex64::new(2.0, 0.5));
        assert_eq!(c.geometry().unwrap().build().unwrap().param_orders, (6, 12));
        assert_eq!(c.solver.xi.value(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        let extra = MIN.replacen("\"version\": 1,", "\"version\": 1, \"colour\": 3,", 1);
        assert!(RunConfig::from_json(&extra).is_err());
        let nested = MIN.replacen("\"n_polar\": 6", "\"n_polar\": 6, \"bogus\": 1", 1);
        assert!(RunConfig::from_json(&nested).is_err());
        let v2 = MIN.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(RunConfig::from_json(&v2).is_err());
        let none = MIN.replacen("\"version\": 1,", "", 1);
        assert!(RunConfig::from_json(&none).is_err());
    }

    #[test]
    fn rejects_inadmissible_medium() {
        let lossy_gain = MIN.replacen("[2.0, 0.5]", "[2.0, -0.5]", 1);
        assert!(RunConfig::from_json(&lossy_gain).is_err());
        let neg = MIN.replacen("\"mu_plus\": 1.0", "\"mu_plus\": -1.0", 1);
        assert!(RunConfig::from_json(&neg).is_err());
    }
}
