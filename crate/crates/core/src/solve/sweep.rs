//! Frequency sweeps of the stabilized system.

use super::incident::incident_field;
use super::system::build_system;
use crate::error::{Result, SieError};
use crate::geom::SurfaceGrid;
use crate::medium::MediumParams;
use crate::ops::{assemble_j_with, assemble_m_with, SingularQuadrature};
use crate::wave::PlaneWave;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How `ξ` is chosen at each frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiRule {
    Constant(Complex64),
    /// One value per frequency, in sweep order.
    Table(Vec<Complex64>),
}

impl Default for XiRule {
    fn default() -> Self {
        XiRule::Constant(Complex64::new(1.0, 0.0))
    }
}

impl XiRule {
    fn at(&self, index: usize) -> Result<Complex64> {
        match self {
            XiRule::Constant(x) => Ok(*x),
            XiRule::Table(v) => v
                .get(index)
                .copied()
                .ok_or_else(|| SieError::Input(format!("xi table has no entry for frequency {index}"))),
        }
    }
}

/// Outcome at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepStatus {
    Ok,
    NearSingular,
    Failed(String),
}

impl std::fmt::Display for SweepStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepStatus::Ok => write!(f, "ok"),
            SweepStatus::NearSingular => write!(f, "near_singular"),
            SweepStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub xi: Complex64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
    pub constraint_r1: f64,
    pub constraint_r2: f64,
    /// Frobenius norm of the assembled `J`.
    pub j_norm: f64,
    pub status: SweepStatus,
}

impl SweepRow {
    fn failed(omega: f64, xi: Complex64, msg: String) -> Self {
        Self {
            omega,
            xi,
            sigma_min: f64::NAN,
            sigma_max: f64::NAN,
            cond: f64::NAN,
            constraint_r1: f64::NAN,
            constraint_r2: f64::NAN,
            j_norm: f64::NAN,
            status: SweepStatus::Failed(msg),
        }
    }
}

fn sweep_point(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    wave: &PlaneWave,
    rule: SingularQuadrature,
    xi: Complex64,
) -> Result<SweepRow> {
    let m = assemble_m_with(grid, medium, rule)?;
    let j = assemble_j_with(grid, medium, rule)?;
    let j_norm = j.frobenius_norm();
    let system = build_system(m, &j, xi)?;
    drop(j);
    let base = SweepRow {
        omega: medium.omega,
        xi,
        sigma_min: f64::NAN,
        sigma_max: f64::NAN,
        cond: f64::NAN,
        constraint_r1: f64::NAN,
        constraint_r2: f64::NAN,
        j_norm,
        status: SweepStatus::Ok,
    };
    match system.factor() {
        Ok(f) => {
            let report = f.solve(&incident_field(grid, medium, wave)?)?;
            Ok(SweepRow {
                sigma_min: f.sigma_min,
                sigma_max: f.sigma_max,
                cond: report.condition_estimate,
                constraint_r1: report.constraint_norms.0,
                constraint_r2: report.constraint_norms.1,
                ..base
            })
        }
        Err(SieError::NearSingular { sigma_min, ratio }) => Ok(SweepRow {
            sigma_min,
            sigma_max: sigma_min / ratio,
            cond: 1.0 / ratio,
            status: SweepStatus::NearSingular,
            ..base
        }),
        Err(e) => Err(e),
    }
}

/// Assemble, factor and solve at every frequency; failures are recorded in
/// the row status and do not stop the sweep.
pub fn frequency_sweep(
    grid: &SurfaceGrid,
    medium_template: &MediumParams,
    omegas: &[f64],
    xi_rule: &XiRule,
    wave: &PlaneWave,
) -> Result<Vec<SweepRow>> {
    if omegas.is_empty() {
        return Err(SieError::Input("empty frequency list".into()));
    }
    if let Some(w) = omegas.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(SieError::Input(format!("frequencies must be positive, got {w}")));
    }
    wave.validate()?;
    let rule = SingularQuadrature::for_grid(grid);
    Ok(omegas
        .par_iter()
        .enumerate()
        .map(|(i, &omega)| {
            let xi = match xi_rule.at(i) {
                Ok(x) => x,
                Err(e) => return SweepRow::failed(omega, Complex64::new(f64::NAN, f64::NAN), e.to_string()),
            };
            let medium = medium_template.with_omega(omega);
            sweep_point(grid, &medium, wave, rule, xi).unwrap_or_else(|e| SweepRow::failed(omega, xi, e.to_string()))
        })
        .collect())
}
