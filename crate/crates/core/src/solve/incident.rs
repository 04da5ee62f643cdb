//! Incident fields sampled on the surface and the right-hand side they induce.

use crate::error::Result;
use crate::geom::SurfaceGrid;
use crate::medium::MediumParams;
use crate::ops::{decompose, TraceField};
use crate::vec3::{CVec3, Vec3};
use crate::wave::PlaneWave;
use num_complex::Complex64;

/// Incident fields at the nodes and the weighted right-hand sides
/// `(eⁱ, hⁱ)` of the trace system.
#[derive(Debug, Clone)]
pub struct IncidentField {
    pub e_inc: Vec<CVec3>,
    pub h_inc: Vec<CVec3>,
    pub e_i: Vec<CVec3>,
    pub h_i: Vec<CVec3>,
}

/// `2a/(a+b) n×(v×n) + 2b/(a+b) n(v·n)`.
fn weighted_trace(v: &CVec3, n: &Vec3, plus: Complex64, minus: Complex64) -> CVec3 {
    let (tang, norm) = decompose(v, n);
    let s = plus + minus;
    std::array::from_fn(|i| 2.0 * plus / s * tang[i] + 2.0 * minus / s * norm[i])
}

impl IncidentField {
    /// Sample arbitrary incident fields and form the weighted traces.
    pub fn from_samples(grid: &SurfaceGrid, medium: &MediumParams, e_inc: Vec<CVec3>, h_inc: Vec<CVec3>) -> Self {
        let ep = Complex64::new(medium.eps_plus, 0.0);
        let mp = Complex64::new(medium.mu_plus, 0.0);
        let mm = Complex64::new(medium.mu_minus, 0.0);
        let e_i = e_inc.iter().zip(&grid.normals).map(|(v, n)| weighted_trace(v, n, ep, medium.eps_minus)).collect();
        let h_i = h_inc.iter().zip(&grid.normals).map(|(v, n)| weighted_trace(v, n, mp, mm)).collect();
        Self { e_inc, h_inc, e_i, h_i }
    }

    /// The incident fields themselves as a trace.
    pub fn incident_trace(&self) -> TraceField {
        TraceField { e: self.e_inc.clone(), h: self.h_inc.clone() }
    }

    /// Right-hand side in the unknown layout.
    pub fn rhs(&self, grid: &SurfaceGrid) -> Result<Vec<Complex64>> {
        TraceField { e: self.e_i.clone(), h: self.h_i.clone() }.to_dofs(grid)
    }

    pub fn len(&self) -> usize {
        self.e_inc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_inc.is_empty()
    }
}

/// Plane wave `p e^{ik₊ d·x}` sampled on the grid.
pub fn incident_plane_wave(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    direction: Vec3,
    polarization: Vec3,
) -> Result<IncidentField> {
    let wave = PlaneWave::new(direction, polarization)?;
    incident_field(grid, medium, &wave)
}

pub fn incident_field(grid: &SurfaceGrid, medium: &MediumParams, wave: &PlaneWave) -> Result<IncidentField> {
    medium.validate()?;
    wave.validate()?;
    let (e, h): (Vec<_>, Vec<_>) = grid.nodes.iter().map(|x| wave.fields(medium, x)).unzip();
    Ok(IncidentField::from_samples(grid, medium, e, h))
}
