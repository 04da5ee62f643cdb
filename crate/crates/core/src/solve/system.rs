//! The dense stabilized system `I + M + ξJ`, its factorization and diagnostics.

use super::incident::IncidentField;
use crate::error::{Result, SieError};
use crate::linalg::{sigma_max_estimate, sigma_min_estimate, singular_value_extremes, Lu};
use crate::ops::{apply_system, constraint_residuals_with, Block, BlockMap, DenseBlockOperator, Provenance, TraceField};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Ratio `σ_min/σ_max` below which a system is reported as near-singular.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-10;

/// Largest system for which diagnostics use a full SVD.
pub const DENSE_SVD_LIMIT: usize = 2000;

/// Dense `I + M + ξJ` on the `6N` unknowns.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub matrix: Mat<Complex64>,
    pub xi: Complex64,
    pub block_map: BlockMap,
    pub provenance: Provenance,
}

/// Take ownership of `M`, add the identity and `ξJ` in place.
pub fn build_system(m: DenseBlockOperator, j: &DenseBlockOperator, xi: Complex64) -> Result<BlockSystem> {
    if m.block_map != j.block_map || m.matrix.ncols() != j.matrix.ncols() {
        return Err(SieError::Assembly(format!(
            "M has {} unknowns, J has {}",
            m.n_dof(),
            j.n_dof()
        )));
    }
    if !m.provenance.same_as(&j.provenance) {
        return Err(SieError::Assembly("M and J come from different grids, media or rules".into()));
    }
    let map = m.block_map;
    let n = map.n_dof();
    let mut a = if m.row_blocks == Block::ALL && m.matrix.nrows() == n { m.matrix } else { m.to_dense() };
    for i in 0..n {
        a[(i, i)] += Complex64::new(1.0, 0.0);
    }
    if xi != Complex64::new(0.0, 0.0) {
        for b in &j.row_blocks {
            let rows = j.block_rows(*b).expect("stored block");
            let off = map.offset(*b);
            for r in 0..rows.nrows() {
                for c in 0..n {
                    a[(off + r, c)] += xi * rows[(r, c)];
                }
            }
        }
    }
    Ok(BlockSystem { matrix: a, xi, block_map: map, provenance: m.provenance })
}

/// Extreme singular values and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub condition: f64,
    /// `true` when a full SVD was used, `false` for iterative estimates.
    pub exact: bool,
}

impl ConditionReport {
    fn new(sigma_min: f64, sigma_max: f64, exact: bool) -> Self {
        let condition = if sigma_min > 0.0 { sigma_max / sigma_min } else { f64::INFINITY };
        Self { sigma_min, sigma_max, condition, exact }
    }
}

/// Singular value extremes of the assembled system; full SVD up to
/// [`DENSE_SVD_LIMIT`] unknowns, power and inverse iteration above.
pub fn condition_diagnostics(system: &BlockSystem) -> ConditionReport {
    let a = system.matrix.as_ref();
    if a.nrows() <= DENSE_SVD_LIMIT {
        if let Some((lo, hi)) = singular_value_extremes(a) {
            return ConditionReport::new(lo, hi, true);
        }
    }
    let hi = sigma_max_estimate(a);
    let lo = sigma_min_estimate(&Lu::factor(system.matrix.clone()));
    ConditionReport::new(lo, hi, false)
}

/// Outcome of a solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub trace: TraceField,
    /// `‖(I+M+ξJ)x − b‖/‖b‖` recomputed without the factorization.
    pub residual_norm: f64,
    /// Weighted norms of the two constraint functionals relative to the trace norm.
    pub constraint_norms: (f64, f64),
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
    pub condition_estimate: f64,
    pub xi_used: Complex64,
}

/// LU factors of a system together with its singular value estimates.
pub struct FactoredSystem {
    lu: Lu,
    pub xi: Complex64,
    pub provenance: Provenance,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl BlockSystem {
    pub fn n_dof(&self) -> usize {
        self.block_map.n_dof()
    }

    /// Factor in place; fails with [`SieError::NearSingular`] when
    /// `σ_min/σ_max < NEAR_SINGULAR_RATIO`.
    pub fn factor(self) -> Result<FactoredSystem> {
        let sigma_max = sigma_max_estimate(self.matrix.as_ref());
        let lu = Lu::factor(self.matrix);
        let sigma_min = sigma_min_estimate(&lu);
        let ratio = if sigma_max > 0.0 { sigma_min / sigma_max } else { 0.0 };
        if !(ratio >= NEAR_SINGULAR_RATIO) {
            return Err(SieError::NearSingular { sigma_min, ratio });
        }
        Ok(FactoredSystem { lu, xi: self.xi, provenance: self.provenance, sigma_min, sigma_max })
    }
}

impl FactoredSystem {
    pub fn solve_dofs(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.lu.dim() {
            return Err(SieError::Input(format!("right-hand side has {} entries, system has {}", b.len(), self.lu.dim())));
        }
        Ok(self.lu.solve_vec(b))
    }

    pub fn solve(&self, rhs: &IncidentField) -> Result<SolveReport> {
        let p = &self.provenance;
        let grid = &*p.grid;
        let b = rhs.rhs(grid)?;
        let x = self.solve_dofs(&b)?;
        let ax = apply_system(grid, &p.medium, p.rule, self.xi, &x)?;
        let num: f64 = ax.iter().zip(&b).map(|(u, v)| (u - v).norm_sqr()).sum();
        let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        let residual_norm = (num / den).sqrt();
        let trace = TraceField::from_dofs(grid, &x)?;
        let (r1, r2) = constraint_residuals_with(grid, &p.medium, &trace, p.rule)?;
        let scale = trace.norm(grid);
        let wnorm = |r: &[Complex64]| r.iter().zip(&grid.weights).map(|(v, w)| w * v.norm_sqr()).sum::<f64>().sqrt();
        Ok(SolveReport {
            constraint_norms: (wnorm(&r1) / scale, wnorm(&r2) / scale),
            trace,
            residual_norm,
            smallest_singular_value: self.sigma_min,
            largest_singular_value: self.sigma_max,
            condition_estimate: self.sigma_max / self.sigma_min,
            xi_used: self.xi,
        })
    }
}

/// Factor and solve for one right-hand side.
pub fn solve(system: BlockSystem, rhs: &IncidentField) -> Result<SolveReport> {
    system.factor()?.solve(rhs)
}
