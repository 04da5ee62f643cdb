//! Right-hand sides, the stabilized dense solve, sweeps and field evaluation.

mod field;
mod incident;
mod sweep;
mod system;

pub use field::{evaluate_scattered_field, radiation_defect};
pub use incident::{incident_field, incident_plane_wave, IncidentField};
pub use sweep::{frequency_sweep, SweepRow, SweepStatus, XiRule};
pub use system::{
    build_system, condition_diagnostics, solve, BlockSystem, ConditionReport, FactoredSystem, SolveReport,
    DENSE_SVD_LIMIT, NEAR_SINGULAR_RATIO,
};
