//! Dense discrete boundary operators.

mod block;
mod layer;
mod maxwell;
pub(crate) mod nystrom;
mod trace;

pub use block::{
    apply_system, assemble_j, assemble_j_with, assemble_m, assemble_m_with,
    assemble_reduced_normal, assemble_reduced_normal_with, constraint_residuals,
    constraint_residuals_with, read_binary, DenseBlockOperator, Provenance,
};
pub use layer::{
    assemble_d, assemble_k, assemble_k_with, assemble_single_layer, assemble_single_layer_with,
};
pub use maxwell::Reduced;
pub use nystrom::SingularQuadrature;
pub use trace::{decompose, Block, BlockMap, TraceField};
