//! Block operators `M` and `J`, constraint residuals and reduced systems.

use super::maxwell::{
    Coefficients, ConstraintKernel, JKernel, MKernel, Reduced, ReducedKernel, NORMAL_ROWS,
    N_CHANNELS, SYSTEM_ROWS,
};
use super::nystrom::{Kernel, Nystrom, SingularQuadrature};
use super::trace::{Block, BlockMap, TraceField};
use crate::error::{Result, SieError};
use crate::geom::SurfaceGrid;
use crate::medium::MediumParams;
use faer::{Mat, MatRef};
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Grid, medium and quadrature an operator was assembled from.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub grid: Arc<SurfaceGrid>,
    pub medium: MediumParams,
    pub rule: SingularQuadrature,
}

impl Provenance {
    /// Same grid, medium and quadrature rule.
    pub fn same_as(&self, other: &Provenance) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.shape_tag == other.grid.shape_tag
                && self.grid.param_orders == other.grid.param_orders))
            && self.medium == other.medium
            && self.rule == other.rule
    }
}

/// Dense discretization of a block operator on the `6N` unknowns.
///
/// Only the listed row blocks are stored; the others are structurally zero.
#[derive(Debug, Clone)]
pub struct DenseBlockOperator {
    /// Rows of the stored blocks (in `row_blocks` order) × `6N` columns.
    pub matrix: Mat<Complex64>,
    pub block_map: BlockMap,
    pub row_blocks: Vec<Block>,
    pub provenance: Provenance,
}

impl DenseBlockOperator {
    pub fn n_dof(&self) -> usize {
        self.block_map.n_dof()
    }

    /// Local row of a global row index, `None` for a structural zero.
    pub fn local_row(&self, global: usize) -> Option<usize> {
        let b = self.block_map.block_of(global);
        let mut off = 0;
        for rb in &self.row_blocks {
            if *rb == b {
                return Some(off + global - self.block_map.offset(b));
            }
            off += self.block_map.len(*rb);
        }
        None
    }

    /// Full `6N × 6N` matrix with the structural zeros filled in.
    pub fn to_dense(&self) -> Mat<Complex64> {
        let n = self.n_dof();
        let mut out = Mat::<Complex64>::zeros(n, n);
        for g in 0..n {
            if let Some(l) = self.local_row(g) {
                out.row_mut(g).copy_from(self.matrix.row(l));
            }
        }
        out
    }

    /// Rows of a given block, `None` when structurally zero.
    pub fn block_rows(&self, b: Block) -> Option<MatRef<'_, Complex64>> {
        let mut off = 0;
        for rb in &self.row_blocks {
            if *rb == b {
                return Some(self.matrix.as_ref().subrows(off, self.block_map.len(b)));
            }
            off += self.block_map.len(*rb);
        }
        None
    }

    /// Matrix–vector product on the full unknown vector.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_dof();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for g in 0..n {
            if let Some(l) = self.local_row(g) {
                let row = self.matrix.row(l);
                let mut s = Complex64::new(0.0, 0.0);
                for (j, xj) in x.iter().enumerate() {
                    s += row[j] * xj;
                }
                y[g] = s;
            }
        }
        y
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    /// Write the full matrix as little-endian binary: `u64` dimension, then
    /// row-major `(re, im)` `f64` pairs.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let n = self.n_dof();
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&(n as u64).to_le_bytes())?;
        let zero_row = vec![0u8; 16 * n];
        for g in 0..n {
            match self.local_row(g) {
                Some(l) => {
                    for j in 0..n {
                        let v = self.matrix[(l, j)];
                        f.write_all(&v.re.to_le_bytes())?;
                        f.write_all(&v.im.to_le_bytes())?;
                    }
                }
                None => f.write_all(&zero_row)?,
            }
        }
        f.flush()?;
        Ok(())
    }
}

/// Read a matrix written by [`DenseBlockOperator::write_binary`].
pub fn read_binary(path: &Path) -> Result<Mat<Complex64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(SieError::Input("matrix file too short".into()));
    }
    let n = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
    if bytes.len() != 8 + 16 * n * n {
        return Err(SieError::Input("matrix file size does not match header".into()));
    }
    let val = |k: usize| f64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    Ok(Mat::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        Complex64::new(val(k), val(k + 1))
    }))
}

/// Assemble an eight-channel kernel into rows `rows` of the unknown layout.
fn assemble_rows<K: Kernel>(
    engine: &Nystrom<'_>,
    kernel: &K,
    rows: &[(Block, usize)],
    row_blocks: &[Block],
) -> Mat<Complex64> {
    let grid = engine.grid();
    let n = grid.len();
    let map = BlockMap::new(n);
    let total: usize = row_blocks.iter().map(|b| map.len(*b)).sum();
    let mut local_offset = std::collections::HashMap::new();
    let mut off = 0;
    for b in row_blocks {
        local_offset.insert(*b, off);
        off += map.len(*b);
    }
    let mut out = Mat::<Complex64>::zeros(total, map.n_dof());
    let get = |v: MatRef<'_, f64>, r: usize, c: usize, j: usize| {
        let k = 2 * (r * N_CHANNELS + c);
        Complex64::new(v[(k, j)], v[(k + 1, j)])
    };
    engine.assemble(kernel, |i, v| {
        for (r, (blk, comp)) in rows.iter().enumerate() {
            let row = local_offset[blk] + i * blk.components() + comp;
            for j in 0..n {
                let [t1, t2] = &grid.tangents[j];
                for (chan, bt, bn) in [(0, Block::ETangential, Block::ENormal), (4, Block::HTangential, Block::HNormal)] {
                    let vx = get(v, r, chan, j);
                    let vy = get(v, r, chan + 1, j);
                    let vz = get(v, r, chan + 2, j);
                    out[(row, map.index(bt, j, 0))] = vx * t1[0] + vy * t1[1] + vz * t1[2];
                    out[(row, map.index(bt, j, 1))] = vx * t2[0] + vy * t2[1] + vz * t2[2];
                    out[(row, map.index(bn, j, 0))] = get(v, r, chan + 3, j);
                }
            }
        }
    });
    out
}

/// Matrix-free application of an eight-channel kernel, scattered into a
/// `6N` vector (accumulating).
fn apply_rows<K: Kernel>(
    engine: &Nystrom<'_>,
    kernel: &K,
    rows: &[(Block, usize)],
    channels: &[Complex64],
    scale: Complex64,
    y: &mut [Complex64],
) {
    let n = engine.grid().len();
    let map = BlockMap::new(n);
    let vals = engine.apply(kernel, channels);
    let nr = rows.len();
    for i in 0..n {
        for (r, (blk, comp)) in rows.iter().enumerate() {
            y[map.index(*blk, i, *comp)] += scale * vals[i * nr + r];
        }
    }
}

fn provenance(grid: &SurfaceGrid, medium: &MediumParams, rule: SingularQuadrature) -> Provenance {
    Provenance { grid: Arc::new(grid.clone()), medium: *medium, rule }
}

/// Dense `M` for the given grid and medium.
pub fn assemble_m(grid: &SurfaceGrid, medium: &MediumParams) -> Result<DenseBlockOperator> {
    assemble_m_with(grid, medium, SingularQuadrature::for_grid(grid))
}

pub fn assemble_m_with(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    rule: SingularQuadrature,
) -> Result<DenseBlockOperator> {
    medium.validate()?;
    let engine = Nystrom::new(grid, rule);
    let kernel = MKernel { c: Coefficients::new(medium, grid.diameter()) };
    let row_blocks = Block::ALL.to_vec();
    let matrix = assemble_rows(&engine, &kernel, &SYSTEM_ROWS, &row_blocks);
    Ok(DenseBlockOperator {
        matrix,
        block_map: BlockMap::new(grid.len()),
        row_blocks,
        provenance: provenance(grid, medium, rule),
    })
}

/// Dense stabilizer `J`; only the normal row blocks are stored.
pub fn assemble_j(grid: &SurfaceGrid, medium: &MediumParams) -> Result<DenseBlockOperator> {
    assemble_j_with(grid, medium, SingularQuadrature::for_grid(grid))
}

pub fn assemble_j_with(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    rule: SingularQuadrature,
) -> Result<DenseBlockOperator> {
    medium.validate()?;
    let engine = Nystrom::new(grid, rule);
    let kernel = JKernel { c: Coefficients::new(medium, grid.diameter()) };
    let row_blocks = vec![Block::ENormal, Block::HNormal];
    let matrix = assemble_rows(&engine, &kernel, &NORMAL_ROWS, &row_blocks);
    Ok(DenseBlockOperator {
        matrix,
        block_map: BlockMap::new(grid.len()),
        row_blocks,
        provenance: provenance(grid, medium, rule),
    })
}

/// `(I + M + ξJ) x` computed without any assembled matrix.
pub fn apply_system(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    rule: SingularQuadrature,
    xi: Complex64,
    x: &[Complex64],
) -> Result<Vec<Complex64>> {
    medium.validate()?;
    let t = TraceField::from_dofs(grid, x)?;
    let ch = t.channels(grid)?;
    let engine = Nystrom::new(grid, rule);
    let c = Coefficients::new(medium, grid.diameter());
    let mut y = x.to_vec();
    apply_rows(&engine, &MKernel { c }, &SYSTEM_ROWS, &ch, Complex64::new(1.0, 0.0), &mut y);
    if xi != Complex64::new(0.0, 0.0) {
        apply_rows(&engine, &JKernel { c }, &NORMAL_ROWS, &ch, xi, &mut y);
    }
    Ok(y)
}

/// Constraint functionals `(r1, r2)` evaluated at every node.
pub fn constraint_residuals(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    trace: &TraceField,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    constraint_residuals_with(grid, medium, trace, SingularQuadrature::for_grid(grid))
}

pub fn constraint_residuals_with(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    trace: &TraceField,
    rule: SingularQuadrature,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    medium.validate()?;
    let ch = trace.channels(grid)?;
    let engine = Nystrom::new(grid, rule);
    let kernel = ConstraintKernel { c: Coefficients::new(medium, grid.diameter()) };
    let v = engine.apply(&kernel, &ch);
    let r1 = v.iter().step_by(2).copied().collect();
    let r2 = v.iter().skip(1).step_by(2).copied().collect();
    Ok((r1, r2))
}

/// `I + K₁ + ξω²ε⁺S` (electric) or `I + K₂ + ξω²μ⁺S` (magnetic).
pub fn assemble_reduced_normal(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    which: Reduced,
    xi: Complex64,
) -> Result<Mat<Complex64>> {
    assemble_reduced_normal_with(grid, medium, which, xi, SingularQuadrature::for_grid(grid))
}

pub fn assemble_reduced_normal_with(
    grid: &SurfaceGrid,
    medium: &MediumParams,
    which: Reduced,
    xi: Complex64,
    rule: SingularQuadrature,
) -> Result<Mat<Complex64>> {
    medium.validate()?;
    let engine = Nystrom::new(grid, rule);
    let kernel = ReducedKernel { c: Coefficients::new(medium, grid.diameter()), which, xi };
    let n = grid.len();
    let mut a = Mat::<Complex64>::identity(n, n);
    engine.assemble(&kernel, |i, v| {
        for j in 0..n {
            a[(i, j)] += Complex64::new(v[(0, j)], v[(1, j)]);
        }
    });
    Ok(a)
}
