//! Surface traces and the block layout of the discrete unknowns.

use crate::error::{Result, SieError};
use crate::geom::SurfaceGrid;
use crate::vec3::{cdot_r, ccross_r, cscale_r, rcross_c, CVec3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Exterior traces `(e, h)` sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceField {
    pub e: Vec<CVec3>,
    pub h: Vec<CVec3>,
}

/// The four groups of unknowns and equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    /// `e × n`, two tangent components per node.
    ETangential,
    /// `e · n`.
    ENormal,
    /// `h × n`, two tangent components per node.
    HTangential,
    /// `h · n`.
    HNormal,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::ETangential, Block::ENormal, Block::HTangential, Block::HNormal];

    pub fn components(self) -> usize {
        match self {
            Block::ETangential | Block::HTangential => 2,
            Block::ENormal | Block::HNormal => 1,
        }
    }
}

/// Offsets of the blocks `[e×n | e·n | h×n | h·n]` in a `6N` vector; inside a
/// block, components of one node are adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMap {
    pub n_nodes: usize,
}

impl BlockMap {
    pub fn new(n_nodes: usize) -> Self {
        Self { n_nodes }
    }

    pub fn n_dof(&self) -> usize {
        6 * self.n_nodes
    }

    pub fn offset(&self, b: Block) -> usize {
        let n = self.n_nodes;
        match b {
            Block::ETangential => 0,
            Block::ENormal => 2 * n,
            Block::HTangential => 3 * n,
            Block::HNormal => 5 * n,
        }
    }

    pub fn len(&self, b: Block) -> usize {
        b.components() * self.n_nodes
    }

    pub fn range(&self, b: Block) -> std::ops::Range<usize> {
        let o = self.offset(b);
        o..o + self.len(b)
    }

    /// Index of component `comp` at `node` within block `b`.
    pub fn index(&self, b: Block, node: usize, comp: usize) -> usize {
        self.offset(b) + node * b.components() + comp
    }

    /// Block owning a global index.
    pub fn block_of(&self, i: usize) -> Block {
        Block::ALL
            .into_iter()
            .find(|b| self.range(*b).contains(&i))
            .expect("index out of range")
    }
}

impl TraceField {
    pub fn zeros(n: usize) -> Self {
        let z = [Complex64::new(0.0, 0.0); 3];
        Self { e: vec![z; n], h: vec![z; n] }
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    fn check(&self, grid: &SurfaceGrid) -> Result<()> {
        if self.e.len() != grid.len() || self.h.len() != grid.len() {
            return Err(SieError::Input(format!(
                "trace has {}/{} samples, grid has {} nodes",
                self.e.len(),
                self.h.len(),
                grid.len()
            )));
        }
        Ok(())
    }

    pub fn e_cross_n(&self, grid: &SurfaceGrid) -> Vec<CVec3> {
        self.e.iter().zip(&grid.normals).map(|(v, n)| ccross_r(v, n)).collect()
    }

    pub fn h_cross_n(&self, grid: &SurfaceGrid) -> Vec<CVec3> {
        self.h.iter().zip(&grid.normals).map(|(v, n)| ccross_r(v, n)).collect()
    }

    pub fn e_dot_n(&self, grid: &SurfaceGrid) -> Vec<Complex64> {
        self.e.iter().zip(&grid.normals).map(|(v, n)| cdot_r(v, n)).collect()
    }

    pub fn h_dot_n(&self, grid: &SurfaceGrid) -> Vec<Complex64> {
        self.h.iter().zip(&grid.normals).map(|(v, n)| cdot_r(v, n)).collect()
    }

    /// Flatten to the `6N` unknown vector.
    pub fn to_dofs(&self, grid: &SurfaceGrid) -> Result<Vec<Complex64>> {
        self.check(grid)?;
        let map = BlockMap::new(grid.len());
        let mut x = vec![Complex64::new(0.0, 0.0); map.n_dof()];
        for j in 0..grid.len() {
            let n = &grid.normals[j];
            let [t1, t2] = &grid.tangents[j];
            for (field, bt, bn) in [
                (&self.e[j], Block::ETangential, Block::ENormal),
                (&self.h[j], Block::HTangential, Block::HNormal),
            ] {
                let c = ccross_r(field, n);
                x[map.index(bt, j, 0)] = cdot_r(&c, t1);
                x[map.index(bt, j, 1)] = cdot_r(&c, t2);
                x[map.index(bn, j, 0)] = cdot_r(field, n);
            }
        }
        Ok(x)
    }

    /// Rebuild traces from the `6N` unknown vector.
    pub fn from_dofs(grid: &SurfaceGrid, x: &[Complex64]) -> Result<Self> {
        let map = BlockMap::new(grid.len());
        if x.len() != map.n_dof() {
            return Err(SieError::Input(format!(
                "expected {} unknowns, got {}",
                map.n_dof(),
                x.len()
            )));
        }
        let mut t = Self::zeros(grid.len());
        for j in 0..grid.len() {
            let n = &grid.normals[j];
            let [t1, t2] = &grid.tangents[j];
            for (bt, bn, out) in [
                (Block::ETangential, Block::ENormal, &mut t.e[j]),
                (Block::HTangential, Block::HNormal, &mut t.h[j]),
            ] {
                let u1 = x[map.index(bt, j, 0)];
                let u2 = x[map.index(bt, j, 1)];
                // v × n = u1 t1 + u2 t2  ⇒  tangential v = n × (v × n) = u1 t2 − u2 t1
                let vn = x[map.index(bn, j, 0)];
                for c in 0..3 {
                    out[c] = u1 * t2[c] - u2 * t1[c] + vn * n[c];
                }
            }
        }
        Ok(t)
    }

    /// Channel fields `[e×n (3), e·n, h×n (3), h·n]` per node.
    pub(crate) fn channels(&self, grid: &SurfaceGrid) -> Result<Vec<Complex64>> {
        self.check(grid)?;
        let mut f = Vec::with_capacity(8 * grid.len());
        for j in 0..grid.len() {
            let n = &grid.normals[j];
            for v in [&self.e[j], &self.h[j]] {
                f.extend_from_slice(&ccross_r(v, n));
                f.push(cdot_r(v, n));
            }
        }
        Ok(f)
    }

    /// Relative weighted L² distance `‖self − other‖/‖other‖`.
    pub fn relative_error(&self, other: &TraceField, grid: &SurfaceGrid) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..grid.len() {
            let w = grid.weights[j];
            for c in 0..3 {
                num += w * ((self.e[j][c] - other.e[j][c]).norm_sqr() + (self.h[j][c] - other.h[j][c]).norm_sqr());
                den += w * (other.e[j][c].norm_sqr() + other.h[j][c].norm_sqr());
            }
        }
        (num / den).sqrt()
    }

    /// Weighted L² norm.
    pub fn norm(&self, grid: &SurfaceGrid) -> f64 {
        let mut s = 0.0;
        for j in 0..grid.len() {
            s += grid.weights[j] * (crate::vec3::cnorm_sqr(&self.e[j]) + crate::vec3::cnorm_sqr(&self.h[j]));
        }
        s.sqrt()
    }
}

/// `n × (v × n)` and `n (v · n)` for a single node.
pub fn decompose(v: &CVec3, n: &crate::vec3::Vec3) -> (CVec3, CVec3) {
    let tang = rcross_c(n, &ccross_r(v, n));
    let norm = cscale_r(cdot_r(v, n), n);
    (tang, norm)
}
