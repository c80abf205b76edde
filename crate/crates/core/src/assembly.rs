//! Compressed-row sparse matrices and deterministic assembly of local
//! contributions.

use std::io::Write;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::dualgeom::DualGeometry;
use crate::hodge::{
    local_inverse_mass_etilde, local_inverse_mass_ftilde, local_mass_e, local_mass_f, piecewise_local_inverse,
    weighted_average_material, DualCellStrategy, HodgeError, LocalMatrix, MaterialMode, MaterialTensor, Stabilization,
};
use crate::mesh::TetMesh;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("entry ({row}, {col}) is outside a {nrows}x{ncols} matrix")]
    OutOfBounds { row: usize, col: usize, nrows: usize, ncols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Compressed-row storage. Column indices are strictly increasing within a
/// row and no explicit zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { nrows: n, ncols: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: vec![1.0; n] }
    }

    /// Builds a matrix from coordinate triplets, summing duplicates.
    ///
    /// Duplicates of one entry are summed in ascending value order, so the
    /// result does not depend on the order of `triplets`.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self, AssemblyError> {
        if let Some(&(row, col, _)) = triplets.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(AssemblyError::OutOfBounds { row, col, nrows, ncols });
        }
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut i = 0;
        while i < triplets.len() {
            let (r, c, _) = triplets[i];
            let mut sum = 0.0;
            while i < triplets.len() && triplets[i].0 == r && triplets[i].1 == c {
                sum += triplets[i].2;
                i += 1;
            }
            if sum != 0.0 {
                col_idx.push(c);
                values.push(sum);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, AssemblyError> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<(), AssemblyError> {
        if x.len() != self.ncols || y.len() != self.nrows {
            return Err(AssemblyError::Dimension(format!(
                "{}x{} matrix applied to a vector of length {} into {}",
                self.nrows,
                self.ncols,
                x.len(),
                y.len()
            )));
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, row_ptr, col_idx, values }
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix, AssemblyError> {
        if self.ncols != other.nrows {
            return Err(AssemblyError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            touched.clear();
            let (acols, avals) = self.row(i);
            for (&k, &a) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&j, &b) in bcols.iter().zip(bvals) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if acc[j] != 0.0 {
                    col_idx.push(j);
                    values.push(acc[j]);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(SparseMatrix { nrows: self.nrows, ncols: other.ncols, row_ptr, col_idx, values })
    }

    /// Keeps the entries for which `keep(row, col)` is true.
    pub fn filter(&self, mut keep: impl FnMut(usize, usize) -> bool) -> SparseMatrix {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if keep(i, j) {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols && self.triplets().all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol)
    }

    /// Writes the matrix as 1-based `i j value` lines, preceded by a
    /// `nrows ncols nnz` header line.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<(), AssemblyError> {
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

/// Sums local matrices into an `n`x`n` sparse matrix through their entity maps.
pub fn assemble(n: usize, contributions: &[LocalMatrix]) -> Result<SparseMatrix, AssemblyError> {
    let cap = contributions.iter().map(|c| c.order() * c.order()).sum();
    let mut triplets = Vec::with_capacity(cap);
    for local in contributions {
        for (a, &i) in local.entities.iter().enumerate() {
            for (b, &j) in local.entities.iter().enumerate() {
                triplets.push((i, j, local.matrix[(a, b)]));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// `a * m * b`.
pub fn triple_product(a: &SparseMatrix, m: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix, AssemblyError> {
    a.matmul(&m.matmul(b)?)
}

pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Result<Vec<f64>, AssemblyError> {
    a.matvec(x)
}

/// Inverse mass matrices of every dual cell, built according to the
/// material strategy selected per dual cell.
///
/// `sigma[c]` is the edge-to-dual-face parameter of cell `c`.
#[derive(Debug, Clone)]
pub struct DualCellLocals {
    /// `M^F̃` per dual cell, over `E(n)`.
    pub mft: Vec<LocalMatrix>,
    /// `M^Ẽ` per dual cell, over `F(n)`.
    pub met: Vec<LocalMatrix>,
    pub strategies: Vec<DualCellStrategy>,
}

impl DualCellLocals {
    pub fn new(
        mesh: &TetMesh,
        dual: &DualGeometry,
        sigma: &[MaterialTensor],
        mode: MaterialMode,
        stab: &Stabilization,
    ) -> Result<Self, AssemblyError> {
        if sigma.len() != mesh.num_cells() {
            return Err(AssemblyError::Dimension(format!("{} materials for {} cells", sigma.len(), mesh.num_cells())));
        }
        let rho: Vec<MaterialTensor> = sigma.iter().map(MaterialTensor::inverse).collect();
        let strategies = mode.strategies(mesh, sigma);
        let mut mft = Vec::with_capacity(mesh.num_nodes());
        let mut met = Vec::with_capacity(mesh.num_nodes());
        for (dc, strategy) in dual.dual_cells.iter().zip(&strategies) {
            let (a, b) = match strategy {
                DualCellStrategy::Explicit => {
                    let k = sigma[mesh.node_cells(dc.node)[0]];
                    (local_inverse_mass_ftilde(dc, &k.inverse(), stab)?, local_inverse_mass_etilde(dc, &k, stab)?)
                }
                DualCellStrategy::Weighted => (
                    local_inverse_mass_ftilde(dc, &weighted_average_material(dc, sigma)?, stab)?,
                    local_inverse_mass_etilde(dc, &weighted_average_material(dc, &rho)?, stab)?,
                ),
                DualCellStrategy::Piecewise => piecewise_local_inverse(dc, sigma)?,
            };
            mft.push(a);
            met.push(b);
        }
        Ok(Self { mft, met, strategies })
    }
}

/// The four assembled global operators.
#[derive(Debug, Clone)]
pub struct GlobalOperators {
    /// Edges to dual faces, material `sigma`.
    pub me: SparseMatrix,
    /// Faces to dual edges, material `sigma⁻¹`.
    pub mf: SparseMatrix,
    /// Dual edges to faces.
    pub met: SparseMatrix,
    /// Dual faces to edges.
    pub mft: SparseMatrix,
    pub strategies: Vec<DualCellStrategy>,
}

impl GlobalOperators {
    pub fn new(
        mesh: &TetMesh,
        dual: &DualGeometry,
        sigma: &[MaterialTensor],
        mode: MaterialMode,
        stab: &Stabilization,
    ) -> Result<Self, AssemblyError> {
        let locals = DualCellLocals::new(mesh, dual, sigma, mode, stab)?;
        Ok(Self {
            me: assemble_mass_e(mesh, dual, sigma, stab)?,
            mf: assemble_mass_f(mesh, dual, sigma, stab)?,
            met: assemble(mesh.num_faces(), &locals.met)?,
            mft: assemble(mesh.num_edges(), &locals.mft)?,
            strategies: locals.strategies,
        })
    }
}

pub fn assemble_mass_e(
    mesh: &TetMesh,
    dual: &DualGeometry,
    sigma: &[MaterialTensor],
    stab: &Stabilization,
) -> Result<SparseMatrix, AssemblyError> {
    let locals = dual
        .cells
        .iter()
        .map(|cd| local_mass_e(cd, &sigma[cd.cell], stab))
        .collect::<Result<Vec<_>, _>>()?;
    assemble(mesh.num_edges(), &locals)
}

pub fn assemble_mass_f(
    mesh: &TetMesh,
    dual: &DualGeometry,
    sigma: &[MaterialTensor],
    stab: &Stabilization,
) -> Result<SparseMatrix, AssemblyError> {
    let locals = dual
        .cells
        .iter()
        .map(|cd| local_mass_f(cd, &sigma[cd.cell].inverse(), stab))
        .collect::<Result<Vec<_>, _>>()?;
    assemble(mesh.num_faces(), &locals)
}
