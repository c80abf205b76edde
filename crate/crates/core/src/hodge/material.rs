use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3};

use super::{HodgeError, LocalMatrix};
use crate::dualgeom::DualCellGeometry;
use crate::linalg::{spd_inverse, symmetric_inverse3};
use crate::mesh::{Point3, TetMesh};

/// Symmetric positive definite 3x3 material tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialTensor(Matrix3<f64>);

impl MaterialTensor {
    pub fn new(k: Matrix3<f64>) -> Result<Self, HodgeError> {
        if k != k.transpose() || !k.iter().all(|v| v.is_finite()) || k.cholesky().is_none() {
            return Err(HodgeError::NotSpdMaterial);
        }
        Ok(Self(k))
    }

    /// `s I`; panics unless `s > 0`.
    pub fn scalar(s: f64) -> Self {
        assert!(s > 0.0 && s.is_finite(), "scalar material must be positive, got {s}");
        Self(Matrix3::identity() * s)
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(symmetric_inverse3(&self.0).expect("SPD tensors are invertible"))
    }
}

/// `K̃ = ((1/|c̃|) Σ_c |c̃∩c| K_c)⁻¹` over the cells of a dual cell.
pub fn weighted_average_material(dual: &DualCellGeometry, per_cell: &[MaterialTensor]) -> Result<MaterialTensor, HodgeError> {
    let mean: Matrix3<f64> =
        dual.pieces.iter().map(|p| per_cell[p.cell].matrix() * p.volume).sum::<Matrix3<f64>>() / dual.volume;
    let mut sym = mean;
    for i in 0..3 {
        for j in 0..i {
            sym[(i, j)] = sym[(j, i)];
        }
    }
    let inv = symmetric_inverse3(&sym).ok_or(HodgeError::NotSpdMaterial)?;
    MaterialTensor::new(inv)
}

/// Piecewise-constant inverse mass matrices of one dual cell.
///
/// `sigma[c]` is the edge-to-dual-face parameter of cell `c`; the
/// face-to-dual-edge side uses its inverse. Returns `(M^F̃, M^Ẽ)`, each the
/// inverse of the sum of the per-cell rank-3 consistent terms.
pub fn piecewise_local_inverse(
    dual: &DualCellGeometry,
    sigma: &[MaterialTensor],
) -> Result<(LocalMatrix, LocalMatrix), HodgeError> {
    let ne = dual.edges.len();
    let nf = dual.faces.len();
    let mut me = DMatrix::zeros(ne, ne);
    let mut mf = DMatrix::zeros(nf, nf);
    for p in &dual.pieces {
        let k = sigma[p.cell];
        add_piece(&mut me, &p.edge_slots, &p.face_rows, k.matrix(), p.volume);
        add_piece(&mut mf, &p.face_slots, &p.edge_rows, k.inverse().matrix(), p.volume);
    }
    let what = || format!("dual cell {}", dual.node);
    let mft = spd_inverse(&me).ok_or_else(|| HodgeError::NotPositiveDefinite(what()))?;
    let met = spd_inverse(&mf).ok_or_else(|| HodgeError::NotPositiveDefinite(what()))?;
    Ok((LocalMatrix { entities: dual.edges.clone(), matrix: mft }, LocalMatrix { entities: dual.faces.clone(), matrix: met }))
}

fn add_piece(target: &mut DMatrix<f64>, slots: &[usize; 3], rows: &[Point3; 3], k: &Matrix3<f64>, volume: f64) {
    for a in 0..3 {
        let kr = k * rows[a];
        for b in 0..3 {
            let (i, j) = (slots[b], slots[a]);
            if i <= j {
                target[(i, j)] += rows[b].dot(&kr) / volume;
            }
        }
    }
    for i in 0..target.nrows() {
        for j in 0..i {
            target[(i, j)] = target[(j, i)];
        }
    }
}

/// How the inverse mass matrices of one dual cell are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualCellStrategy {
    /// Homogeneous dual cell: explicit construction with `K̃ = K⁻¹`.
    Explicit,
    /// Explicit construction with the weighted-average `K̃`.
    Weighted,
    /// Inverse of the assembled piecewise consistent terms.
    Piecewise,
}

/// Material handling across all dual cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaterialMode {
    /// Weighted-average tensor everywhere.
    Weighted,
    /// Piecewise construction everywhere.
    Piecewise,
    /// Explicit construction on homogeneous dual cells, piecewise at interfaces.
    #[default]
    Hybrid,
}

impl MaterialMode {
    pub fn strategies(self, mesh: &TetMesh, per_cell: &[MaterialTensor]) -> Vec<DualCellStrategy> {
        match self {
            MaterialMode::Weighted => vec![DualCellStrategy::Weighted; mesh.num_nodes()],
            MaterialMode::Piecewise => vec![DualCellStrategy::Piecewise; mesh.num_nodes()],
            MaterialMode::Hybrid => hybrid_material_strategy(mesh, per_cell, DualCellStrategy::Piecewise),
        }
    }
}

impl FromStr for MaterialMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" => Ok(MaterialMode::Weighted),
            "piecewise" => Ok(MaterialMode::Piecewise),
            "hybrid" => Ok(MaterialMode::Hybrid),
            _ => Err(format!("unknown material mode '{s}' (expected weighted, piecewise or hybrid)")),
        }
    }
}

impl fmt::Display for MaterialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaterialMode::Weighted => "weighted",
            MaterialMode::Piecewise => "piecewise",
            MaterialMode::Hybrid => "hybrid",
        })
    }
}

/// Explicit construction where all cells around a node share one tensor,
/// `fallback` elsewhere.
pub fn hybrid_material_strategy(
    mesh: &TetMesh,
    per_cell: &[MaterialTensor],
    fallback: DualCellStrategy,
) -> Vec<DualCellStrategy> {
    (0..mesh.num_nodes())
        .map(|n| {
            let cells = mesh.node_cells(n);
            if cells.iter().all(|&c| per_cell[c] == per_cell[cells[0]]) {
                DualCellStrategy::Explicit
            } else {
                fallback
            }
        })
        .collect()
}
