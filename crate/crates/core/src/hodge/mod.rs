//! Local mass matrices on primal cells and local inverse mass matrices on
//! dual cells.
//!
//! Every constructor has the form
//!
//! ```text
//! M = (1/V) R K Rᵀ + W diag(α) Wᵀ
//! ```
//!
//! where `R` holds the geometric rows of the consistent term, `V` the
//! volume of the cell or dual cell, and the columns of `W` an orthonormal
//! basis of the complement of the range of the matrix the DoFs are
//! reconstructed from.

mod material;

pub use material::{
    hybrid_material_strategy, piecewise_local_inverse, weighted_average_material, DualCellStrategy, MaterialMode,
    MaterialTensor,
};

use nalgebra::{DMatrix, Matrix3};
use thiserror::Error;

use crate::dualgeom::{CellDualVectors, DualCellGeometry};
use crate::linalg::{complement_basis, is_spd, mirror_upper, rows_to_matrix};
use crate::mesh::Point3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HodgeError {
    #[error("material tensor is not symmetric positive definite")]
    NotSpdMaterial,
    #[error("geometric matrix of {0} has rank below 3")]
    RankDeficient(String),
    #[error("local matrix of {0} is not positive definite")]
    NotPositiveDefinite(String),
    #[error("stabilization needs {expected} positive weights, got {got:?}")]
    InvalidStabilization { expected: usize, got: Vec<f64> },
}

/// Rule for the stabilization weights `α_1..α_{m-3}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Stabilization {
    /// `α_i = s · trace(consistent term) / m`.
    TraceScaled(f64),
    /// The same `α` for every weight.
    Fixed(f64),
    /// Explicit weights, one per complement direction.
    Weights(Vec<f64>),
}

impl Default for Stabilization {
    fn default() -> Self {
        Stabilization::TraceScaled(1.0)
    }
}

impl Stabilization {
    fn weights(&self, consistent: &DMatrix<f64>) -> Result<Vec<f64>, HodgeError> {
        let m = consistent.nrows();
        let n = m.saturating_sub(3);
        let w = match self {
            Stabilization::TraceScaled(s) => vec![s * consistent.trace() / m as f64; n],
            Stabilization::Fixed(a) => vec![*a; n],
            Stabilization::Weights(w) => w.clone(),
        };
        if w.len() != n || w.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(HodgeError::InvalidStabilization { expected: n, got: w });
        }
        Ok(w)
    }
}

/// A dense symmetric local matrix together with the global entities its
/// rows and columns refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMatrix {
    pub entities: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

impl LocalMatrix {
    pub fn order(&self) -> usize {
        self.entities.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.matrix == self.matrix.transpose()
    }

    pub fn is_positive_definite(&self) -> bool {
        is_spd(&self.matrix)
    }
}

/// `(1/V) R K Rᵀ`, upper triangle mirrored.
pub fn consistent_term(rows: &[Point3], k: &Matrix3<f64>, volume: f64) -> DMatrix<f64> {
    let m = rows.len();
    let kr: Vec<Point3> = rows.iter().map(|r| k * r).collect();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            out[(i, j)] = rows[i].dot(&kr[j]) / volume;
        }
    }
    mirror_upper(&mut out);
    out
}

/// `W diag(α) Wᵀ` with `W` spanning the complement of `kernel_rows`.
pub fn stabilization_term(
    kernel_rows: &[Point3],
    consistent: &DMatrix<f64>,
    stab: &Stabilization,
    what: &str,
) -> Result<DMatrix<f64>, HodgeError> {
    let q = rows_to_matrix(kernel_rows);
    let w = complement_basis(&q).ok_or_else(|| HodgeError::RankDeficient(what.to_string()))?;
    let alpha = stab.weights(consistent)?;
    let m = kernel_rows.len();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            out[(i, j)] = (0..alpha.len()).map(|k| alpha[k] * w[(i, k)] * w[(j, k)]).sum();
        }
    }
    mirror_upper(&mut out);
    Ok(out)
}

fn build(
    entities: Vec<usize>,
    rows: &[Point3],
    k: &MaterialTensor,
    volume: f64,
    kernel_rows: &[Point3],
    stab: &Stabilization,
    what: String,
) -> Result<LocalMatrix, HodgeError> {
    let consistent = consistent_term(rows, k.matrix(), volume);
    let mut matrix = stabilization_term(kernel_rows, &consistent, stab, &what)? + consistent;
    mirror_upper(&mut matrix);
    let local = LocalMatrix { entities, matrix };
    if !local.is_positive_definite() {
        return Err(HodgeError::NotPositiveDefinite(what));
    }
    Ok(local)
}

/// Face-to-dual-edge mass matrix of a cell (order 4).
///
/// Consistent on constant fields: `M F_c u = Ẽ_c K u`.
pub fn local_mass_f(cell: &CellDualVectors, k: &MaterialTensor, stab: &Stabilization) -> Result<LocalMatrix, HodgeError> {
    build(
        cell.faces.to_vec(),
        &cell.dual_edges,
        k,
        cell.volume,
        &cell.face_vecs,
        stab,
        format!("cell {}", cell.cell),
    )
}

/// Edge-to-dual-face mass matrix of a cell (order 6).
///
/// Consistent on constant fields: `M E_c u = F̃_c K u`.
pub fn local_mass_e(cell: &CellDualVectors, k: &MaterialTensor, stab: &Stabilization) -> Result<LocalMatrix, HodgeError> {
    build(
        cell.edges.to_vec(),
        &cell.dual_faces,
        k,
        cell.volume,
        &cell.edge_vecs,
        stab,
        format!("cell {}", cell.cell),
    )
}

/// Dual-face-to-edge inverse mass matrix of a dual cell (order `#E(n)`).
///
/// Consistent on constant fields: `M (F̃ + S) u = E|c̃ K̃ u`.
pub fn local_inverse_mass_ftilde(
    dual: &DualCellGeometry,
    k: &MaterialTensor,
    stab: &Stabilization,
) -> Result<LocalMatrix, HodgeError> {
    build(
        dual.edges.clone(),
        &dual.half_edges,
        k,
        dual.volume,
        &dual.augmented_dual_faces(),
        stab,
        format!("dual cell {}", dual.node),
    )
}

/// Dual-edge-to-face inverse mass matrix of a dual cell (order `#F(n)`).
///
/// Consistent on constant fields: `M (Ẽ + L) u = F|c̃ K̃ u`.
pub fn local_inverse_mass_etilde(
    dual: &DualCellGeometry,
    k: &MaterialTensor,
    stab: &Stabilization,
) -> Result<LocalMatrix, HodgeError> {
    build(
        dual.faces.clone(),
        &dual.third_faces,
        k,
        dual.volume,
        &dual.augmented_dual_edges(),
        stab,
        format!("dual cell {}", dual.node),
    )
}
