//! Sparse inverse edge and face mass matrices on barycentric dual grids of
//! tetrahedral meshes, and DC conduction solvers built on them.
//!
//! The pipeline runs bottom-up:
//!
//! - [`mesh`] loads or builds a [`mesh::TetMesh`] with its incidence
//!   matrices and oriented geometric vectors.
//! - [`dualgeom`] derives the barycentric dual vectors, boundary stubs and
//!   dual-cell geometry, and checks the reconstruction identities.
//! - [`hodge`] builds local mass and inverse mass matrices.
//! - [`assembly`] provides the sparse layer and the global operators.
//! - [`solver`] solves the nodal (SP) and cell-based (DSP) conduction problems.
//! - [`bench`] generates the benchmark meshes and runs the reported studies.

pub mod assembly;
pub mod bench;
pub mod dualgeom;
pub mod hodge;
pub mod linalg;
pub mod mesh;
pub mod solver;
