use super::{GeometricVectors, TetMesh};
use crate::assembly::SparseMatrix;

/// Signed incidence matrices: `g` is edge x node, `c` face x edge and
/// `d` cell x face. All entries are -1, 0 or +1.
#[derive(Debug, Clone)]
pub struct IncidenceMatrices {
    pub g: SparseMatrix,
    pub c: SparseMatrix,
    pub d: SparseMatrix,
}

impl IncidenceMatrices {
    pub fn new(mesh: &TetMesh, vectors: &GeometricVectors) -> Self {
        let mut g = Vec::with_capacity(2 * mesh.num_edges());
        for (e, &[a, b]) in mesh.edges().iter().enumerate() {
            g.push((e, a, -1.0));
            g.push((e, b, 1.0));
        }
        // face (a,b,c) with a<b<c is bounded by a->b->c->a
        let mut c = Vec::with_capacity(3 * mesh.num_faces());
        for (f, &[a, b, cc]) in mesh.faces().iter().enumerate() {
            let edge = |p, q| mesh.find_edge([p, q]).expect("face edges exist");
            c.push((f, edge(a, b), 1.0));
            c.push((f, edge(b, cc), 1.0));
            c.push((f, edge(a, cc), -1.0));
        }
        let mut d = Vec::with_capacity(4 * mesh.num_cells());
        for cell in 0..mesh.num_cells() {
            for &f in mesh.cell_faces(cell) {
                d.push((cell, f, vectors.outward_sign(cell, f)));
            }
        }
        let build = |r, cols, t| SparseMatrix::from_triplets(r, cols, t).expect("indices come from the mesh");
        Self {
            g: build(mesh.num_edges(), mesh.num_nodes(), g),
            c: build(mesh.num_faces(), mesh.num_edges(), c),
            d: build(mesh.num_cells(), mesh.num_faces(), d),
        }
    }
}
