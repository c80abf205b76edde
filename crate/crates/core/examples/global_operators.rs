//! Assembles the four global operators on refined boxes and shows that the
//! inverse mass matrices stay as sparse as the forward ones.

use sparse_hodge::assembly::GlobalOperators;
use sparse_hodge::bench::{conductivity, generate_mesh, BenchmarkSpec, Geometry};
use sparse_hodge::dualgeom::DualGeometry;
use sparse_hodge::hodge::{MaterialMode, Stabilization};
use sparse_hodge::mesh::GeometricVectors;

fn main() {
    println!("level,cells,faces,edges,nnz_mf/face,nnz_met/face,nnz_me/edge,nnz_mft/edge");
    for level in [2, 4, 8, 16] {
        let mesh = generate_mesh(&BenchmarkSpec::new(Geometry::UnitBox, level)).expect("valid mesh");
        let dual = DualGeometry::new(&mesh, &GeometricVectors::new(&mesh));
        let ops = GlobalOperators::new(&mesh, &dual, &conductivity(&mesh), MaterialMode::Hybrid, &Stabilization::default())
            .expect("assembly");
        let (nf, ne) = (mesh.num_faces() as f64, mesh.num_edges() as f64);
        println!(
            "{level},{},{},{},{:.2},{:.2},{:.2},{:.2}",
            mesh.num_cells(),
            mesh.num_faces(),
            mesh.num_edges(),
            ops.mf.nnz() as f64 / nf,
            ops.met.nnz() as f64 / nf,
            ops.me.nnz() as f64 / ne,
            ops.mft.nnz() as f64 / ne,
        );
    }
}
