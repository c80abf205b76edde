//! Builds the barycentric dual of a jittered box and prints the worst
//! residual of every reconstruction identity.

use sparse_hodge::bench::{generate_mesh, BenchmarkSpec, Geometry};
use sparse_hodge::dualgeom::identities::check_with;
use sparse_hodge::dualgeom::DualGeometry;
use sparse_hodge::mesh::GeometricVectors;

fn main() {
    let mesh = generate_mesh(&BenchmarkSpec::new(Geometry::UnitBox, 3).with_jitter(0.15, 7)).expect("valid mesh");
    let vectors = GeometricVectors::new(&mesh);
    let dual = DualGeometry::new(&mesh, &vectors);
    println!(
        "{} nodes, {} edges, {} faces, {} cells",
        mesh.num_nodes(),
        mesh.num_edges(),
        mesh.num_faces(),
        mesh.num_cells()
    );

    let total: f64 = dual.dual_cells.iter().map(|d| d.volume).sum();
    println!("dual volumes sum to {total:.15}");

    let report = check_with(&mesh, &vectors, &dual);
    print!("{}", report.to_csv());
    println!("all below 1e-10: {}", report.passes(1e-10));
}
