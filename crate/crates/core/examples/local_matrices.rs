//! Local mass matrices of one tetrahedron and inverse mass matrices of one
//! dual cell, with their consistency on a constant field.

use nalgebra::{DVector, Matrix3};
use sparse_hodge::bench::{generate_mesh, BenchmarkSpec, Geometry};
use sparse_hodge::dualgeom::DualGeometry;
use sparse_hodge::hodge::{local_inverse_mass_etilde, local_inverse_mass_ftilde, local_mass_e, local_mass_f, MaterialTensor, Stabilization};
use sparse_hodge::mesh::{GeometricVectors, Point3};

fn project(rows: &[Point3], u: &Point3) -> DVector<f64> {
    DVector::from_iterator(rows.len(), rows.iter().map(|r| r.dot(u)))
}

fn main() {
    let mesh = generate_mesh(&BenchmarkSpec::new(Geometry::UnitBox, 2).with_jitter(0.1, 1)).expect("valid mesh");
    let dual = DualGeometry::new(&mesh, &GeometricVectors::new(&mesh));
    let k = MaterialTensor::new(Matrix3::new(2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 3.0)).expect("SPD");
    let stab = Stabilization::default();
    let u = Point3::new(1.0, -0.5, 0.25);

    let cell = &dual.cells[0];
    let me = local_mass_e(cell, &k, &stab).expect("SPD");
    let mf = local_mass_f(cell, &k, &stab).expect("SPD");
    println!("cell 0: M^E order {}, M^F order {}", me.order(), mf.order());
    let r = &me.matrix * project(&cell.edge_vecs, &u) - project(&cell.dual_faces, &(k.matrix() * u));
    println!("  M^E consistency residual {:.2e}", r.norm());
    println!("  M^E =\n{:.4}", me.matrix);

    let centre = (0..mesh.num_nodes()).max_by_key(|&n| mesh.node_cells(n).len()).unwrap();
    let dc = &dual.dual_cells[centre];
    let mft = local_inverse_mass_ftilde(dc, &k, &stab).expect("SPD");
    let met = local_inverse_mass_etilde(dc, &k, &stab).expect("SPD");
    println!(
        "dual cell of node {centre}: {} cells, M^F̃ order {}, M^Ẽ order {}",
        mesh.node_cells(centre).len(),
        mft.order(),
        met.order()
    );
    let r = &met.matrix * project(&dc.augmented_dual_edges(), &u) - project(&dc.third_faces, &(k.matrix() * u));
    println!("  M^Ẽ consistency residual {:.2e}", r.norm());
    println!("  symmetric {}, positive definite {}", met.is_symmetric(), met.is_positive_definite());
}
