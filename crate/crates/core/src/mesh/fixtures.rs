//! Small meshes used throughout the tests and examples.

use rand::Rng;

use super::{Point3, TetMesh};

/// The unit reference tetrahedron (0,0,0), (1,0,0), (0,1,0), (0,0,1).
pub fn reference_tet() -> TetMesh {
    let nodes = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
    ];
    TetMesh::new(nodes, vec![[0, 1, 2, 3]], vec![0]).expect("reference tet is valid")
}

/// The reference tetrahedron and its mirror image through z = 0, sharing
/// the face (0,1,2).
pub fn double_tet() -> TetMesh {
    let nodes = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(0.0, 0.0, -1.0),
    ];
    TetMesh::new(nodes, vec![[0, 1, 2, 3], [0, 1, 2, 4]], vec![0, 0]).expect("double tet is valid")
}

/// A single tetrahedron with random vertices in the unit cube, redrawn until
/// its volume exceeds `min_volume`.
pub fn random_tet<R: Rng>(rng: &mut R, min_volume: f64) -> TetMesh {
    loop {
        let nodes: Vec<Point3> = (0..4)
            .map(|_| Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let [a, b, c, d] = [nodes[0], nodes[1], nodes[2], nodes[3]];
        let vol = (b - a).dot(&(c - a).cross(&(d - a))).abs() / 6.0;
        if vol > min_volume {
            return TetMesh::new(nodes, vec![[0, 1, 2, 3]], vec![0]).expect("volume checked above");
        }
    }
}
