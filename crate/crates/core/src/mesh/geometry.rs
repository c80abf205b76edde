use super::{Point3, TetMesh};

/// Oriented edge and face vectors, barycenters and measures of a mesh.
///
/// `edge_vec[e]` points from the lower to the higher node of `e`;
/// `face_vec[f]` is the area-weighted normal of the ascending node triple.
/// Cell volumes are signed, so a mesh built with
/// [`Orientation::AsGiven`](super::Orientation) exposes inverted cells here.
#[derive(Debug, Clone)]
pub struct GeometricVectors {
    pub edge_vec: Vec<Point3>,
    pub face_vec: Vec<Point3>,
    pub edge_barycenter: Vec<Point3>,
    pub face_barycenter: Vec<Point3>,
    pub cell_barycenter: Vec<Point3>,
    pub volume: Vec<f64>,
    pub length: Vec<f64>,
    pub area: Vec<f64>,
}

impl GeometricVectors {
    pub fn new(mesh: &TetMesh) -> Self {
        let x = mesh.nodes();
        let edge_vec: Vec<Point3> = mesh.edges().iter().map(|&[a, b]| x[b] - x[a]).collect();
        let edge_barycenter = mesh.edges().iter().map(|&[a, b]| (x[a] + x[b]) * 0.5).collect();
        let face_vec: Vec<Point3> = mesh
            .faces()
            .iter()
            .map(|&[a, b, c]| (x[b] - x[a]).cross(&(x[c] - x[a])) * 0.5)
            .collect();
        let face_barycenter = mesh.faces().iter().map(|&[a, b, c]| (x[a] + x[b] + x[c]) / 3.0).collect();
        let cell_barycenter = mesh
            .cells()
            .iter()
            .map(|&[a, b, c, d]| (x[a] + x[b] + x[c] + x[d]) * 0.25)
            .collect();
        let volume = (0..mesh.num_cells()).map(|c| mesh.signed_volume(c)).collect();
        let length = edge_vec.iter().map(|v| v.norm()).collect();
        let area = face_vec.iter().map(|v| v.norm()).collect();
        Self {
            edge_vec,
            face_vec,
            edge_barycenter,
            face_barycenter,
            cell_barycenter,
            volume,
            length,
            area,
        }
    }

    /// Cell-face orientation sign: +1 when the face vector points out of the cell.
    pub fn outward_sign(&self, cell: usize, face: usize) -> f64 {
        let d = self.face_barycenter[face] - self.cell_barycenter[cell];
        if d.dot(&self.face_vec[face]) > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Largest edge length, used as the length scale of residuals.
    pub fn max_length(&self) -> f64 {
        self.length.iter().copied().fold(0.0, f64::max)
    }
}
