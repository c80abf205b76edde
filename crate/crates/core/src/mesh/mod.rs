//! Tetrahedral meshes: topology, orientation and incidence.
//!
//! Edges and faces are derived from the cell list and stored with their node
//! indices sorted ascending. An edge is directed from its lower to its higher
//! node; a face is oriented by the right-hand rule over its ascending node
//! triple. Every stored cell has positive volume under its node order.

pub mod fixtures;
mod geometry;
mod incidence;
pub mod io;

use std::collections::HashMap;

use nalgebra::Vector3;
use thiserror::Error;

pub use geometry::GeometricVectors;
pub use incidence::IncidenceMatrices;

pub type Point3 = Vector3<f64>;

/// Local node pairs of the six edges of a tetrahedron.
pub const LOCAL_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local node triples of the four faces; face `i` is opposite local node `i`.
pub const LOCAL_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Relative volume below which a cell is rejected as degenerate.
pub const DEGENERATE_VOLUME_TOL: f64 = 1e-14;

/// Local edge index joining local nodes `a` and `b`.
pub fn local_edge(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("no local edge between {a} and {b}"),
    }
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no cells")]
    Empty,
    #[error("node {node} has a non-finite coordinate")]
    NonFinite { node: usize },
    #[error("cell {cell} references node {node}, but the mesh has {count} nodes")]
    NodeOutOfRange { cell: usize, node: usize, count: usize },
    #[error("cell {cell} repeats a node")]
    RepeatedNode { cell: usize },
    #[error("cell {cell} is degenerate (volume {volume:e} below {threshold:e})")]
    DegenerateCell { cell: usize, volume: f64, threshold: f64 },
    #[error("face {face:?} is shared by more than two cells")]
    NonManifoldFace { face: [usize; 3] },
    #[error("triangle {0:?} is not a boundary face of the mesh")]
    NotBoundaryFace([usize; 3]),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Whether cells with negative signed volume get their last two nodes swapped
/// on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Reorient,
    /// Keep the given node order. Only useful for exercising the identity
    /// checks on corrupted input.
    AsGiven,
}

#[derive(Debug, Clone)]
pub struct TetMesh {
    nodes: Vec<Point3>,
    cells: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    cell_edges: Vec<[usize; 6]>,
    cell_faces: Vec<[usize; 4]>,
    face_cells: Vec<(usize, Option<usize>)>,
    cell_tags: Vec<i32>,
    face_tags: Vec<Option<i32>>,
    node_cells: Vec<Vec<usize>>,
    node_edges: Vec<Vec<usize>>,
    node_faces: Vec<Vec<usize>>,
}

impl TetMesh {
    pub fn new(nodes: Vec<Point3>, cells: Vec<[usize; 4]>, cell_tags: Vec<i32>) -> Result<Self, MeshError> {
        Self::with_orientation(nodes, cells, cell_tags, Orientation::Reorient)
    }

    pub fn with_orientation(
        nodes: Vec<Point3>,
        mut cells: Vec<[usize; 4]>,
        mut cell_tags: Vec<i32>,
        orientation: Orientation,
    ) -> Result<Self, MeshError> {
        if cells.is_empty() {
            return Err(MeshError::Empty);
        }
        cell_tags.resize(cells.len(), 0);
        for (i, p) in nodes.iter().enumerate() {
            if !p.iter().all(|v| v.is_finite()) {
                return Err(MeshError::NonFinite { node: i });
            }
        }
        let threshold = DEGENERATE_VOLUME_TOL * bounding_box_extent(&nodes).powi(3);
        for (ci, cell) in cells.iter_mut().enumerate() {
            for &n in cell.iter() {
                if n >= nodes.len() {
                    return Err(MeshError::NodeOutOfRange { cell: ci, node: n, count: nodes.len() });
                }
            }
            let mut sorted = *cell;
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::RepeatedNode { cell: ci });
            }
            let vol = signed_volume(&nodes, cell);
            if vol.abs() < threshold {
                return Err(MeshError::DegenerateCell { cell: ci, volume: vol, threshold });
            }
            if vol < 0.0 && orientation == Orientation::Reorient {
                cell.swap(2, 3);
            }
        }

        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(cells.len() * 2);
        let mut faces: Vec<[usize; 3]> = Vec::with_capacity(cells.len() * 2);
        for cell in &cells {
            for le in LOCAL_EDGES {
                edges.push(sorted2(cell[le[0]], cell[le[1]]));
            }
            for lf in LOCAL_FACES {
                faces.push(sorted3(cell[lf[0]], cell[lf[1]], cell[lf[2]]));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        faces.sort_unstable();
        faces.dedup();
        let edge_index: HashMap<[usize; 2], usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let face_index: HashMap<[usize; 3], usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();

        let mut cell_edges = Vec::with_capacity(cells.len());
        let mut cell_faces = Vec::with_capacity(cells.len());
        let mut face_cells: Vec<(usize, Option<usize>)> = vec![(usize::MAX, None); faces.len()];
        for (ci, cell) in cells.iter().enumerate() {
            let ce: [usize; 6] = std::array::from_fn(|k| {
                let le = LOCAL_EDGES[k];
                edge_index[&sorted2(cell[le[0]], cell[le[1]])]
            });
            let cf: [usize; 4] = std::array::from_fn(|k| {
                let lf = LOCAL_FACES[k];
                face_index[&sorted3(cell[lf[0]], cell[lf[1]], cell[lf[2]])]
            });
            for &f in &cf {
                let slot = &mut face_cells[f];
                if slot.0 == usize::MAX {
                    slot.0 = ci;
                } else if slot.1.is_none() {
                    slot.1 = Some(ci);
                } else {
                    return Err(MeshError::NonManifoldFace { face: faces[f] });
                }
            }
            cell_edges.push(ce);
            cell_faces.push(cf);
        }

        let mut node_cells = vec![Vec::new(); nodes.len()];
        for (ci, cell) in cells.iter().enumerate() {
            for &n in cell {
                node_cells[n].push(ci);
            }
        }
        let mut node_edges = vec![Vec::new(); nodes.len()];
        for (ei, e) in edges.iter().enumerate() {
            node_edges[e[0]].push(ei);
            node_edges[e[1]].push(ei);
        }
        let mut node_faces = vec![Vec::new(); nodes.len()];
        for (fi, f) in faces.iter().enumerate() {
            for &n in f {
                node_faces[n].push(fi);
            }
        }
        let face_tags = face_cells.iter().map(|(_, other)| other.is_none().then_some(0)).collect();

        Ok(Self {
            nodes,
            cells,
            edges,
            faces,
            cell_edges,
            cell_faces,
            face_cells,
            cell_tags,
            face_tags,
            node_cells,
            node_edges,
            node_faces,
        })
    }

    /// Tags boundary faces given by node triples (any order). Untagged
    /// boundary faces keep tag 0.
    pub fn set_boundary_tags(&mut self, tagged: &[([usize; 3], i32)]) -> Result<(), MeshError> {
        for (tri, tag) in tagged {
            let key = sorted3(tri[0], tri[1], tri[2]);
            let f = self.find_face(key).ok_or(MeshError::NotBoundaryFace(*tri))?;
            match &mut self.face_tags[f] {
                Some(t) => *t = *tag,
                None => return Err(MeshError::NotBoundaryFace(*tri)),
            }
        }
        Ok(())
    }

    /// Sets the tag of boundary face `face`; returns false for interior faces.
    pub fn set_face_tag(&mut self, face: usize, tag: i32) -> bool {
        match &mut self.face_tags[face] {
            Some(t) => {
                *t = tag;
                true
            }
            None => false,
        }
    }

    pub fn set_cell_tag(&mut self, cell: usize, tag: i32) {
        self.cell_tags[cell] = tag;
    }

    pub fn nodes(&self) -> &[Point3] {
        &self.nodes
    }
    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Global edges of a cell, in [`LOCAL_EDGES`] order.
    pub fn cell_edges(&self, cell: usize) -> &[usize; 6] {
        &self.cell_edges[cell]
    }

    /// Global faces of a cell, in [`LOCAL_FACES`] order.
    pub fn cell_faces(&self, cell: usize) -> &[usize; 4] {
        &self.cell_faces[cell]
    }

    /// The one or two cells sharing a face.
    pub fn face_cells(&self, face: usize) -> (usize, Option<usize>) {
        self.face_cells[face]
    }

    pub fn is_boundary_face(&self, face: usize) -> bool {
        self.face_cells[face].1.is_none()
    }

    /// Boundary tag of a face, `None` for interior faces.
    pub fn face_tag(&self, face: usize) -> Option<i32> {
        self.face_tags[face]
    }

    pub fn cell_tag(&self, cell: usize) -> i32 {
        self.cell_tags[cell]
    }

    pub fn cell_tags(&self) -> &[i32] {
        &self.cell_tags
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.is_boundary_face(f))
    }

    /// Cells containing a node, ascending.
    pub fn node_cells(&self, node: usize) -> &[usize] {
        &self.node_cells[node]
    }

    /// Edges containing a node, ascending.
    pub fn node_edges(&self, node: usize) -> &[usize] {
        &self.node_edges[node]
    }

    /// Faces containing a node, ascending.
    pub fn node_faces(&self, node: usize) -> &[usize] {
        &self.node_faces[node]
    }

    pub fn boundary_nodes(&self) -> Vec<bool> {
        let mut flags = vec![false; self.nodes.len()];
        for f in self.boundary_faces() {
            for &n in &self.faces[f] {
                flags[n] = true;
            }
        }
        flags
    }

    pub fn boundary_edges(&self) -> Vec<bool> {
        let mut flags = vec![false; self.edges.len()];
        for f in self.boundary_faces() {
            let [a, b, c] = self.faces[f];
            for e in [sorted2(a, b), sorted2(a, c), sorted2(b, c)] {
                if let Some(ei) = self.find_edge(e) {
                    flags[ei] = true;
                }
            }
        }
        flags
    }

    pub fn find_edge(&self, key: [usize; 2]) -> Option<usize> {
        let key = sorted2(key[0], key[1]);
        self.node_edges.get(key[0])?.iter().copied().find(|&e| self.edges[e] == key)
    }

    pub fn find_face(&self, key: [usize; 3]) -> Option<usize> {
        let key = sorted3(key[0], key[1], key[2]);
        self.node_faces.get(key[0])?.iter().copied().find(|&f| self.faces[f] == key)
    }

    pub fn signed_volume(&self, cell: usize) -> f64 {
        signed_volume(&self.nodes, &self.cells[cell])
    }

    /// Returns a copy with node coordinates replaced. Topology, tags and the
    /// orientation checks are redone on the new coordinates.
    pub fn with_nodes(&self, nodes: Vec<Point3>) -> Result<Self, MeshError> {
        let mut out = Self::new(nodes, self.cells.clone(), self.cell_tags.clone())?;
        for f in self.boundary_faces() {
            if let Some(g) = out.find_face(self.faces[f]) {
                out.face_tags[g] = self.face_tags[f];
            }
        }
        Ok(out)
    }
}

pub(crate) fn sorted2(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

fn signed_volume(nodes: &[Point3], cell: &[usize; 4]) -> f64 {
    let [a, b, c, d] = cell.map(|n| nodes[n]);
    (b - a).dot(&(c - a).cross(&(d - a))) / 6.0
}

fn bounding_box_extent(nodes: &[Point3]) -> f64 {
    let mut lo = Point3::repeat(f64::INFINITY);
    let mut hi = Point3::repeat(f64::NEG_INFINITY);
    for p in nodes {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).max()
}
