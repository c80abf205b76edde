//! Numerical verification of the reconstruction identities and the
//! barycentric subdivision facts.
//!
//! Each check is computed from an independent construction where one
//! exists: restricted volumes from the flag tetrahedra of the subdivision,
//! restricted primal vectors from explicit segments and quadrilaterals, and
//! stubs from their triangle and segment realizations.

use std::fmt::Write as _;

use nalgebra::Matrix3;

use super::{cell_stubs, fundamental_identity_check, stub_segment, stub_triangles, DualGeometry};
use crate::mesh::{GeometricVectors, Point3, TetMesh, LOCAL_EDGES};

/// Worst relative residual of one identity family.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub worst: f64,
    pub location: String,
    pub checked: usize,
}

#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub entries: Vec<IdentityResidual>,
}

pub const FAMILIES: [&str; 14] = [
    "face_magic",
    "edge_magic",
    "fundamental_identity",
    "first_geom",
    "second_geom",
    "simplicial_face_internal",
    "simplicial_edge_internal",
    "simplicial_face_external",
    "simplicial_edge_external",
    "stub_cancellation",
    "restricted_volume",
    "restricted_edge",
    "restricted_face",
    "dual_volume_partition",
];

impl IdentityReport {
    fn new() -> Self {
        Self {
            entries: FAMILIES
                .iter()
                .map(|&name| IdentityResidual { name, worst: 0.0, location: String::from("-"), checked: 0 })
                .collect(),
        }
    }

    fn record(&mut self, name: &str, residual: f64, location: impl FnOnce() -> String) {
        let e = self.entries.iter_mut().find(|e| e.name == name).expect("known family");
        e.checked += 1;
        if !(residual <= e.worst) {
            e.worst = residual;
            e.location = location();
        }
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResidual> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Largest residual over all families.
    pub fn worst(&self) -> f64 {
        self.entries.iter().map(|e| e.worst).fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.worst < tol)
    }

    pub fn failures(&self, tol: f64) -> Vec<&IdentityResidual> {
        self.entries.iter().filter(|e| !(e.worst < tol)).collect()
    }

    /// Folds another report into this one, keeping the worst entries.
    pub fn merge(&mut self, other: &IdentityReport) {
        for o in &other.entries {
            let e = self.entries.iter_mut().find(|e| e.name == o.name).expect("known family");
            e.checked += o.checked;
            if !(o.worst <= e.worst) {
                e.worst = o.worst;
                e.location = o.location.clone();
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("identity,worst_residual,location,checked\n");
        for e in &self.entries {
            let _ = writeln!(s, "{},{:.3e},{},{}", e.name, e.worst, e.location, e.checked);
        }
        s
    }
}

fn rel(residual: Matrix3<f64>, scale: f64) -> f64 {
    residual.norm() / scale.abs()
}

fn vrel(residual: Point3, scale: f64) -> f64 {
    residual.norm() / scale.abs()
}

/// Runs every identity family on a mesh.
pub fn check_mesh(mesh: &TetMesh) -> IdentityReport {
    let vectors = GeometricVectors::new(mesh);
    let dual = DualGeometry::new(mesh, &vectors);
    check_with(mesh, &vectors, &dual)
}

pub fn check_with(mesh: &TetMesh, vectors: &GeometricVectors, dual: &DualGeometry) -> IdentityReport {
    let mut report = IdentityReport::new();
    let x = mesh.nodes();
    let eye = Matrix3::identity();
    for (c, cd) in dual.cells.iter().enumerate() {
        let vol = cd.volume;
        report.record("face_magic", rel(cd.face_tensor() - eye * vol, vol), || format!("cell {c}"));
        report.record("edge_magic", rel(cd.edge_tensor() - eye * vol, vol), || format!("cell {c}"));
        let stubs = cell_stubs(cd);
        let cell = mesh.cells()[c];
        for (local, &n) in cell.iter().enumerate() {
            let res = fundamental_identity_check(mesh, vectors, c, n);
            report.record("fundamental_identity", rel(res, 3.0 * vol), || format!("cell {c} node {n}"));
            let p = &stubs.pairs[local];
            for i in 0..3 {
                let target = cd.face_vecs[p.faces[i]] * (p.signs[i] / 6.0);
                let built = cd.dual_faces[p.edges[i]] + stub_triangles(mesh, vectors, cd, local, i);
                report.record("first_geom", vrel(built - target, target.norm()), || format!("cell {c} node {n} pair {i}"));
                let target = cd.edge_vecs[p.edges[i]] * (p.signs[i] / 4.0);
                let built = cd.dual_edges[p.faces[i]] + stub_segment(mesh, vectors, cd, local, i);
                report.record("second_geom", vrel(built - target, target.norm()), || format!("cell {c} node {n} pair {i}"));
            }
            // the six flag tetrahedra (n, b_e, b_f, b_c) of the subdivision
            let mut flags = 0.0;
            for (k, &[a, b]) in LOCAL_EDGES.iter().enumerate() {
                if a != local && b != local {
                    continue;
                }
                let be = vectors.edge_barycenter[cd.edges[k]];
                for (lf, &f) in cd.faces.iter().enumerate() {
                    if lf == a || lf == b {
                        continue;
                    }
                    let bf = vectors.face_barycenter[f];
                    flags += (be - x[n]).dot(&(bf - x[n]).cross(&(cd.barycenter - x[n]))).abs() / 6.0;
                }
            }
            report.record("restricted_volume", (flags - vol / 4.0).abs() / vol, || format!("cell {c} node {n}"));
        }
    }

    let mut dual_total = 0.0;
    let boundary_edges = mesh.boundary_edges();
    for dc in &dual.dual_cells {
        let n = dc.node;
        let scale = dc.volume;
        dual_total += dc.volume;
        let eye_v = eye * scale;
        if dc.is_boundary {
            let t = dc.edge_tensor(&dc.augmented_dual_faces());
            report.record("simplicial_face_external", rel(t - eye_v, scale), || format!("node {n}"));
            let t = dc.face_tensor(&dc.augmented_dual_edges());
            report.record("simplicial_edge_external", rel(t - eye_v, scale), || format!("node {n}"));
        } else {
            let t = dc.edge_tensor(&dc.dual_faces);
            report.record("simplicial_face_internal", rel(t - eye_v, scale), || format!("node {n}"));
            let t = dc.face_tensor(&dc.dual_edges);
            report.record("simplicial_edge_internal", rel(t - eye_v, scale), || format!("node {n}"));
        }
        for (slot, &e) in dc.edges.iter().enumerate() {
            let [a, b] = mesh.edges()[e];
            let ev = vectors.edge_vec[e];
            if !boundary_edges[e] {
                let s = dc.face_stubs[slot];
                report.record("stub_cancellation", vrel(s, dc.dual_faces[slot].norm()), || format!("node {n} edge {e}"));
            }
            // the half of e inside the dual cell runs from n to b_e
            let seg = if n == a { vectors.edge_barycenter[e] - x[a] } else { x[b] - vectors.edge_barycenter[e] };
            report.record("restricted_edge", vrel(seg - dc.half_edges[slot], ev.norm()), || format!("node {n} edge {e}"));
        }
        for (slot, &f) in dc.faces.iter().enumerate() {
            let fv = vectors.face_vec[f];
            if !mesh.is_boundary_face(f) {
                let l = dc.edge_stubs[slot];
                report.record("stub_cancellation", vrel(l, dc.dual_edges[slot].norm()), || format!("node {n} face {f}"));
            }
            // kite n, b_{e1}, b_f, b_{e2} of face f around n
            let others: Vec<usize> = mesh.faces()[f].iter().copied().filter(|&m| m != n).collect();
            let be1 = (x[n] + x[others[0]]) * 0.5;
            let be2 = (x[n] + x[others[1]]) * 0.5;
            let bf = vectors.face_barycenter[f];
            let mut kite = (bf - x[n]).cross(&(be2 - be1)) * 0.5;
            if kite.dot(&fv) < 0.0 {
                kite = -kite;
            }
            report.record("restricted_face", vrel(kite - dc.third_faces[slot], fv.norm()), || format!("node {n} face {f}"));
        }
    }
    let primal_total: f64 = vectors.volume.iter().sum();
    report.record("dual_volume_partition", (dual_total - primal_total).abs() / primal_total, || String::from("mesh"));
    report
}
