//! Oracles shared by the integration tests. Everything here is computed
//! from primal geometry with dense linear algebra, independently of the
//! library's dual-geometry and assembly code paths.

#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3};
use rand::Rng;

use sparse_hodge::hodge::MaterialTensor;
use sparse_hodge::mesh::{Point3, TetMesh};

/// Random SPD tensor with eigenvalues in [0.5, 5].
pub fn random_spd<R: Rng>(rng: &mut R) -> MaterialTensor {
    let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let q = a.qr().q();
    let d = Matrix3::from_diagonal(&Point3::new(rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0)));
    let mut k = q * d * q.transpose();
    for i in 0..3 {
        for j in 0..i {
            k[(i, j)] = k[(j, i)];
        }
    }
    MaterialTensor::new(k).expect("constructed SPD")
}

/// `(1/V) R K Rᵀ + α (I - U Uᵀ)` with `U` the left singular vectors of `Q`
/// and `α = trace(consistent)/m`: the projector form of the stabilized
/// local matrix for equal weights.
pub fn projector_local(rows: &[Point3], k: &Matrix3<f64>, volume: f64, kernel: &[Point3]) -> DMatrix<f64> {
    let m = rows.len();
    let r = DMatrix::from_fn(m, 3, |i, j| rows[i][j]);
    let kd = DMatrix::from_fn(3, 3, |i, j| k[(i, j)]);
    let consistent = &r * kd * r.transpose() / volume;
    let q = DMatrix::from_fn(m, 3, |i, j| kernel[i][j]);
    let u = q.svd(true, false).u.expect("requested");
    let proj = DMatrix::identity(m, m) - &u * u.transpose();
    let alpha = consistent.trace() / m as f64;
    consistent + proj * alpha
}

/// Cell quantities rebuilt from node coordinates: global faces and edges
/// of the cell with their vectors, `ẽ_f|c = ±(b_f - b_c)` along `f`, and
/// `f̃_e|c` as the area vector of the quadrilateral `b_c, b_f1, b_e, b_f2`
/// along `e`.
pub struct CellRows {
    pub volume: f64,
    pub faces: Vec<usize>,
    pub face_vecs: Vec<Point3>,
    pub dual_edges: Vec<Point3>,
    pub edges: Vec<usize>,
    pub edge_vecs: Vec<Point3>,
    pub dual_faces: Vec<Point3>,
}

fn along(v: Point3, r: &Point3) -> Point3 {
    if v.dot(r) < 0.0 {
        -v
    } else {
        v
    }
}

pub fn cell_rows(mesh: &TetMesh, c: usize) -> CellRows {
    let x = mesh.nodes();
    let cell = mesh.cells()[c];
    let bc = cell.iter().map(|&n| x[n]).sum::<Point3>() / 4.0;
    let bary = |tri: &[usize]| tri.iter().map(|&n| x[n]).sum::<Point3>() / tri.len() as f64;
    let mut out = CellRows {
        volume: mesh.signed_volume(c),
        faces: vec![],
        face_vecs: vec![],
        dual_edges: vec![],
        edges: vec![],
        edge_vecs: vec![],
        dual_faces: vec![],
    };
    for skip in 0..4 {
        let tri: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| cell[i]).collect();
        let f = mesh.find_face([tri[0], tri[1], tri[2]]).unwrap();
        let fv = face_vector(mesh, f);
        out.faces.push(f);
        out.face_vecs.push(fv);
        out.dual_edges.push(along(bary(&tri) - bc, &fv));
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let e = mesh.find_edge([cell[a], cell[b]]).unwrap();
            let ev = edge_vector(mesh, e);
            let rest: Vec<usize> = (0..4).filter(|&i| i != a && i != b).map(|i| cell[i]).collect();
            let bf1 = bary(&[cell[a], cell[b], rest[0]]);
            let bf2 = bary(&[cell[a], cell[b], rest[1]]);
            let be = bary(&[cell[a], cell[b]]);
            out.edges.push(e);
            out.edge_vecs.push(ev);
            out.dual_faces.push(along((be - bc).cross(&(bf2 - bf1)) * 0.5, &ev));
        }
    }
    out
}

/// Globally oriented face vector (ascending node triple).
pub fn face_vector(mesh: &TetMesh, face: usize) -> Point3 {
    let x = mesh.nodes();
    let [a, b, c] = mesh.faces()[face];
    (x[b] - x[a]).cross(&(x[c] - x[a])) * 0.5
}

/// Globally oriented edge vector (low to high node).
pub fn edge_vector(mesh: &TetMesh, edge: usize) -> Point3 {
    let [a, b] = mesh.edges()[edge];
    mesh.nodes()[b] - mesh.nodes()[a]
}

/// Per-cell blocks of the piecewise construction around `node`, from
/// primal geometry alone: the rows paired with face `f_i` are `(r_i/4) e_i`
/// and those paired with edge `e_i` are `(r_i/6) f_i`, where `e_i` leaves
/// the node and `f_i` is the face through the node opposite to `e_i`.
pub struct PiecewiseBlock {
    pub cell: usize,
    pub volume: f64,
    pub faces: [usize; 3],
    pub face_rows: [Point3; 3],
    pub edges: [usize; 3],
    pub edge_rows: [Point3; 3],
}

pub fn piecewise_blocks(mesh: &TetMesh, node: usize) -> Vec<PiecewiseBlock> {
    mesh.node_cells(node)
        .iter()
        .map(|&c| {
            let cell = mesh.cells()[c];
            let others: Vec<usize> = cell.iter().copied().filter(|&m| m != node).collect();
            let volume = mesh.signed_volume(c);
            let mut faces = [0; 3];
            let mut face_rows = [Point3::zeros(); 3];
            let mut edges = [0; 3];
            let mut edge_rows = [Point3::zeros(); 3];
            for i in 0..3 {
                let far = others[i];
                let e = mesh.find_edge([node, far]).unwrap();
                let rest: Vec<usize> = others.iter().copied().filter(|&m| m != far).collect();
                let f = mesh.find_face([node, rest[0], rest[1]]).unwrap();
                let ev = edge_vector(mesh, e);
                let fv = face_vector(mesh, f);
                let r = fv.dot(&ev).signum();
                faces[i] = f;
                face_rows[i] = ev * (r / 4.0);
                edges[i] = e;
                edge_rows[i] = fv * (r / 6.0);
            }
            PiecewiseBlock { cell: c, volume, faces, face_rows, edges, edge_rows }
        })
        .collect()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, b| a.max(b.abs()))
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Global operators by brute-force dense assembly of oracle local
/// matrices. Dual cells whose cells share one tensor use the projector
/// form; the others use the inverse of the summed piecewise blocks.
pub struct DenseOperators {
    pub me: DMatrix<f64>,
    pub mf: DMatrix<f64>,
    pub met: DMatrix<f64>,
    pub mft: DMatrix<f64>,
}

fn scatter(target: &mut DMatrix<f64>, idx: &[usize], local: &DMatrix<f64>) {
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            target[(i, j)] += local[(a, b)];
        }
    }
}

pub fn dense_operators(mesh: &TetMesh, sigma: &[MaterialTensor]) -> DenseOperators {
    let (ne, nf) = (mesh.num_edges(), mesh.num_faces());
    let mut ops = DenseOperators {
        me: DMatrix::zeros(ne, ne),
        mf: DMatrix::zeros(nf, nf),
        met: DMatrix::zeros(nf, nf),
        mft: DMatrix::zeros(ne, ne),
    };
    for c in 0..mesh.num_cells() {
        let r = cell_rows(mesh, c);
        let s = sigma[c].matrix();
        let rho = sigma[c].inverse();
        scatter(&mut ops.me, &r.edges, &projector_local(&r.dual_faces, s, r.volume, &r.edge_vecs));
        scatter(&mut ops.mf, &r.faces, &projector_local(&r.dual_edges, rho.matrix(), r.volume, &r.face_vecs));
    }
    for n in 0..mesh.num_nodes() {
        let blocks = piecewise_blocks(mesh, n);
        let edges = mesh.node_edges(n).to_vec();
        let faces = mesh.node_faces(n).to_vec();
        let slot = |list: &[usize], g: usize| list.iter().position(|&x| x == g).unwrap();
        let cells = mesh.node_cells(n);
        if cells.iter().all(|&c| sigma[c] == sigma[cells[0]]) {
            let k = sigma[cells[0]];
            let volume: f64 = blocks.iter().map(|b| b.volume / 4.0).sum();
            let mut edge_kernel = vec![Point3::zeros(); edges.len()];
            let mut face_kernel = vec![Point3::zeros(); faces.len()];
            for b in &blocks {
                for i in 0..3 {
                    edge_kernel[slot(&edges, b.edges[i])] += b.edge_rows[i];
                    face_kernel[slot(&faces, b.faces[i])] += b.face_rows[i];
                }
            }
            let half: Vec<Point3> = edges.iter().map(|&e| edge_vector(mesh, e) * 0.5).collect();
            let third: Vec<Point3> = faces.iter().map(|&f| face_vector(mesh, f) / 3.0).collect();
            scatter(&mut ops.mft, &edges, &projector_local(&half, k.inverse().matrix(), volume, &edge_kernel));
            scatter(&mut ops.met, &faces, &projector_local(&third, k.matrix(), volume, &face_kernel));
        } else {
            let mut me = DMatrix::zeros(edges.len(), edges.len());
            let mut mf = DMatrix::zeros(faces.len(), faces.len());
            for b in &blocks {
                let s = sigma[b.cell].matrix();
                let rho = sigma[b.cell].inverse();
                for i in 0..3 {
                    for j in 0..3 {
                        let (ei, ej) = (slot(&edges, b.edges[i]), slot(&edges, b.edges[j]));
                        me[(ei, ej)] += b.edge_rows[i].dot(&(s * b.edge_rows[j])) * 4.0 / b.volume;
                        let (fi, fj) = (slot(&faces, b.faces[i]), slot(&faces, b.faces[j]));
                        mf[(fi, fj)] += b.face_rows[i].dot(&(rho.matrix() * b.face_rows[j])) * 4.0 / b.volume;
                    }
                }
            }
            scatter(&mut ops.mft, &edges, &me.try_inverse().unwrap());
            scatter(&mut ops.met, &faces, &mf.try_inverse().unwrap());
        }
    }
    ops
}

/// Largest entrywise difference relative to the largest oracle entry.
pub fn relative_entry_error(sparse: &DMatrix<f64>, dense: &DMatrix<f64>) -> f64 {
    max_abs(&(sparse - dense)) / max_abs(dense)
}
