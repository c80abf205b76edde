//! Stationary conduction: nodal scalar potential (SP) and dual scalar
//! potential (DSP, one unknown per cell) formulations.
//!
//! Boundary faces carry a tag: `0` is insulated and `k + 1` belongs to
//! electrode `k`, held at `voltages[k]`. Conductances are reported with
//! respect to electrode 1 against electrode 0.
//!
//! In the DSP formulation the dual-edge voltages are
//! `Ẽ = Dᵀ Ũ + E_s`, so `Ũ` is the cell potential itself, and the system
//! `D M Dᵀ Ũ = -D M E_s` expresses `D J = 0` with `J = M Ẽ`. Insulated
//! faces are eliminated inside each dual cell by static condensation, which
//! imposes `J = 0` on them while leaving their stub-augmented voltages free.

mod cg;

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

pub use cg::{pcg, CgOutcome};

use crate::assembly::{assemble, assemble_mass_e, triple_product, AssemblyError, DualCellLocals, SparseMatrix};
use crate::dualgeom::DualGeometry;
use crate::hodge::{DualCellStrategy, LocalMatrix, MaterialMode, MaterialTensor, Stabilization};
use crate::linalg::spd_inverse;
use crate::mesh::{GeometricVectors, IncidenceMatrices, Point3, TetMesh};

pub const INSULATED_TAG: i32 = 0;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("local block of dual cell {0} is not positive definite")]
    NotPositiveDefinite(usize),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Sp,
    Dsp,
}

impl FromStr for Formulation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sp" => Ok(Formulation::Sp),
            "dsp" => Ok(Formulation::Dsp),
            _ => Err(format!("unknown formulation '{s}' (expected sp or dsp)")),
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Sp => "sp",
            Formulation::Dsp => "dsp",
        })
    }
}

/// Role of a boundary face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Insulated,
    Electrode(usize),
}

/// A conduction problem on a tagged mesh.
#[derive(Debug, Clone)]
pub struct ConductionProblem {
    pub mesh: TetMesh,
    /// Conductivity per cell.
    pub sigma: Vec<MaterialTensor>,
    /// Voltage of each electrode; electrode 0 is the reference.
    pub voltages: Vec<f64>,
}

impl ConductionProblem {
    pub fn new(mesh: TetMesh, sigma: Vec<MaterialTensor>, voltages: Vec<f64>) -> Result<Self, SolverError> {
        if sigma.len() != mesh.num_cells() {
            return Err(SolverError::InvalidProblem(format!(
                "{} conductivities for {} cells",
                sigma.len(),
                mesh.num_cells()
            )));
        }
        if voltages.len() < 2 {
            return Err(SolverError::InvalidProblem("at least two electrodes are required".into()));
        }
        if let Some(v) = voltages.iter().find(|v| !v.is_finite()) {
            return Err(SolverError::InvalidProblem(format!("electrode voltage {v} is not finite")));
        }
        let mut used = vec![false; voltages.len()];
        for f in mesh.boundary_faces() {
            let tag = mesh.face_tag(f).unwrap_or(INSULATED_TAG);
            if tag < 0 || tag as usize > voltages.len() {
                return Err(SolverError::InvalidProblem(format!("boundary face {f} has unknown tag {tag}")));
            }
            if tag > 0 {
                used[tag as usize - 1] = true;
            }
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(SolverError::InvalidProblem(format!("electrode {k} has no faces")));
        }
        Ok(Self { mesh, sigma, voltages })
    }

    /// Kind of boundary face `f`, `None` for interior faces.
    pub fn face_kind(&self, f: usize) -> Option<BoundaryKind> {
        match self.mesh.face_tag(f)? {
            INSULATED_TAG => Some(BoundaryKind::Insulated),
            t => Some(BoundaryKind::Electrode(t as usize - 1)),
        }
    }

    pub fn insulated_faces(&self) -> Vec<bool> {
        (0..self.mesh.num_faces()).map(|f| self.face_kind(f) == Some(BoundaryKind::Insulated)).collect()
    }

    /// `V1 - V0`.
    pub fn applied_voltage(&self) -> f64 {
        self.voltages[1] - self.voltages[0]
    }

    /// Electrode index of every node on an electrode face. Fails when two
    /// electrodes share a node, which the nodal formulation cannot represent.
    pub fn electrode_nodes(&self) -> Result<Vec<Option<usize>>, SolverError> {
        let mut owner = vec![None; self.mesh.num_nodes()];
        for f in self.mesh.boundary_faces() {
            if let Some(BoundaryKind::Electrode(k)) = self.face_kind(f) {
                for &n in &self.mesh.faces()[f] {
                    match owner[n] {
                        Some(j) if j != k => {
                            return Err(SolverError::InvalidProblem(format!("node {n} touches electrodes {j} and {k}")))
                        }
                        _ => owner[n] = Some(k),
                    }
                }
            }
        }
        Ok(owner)
    }

    fn electrode_node_voltages(&self) -> Result<Vec<Option<f64>>, SolverError> {
        Ok(self.electrode_nodes()?.into_iter().map(|o| o.map(|k| self.voltages[k])).collect())
    }
}

/// Solver settings shared by both formulations.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: MaterialMode,
    pub stabilization: Stabilization,
    pub tol: f64,
    /// Defaults to 20 times the number of unknowns.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { mode: MaterialMode::default(), stabilization: Stabilization::default(), tol: 1e-10, max_iter: None }
    }
}

/// Geometry and topology derived from a mesh, computed once per mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub vectors: GeometricVectors,
    pub incidence: IncidenceMatrices,
    pub dual: DualGeometry,
}

impl Discretization {
    pub fn new(mesh: &TetMesh) -> Self {
        let vectors = GeometricVectors::new(mesh);
        let incidence = IncidenceMatrices::new(mesh, &vectors);
        let dual = DualGeometry::new(mesh, &vectors);
        Self { vectors, incidence, dual }
    }
}

/// Degrees of freedom of a solve. Arrays belonging to the other
/// formulation are empty.
#[derive(Debug, Clone, Default)]
pub struct DofArrays {
    /// SP node potentials (V).
    pub node_potentials: Vec<f64>,
    /// SP edge voltages `-G U` (V).
    pub edge_voltages: Vec<f64>,
    /// SP currents through dual faces (A).
    pub dual_face_currents: Vec<f64>,
    /// DSP cell potentials (V).
    pub cell_potentials: Vec<f64>,
    /// DSP dual-edge voltages, zero on insulated faces (V).
    pub dual_edge_voltages: Vec<f64>,
    /// DSP currents through primal faces (A).
    pub face_currents: Vec<f64>,
    /// DSP source voltages `E_s` (V).
    pub source_voltages: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub formulation: Formulation,
    pub dofs: DofArrays,
    /// Cell-wise constant electric field (V/m).
    pub cell_e: Vec<Point3>,
    /// Cell-wise constant current density (A/m²).
    pub cell_j: Vec<Point3>,
    /// Dissipated power (W).
    pub power: f64,
    /// Current entering through electrode 1 (A).
    pub current: f64,
    /// `i / u` (S).
    pub conductance: f64,
    /// `P / u²` (S).
    pub conductance_power: f64,
    pub iterations: usize,
    /// Relative residual of the final linear solve.
    pub residual: f64,
    /// Strategy used per dual cell (DSP only).
    pub strategies: Vec<DualCellStrategy>,
}

impl SolveResult {
    /// Lines `cell_index Ex Ey Ez Jx Jy Jz`.
    pub fn cell_field_dump(&self) -> String {
        let mut s = String::new();
        for (c, (e, j)) in self.cell_e.iter().zip(&self.cell_j).enumerate() {
            let _ = writeln!(s, "{c} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e}", e.x, e.y, e.z, j.x, j.y, j.z);
        }
        s
    }
}

/// `E_s`: nonzero only on electrode faces, `E_s,f = -D_cf V` for the
/// owning cell `c`.
pub fn build_source_voltages(problem: &ConductionProblem, incidence: &IncidenceMatrices) -> Vec<f64> {
    let mesh = &problem.mesh;
    let mut es = vec![0.0; mesh.num_faces()];
    for f in mesh.boundary_faces() {
        if let Some(BoundaryKind::Electrode(k)) = problem.face_kind(f) {
            let (c, _) = mesh.face_cells(f);
            es[f] = -incidence.d.get(c, f) * problem.voltages[k];
        }
    }
    es
}

/// Static condensation of the insulated rows of a local matrix:
/// `M_II - M_IB M_BB⁻¹ M_BI` over the remaining entities.
pub fn condense_insulated(local: &LocalMatrix, insulated: &[bool]) -> Option<LocalMatrix> {
    let (keep, drop): (Vec<usize>, Vec<usize>) = (0..local.order()).partition(|&i| !insulated[local.entities[i]]);
    if drop.is_empty() {
        return Some(local.clone());
    }
    let m = &local.matrix;
    let mbb = DMatrix::from_fn(drop.len(), drop.len(), |a, b| m[(drop[a], drop[b])]);
    let mbi = DMatrix::from_fn(drop.len(), keep.len(), |a, b| m[(drop[a], keep[b])]);
    let mii = DMatrix::from_fn(keep.len(), keep.len(), |a, b| m[(keep[a], keep[b])]);
    let inv = spd_inverse(&mbb)?;
    let mut s = mii - mbi.transpose() * inv * &mbi;
    crate::linalg::mirror_upper(&mut s);
    Some(LocalMatrix { entities: keep.iter().map(|&i| local.entities[i]).collect(), matrix: s })
}

/// The assembled DSP system.
#[derive(Debug, Clone)]
pub struct DspSystem {
    /// `M^Ẽ` with insulated faces condensed out (their rows are empty).
    pub mass: SparseMatrix,
    /// `D` without its insulated-face columns.
    pub divergence: SparseMatrix,
    /// `D M Dᵀ`.
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub source: Vec<f64>,
    pub strategies: Vec<DualCellStrategy>,
}

pub fn dsp_system(problem: &ConductionProblem, disc: &Discretization, opts: &SolveOptions) -> Result<DspSystem, SolverError> {
    let mesh = &problem.mesh;
    let locals = DualCellLocals::new(mesh, &disc.dual, &problem.sigma, opts.mode, &opts.stabilization)?;
    let insulated = problem.insulated_faces();
    let condensed = locals
        .met
        .iter()
        .enumerate()
        .map(|(n, l)| condense_insulated(l, &insulated).ok_or(SolverError::NotPositiveDefinite(n)))
        .collect::<Result<Vec<_>, _>>()?;
    let mass = assemble(mesh.num_faces(), &condensed)?;
    let divergence = disc.incidence.d.filter(|_, f| !insulated[f]);
    let dt = divergence.transpose();
    let matrix = triple_product(&divergence, &mass, &dt)?;
    let source = build_source_voltages(problem, &disc.incidence);
    let rhs = divergence.matvec(&mass.matvec(&source)?)?.into_iter().map(|v| -v).collect();
    Ok(DspSystem { mass, divergence, matrix, rhs, source, strategies: locals.strategies })
}

/// `vᵀ M v`.
pub fn dissipated_power(voltages: &[f64], mass: &SparseMatrix) -> f64 {
    let mv = mass.matvec(voltages).expect("dimensions match");
    voltages.iter().zip(&mv).map(|(a, b)| a * b).sum()
}

/// Per-cell vector `(1/|c|) Σ_f ẽ_f|c x_f` from face values.
pub fn reconstruct_from_faces(dual: &DualGeometry, face_values: &[f64]) -> Vec<Point3> {
    dual.cells
        .iter()
        .map(|cd| (0..4).map(|i| cd.dual_edges[i] * face_values[cd.faces[i]]).sum::<Point3>() / cd.volume)
        .collect()
}

/// Per-cell vector `(1/|c|) Σ_e f̃_e|c x_e` from edge values.
pub fn reconstruct_from_edges(dual: &DualGeometry, edge_values: &[f64]) -> Vec<Point3> {
    dual.cells
        .iter()
        .map(|cd| (0..6).map(|i| cd.dual_faces[i] * edge_values[cd.edges[i]]).sum::<Point3>() / cd.volume)
        .collect()
}

/// Cell fields `(E_c, J_c)` of a solve.
pub fn reconstruct_cell_fields(
    formulation: Formulation,
    dofs: &DofArrays,
    problem: &ConductionProblem,
    dual: &DualGeometry,
) -> (Vec<Point3>, Vec<Point3>) {
    match formulation {
        Formulation::Sp => {
            let e = reconstruct_from_edges(dual, &dofs.edge_voltages);
            let j = e.iter().zip(&problem.sigma).map(|(e, s)| s.matrix() * e).collect();
            (e, j)
        }
        Formulation::Dsp => {
            let j = reconstruct_from_faces(dual, &dofs.face_currents);
            let e = j.iter().zip(&problem.sigma).map(|(j, s)| s.inverse().matrix() * j).collect();
            (e, j)
        }
    }
}

/// `‖Cᵀ Ẽ‖∞` over edges none of whose faces is insulated.
pub fn circuital_residual(problem: &ConductionProblem, incidence: &IncidenceMatrices, e_tilde: &[f64]) -> f64 {
    let insulated = problem.insulated_faces();
    let mut skip = vec![false; problem.mesh.num_edges()];
    for (f, &ins) in insulated.iter().enumerate() {
        if ins {
            for &e in incidence.c.row(f).0 {
                skip[e] = true;
            }
        }
    }
    let curl = incidence.c.transpose().matvec(e_tilde).expect("dimensions match");
    curl.iter().zip(&skip).filter(|(_, &s)| !s).map(|(v, _)| v.abs()).fold(0.0, f64::max)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn solve_dsp(problem: &ConductionProblem, opts: &SolveOptions) -> Result<SolveResult, SolverError> {
    solve_dsp_with(problem, &Discretization::new(&problem.mesh), opts)
}

/// DSP solve. CG is restarted from its last iterate with a tenfold tighter
/// tolerance until `‖D J‖∞ ≤ tol ‖J‖∞` and the current and energy
/// conductances agree to `tol`, or no further progress is possible.
pub fn solve_dsp_with(
    problem: &ConductionProblem,
    disc: &Discretization,
    opts: &SolveOptions,
) -> Result<SolveResult, SolverError> {
    let mesh = &problem.mesh;
    let sys = dsp_system(problem, disc, opts)?;
    let n = mesh.num_cells();
    let max_iter = opts.max_iter.unwrap_or(20 * n.max(1));
    let u = problem.applied_voltage();
    let el1: Vec<usize> =
        mesh.boundary_faces().filter(|&f| problem.face_kind(f) == Some(BoundaryKind::Electrode(1))).collect();
    let evaluate = |x: &[f64]| -> Result<(Vec<f64>, Vec<f64>, f64, f64, bool), SolverError> {
        let dtu = sys.divergence.transpose().matvec(x)?;
        let e_tilde: Vec<f64> = dtu.iter().zip(&sys.source).map(|(a, b)| a + b).collect();
        let j = sys.mass.matvec(&e_tilde)?;
        let dj = sys.divergence.matvec(&j)?;
        let power: f64 = e_tilde.iter().zip(&j).map(|(a, b)| a * b).sum();
        let current: f64 = -el1.iter().map(|&f| disc.incidence.d.get(mesh.face_cells(f).0, f) * j[f]).sum::<f64>();
        let conserved = inf_norm(&dj) <= opts.tol * inf_norm(&j);
        let g = current / u;
        let gp = power / (u * u);
        let agree = u == 0.0 || (g - gp).abs() <= opts.tol * g.abs().max(gp.abs());
        Ok((e_tilde, j, power, current, conserved && agree))
    };

    let mut out = pcg(&sys.matrix, &sys.rhs, None, opts.tol, max_iter);
    if !out.converged {
        return Err(SolverError::NotConverged { iterations: out.iterations, residual: out.relative_residual });
    }
    let mut iterations = out.iterations;
    let mut state = evaluate(&out.x)?;
    let mut tol = opts.tol;
    while !state.4 && tol > 1e-15 {
        tol /= 10.0;
        let next = pcg(&sys.matrix, &sys.rhs, Some(&out.x), tol, max_iter);
        iterations += next.iterations;
        if next.iterations == 0 || next.relative_residual >= out.relative_residual {
            break;
        }
        out = next;
        state = evaluate(&out.x)?;
    }
    let (e_tilde, j, power, current, _) = state;
    let dofs = DofArrays {
        cell_potentials: out.x,
        dual_edge_voltages: e_tilde,
        face_currents: j,
        source_voltages: sys.source,
        ..Default::default()
    };
    let (cell_e, cell_j) = reconstruct_cell_fields(Formulation::Dsp, &dofs, problem, &disc.dual);
    Ok(SolveResult {
        formulation: Formulation::Dsp,
        dofs,
        cell_e,
        cell_j,
        power,
        current,
        conductance: current / u,
        conductance_power: power / (u * u),
        iterations,
        residual: out.relative_residual,
        strategies: sys.strategies,
    })
}

pub fn solve_sp(problem: &ConductionProblem, opts: &SolveOptions) -> Result<SolveResult, SolverError> {
    solve_sp_with(problem, &Discretization::new(&problem.mesh), opts)
}

/// Nodal stiffness `Gᵀ M^E G` and its mass matrix.
pub fn sp_stiffness(
    problem: &ConductionProblem,
    disc: &Discretization,
    stab: &Stabilization,
) -> Result<(SparseMatrix, SparseMatrix), SolverError> {
    let me = assemble_mass_e(&problem.mesh, &disc.dual, &problem.sigma, stab)?;
    let g = &disc.incidence.g;
    let a = triple_product(&g.transpose(), &me, g)?;
    Ok((a, me))
}

pub fn solve_sp_with(
    problem: &ConductionProblem,
    disc: &Discretization,
    opts: &SolveOptions,
) -> Result<SolveResult, SolverError> {
    let mesh = &problem.mesh;
    let (a, me) = sp_stiffness(problem, disc, &opts.stabilization)?;
    let fixed = problem.electrode_node_voltages()?;
    let owner = problem.electrode_nodes()?;
    let mut map = vec![usize::MAX; mesh.num_nodes()];
    let mut free = Vec::new();
    for (nidx, f) in fixed.iter().enumerate() {
        if f.is_none() {
            map[nidx] = free.len();
            free.push(nidx);
        }
    }
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; free.len()];
    for (i, &ni) in free.iter().enumerate() {
        let (cols, vals) = a.row(ni);
        for (&nj, &v) in cols.iter().zip(vals) {
            match fixed[nj] {
                Some(vj) => rhs[i] -= v * vj,
                None => triplets.push((i, map[nj], v)),
            }
        }
    }
    let reduced = SparseMatrix::from_triplets(free.len(), free.len(), triplets)?;
    let max_iter = opts.max_iter.unwrap_or(20 * free.len().max(1));
    let out = pcg(&reduced, &rhs, None, opts.tol, max_iter);
    if !out.converged {
        return Err(SolverError::NotConverged { iterations: out.iterations, residual: out.relative_residual });
    }
    let potentials: Vec<f64> =
        (0..mesh.num_nodes()).map(|n| fixed[n].unwrap_or_else(|| out.x[map[n]])).collect();
    let au = a.matvec(&potentials)?;
    let current: f64 = (0..mesh.num_nodes()).filter(|&n| owner[n] == Some(1)).map(|n| au[n]).sum();
    let power: f64 = potentials.iter().zip(&au).map(|(x, y)| x * y).sum();
    let edge_voltages: Vec<f64> = disc.incidence.g.matvec(&potentials)?.into_iter().map(|v| -v).collect();
    let dual_face_currents = me.matvec(&edge_voltages)?;
    let dofs = DofArrays { node_potentials: potentials, edge_voltages, dual_face_currents, ..Default::default() };
    let (cell_e, cell_j) = reconstruct_cell_fields(Formulation::Sp, &dofs, problem, &disc.dual);
    let u = problem.applied_voltage();
    Ok(SolveResult {
        formulation: Formulation::Sp,
        dofs,
        cell_e,
        cell_j,
        power,
        current,
        conductance: current / u,
        conductance_power: power / (u * u),
        iterations: out.iterations,
        residual: out.relative_residual,
        strategies: Vec::new(),
    })
}

pub fn solve(problem: &ConductionProblem, formulation: Formulation, opts: &SolveOptions) -> Result<SolveResult, SolverError> {
    match formulation {
        Formulation::Sp => solve_sp(problem, opts),
        Formulation::Dsp => solve_dsp(problem, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::double_tet;
    use nalgebra::DVector;

    fn double_tet_problem() -> ConductionProblem {
        // electrode 0 on the bottom face pair of cell 1, electrode 1 on the top
        let mut m = double_tet();
        m.set_boundary_tags(&[([0, 1, 4], 1), ([0, 1, 3], 2)]).unwrap();
        ConductionProblem::new(m, vec![MaterialTensor::identity(); 2], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn dsp_matches_dense_oracle_on_two_cells() {
        let p = double_tet_problem();
        let disc = Discretization::new(&p.mesh);
        let opts = SolveOptions::default();
        let sys = dsp_system(&p, &disc, &opts).unwrap();
        let dense = sys.matrix.to_dense();
        assert_eq!(dense.shape(), (2, 2));
        assert!(dense.clone().cholesky().is_some());
        let x = dense.lu().solve(&DVector::from_vec(sys.rhs.clone())).unwrap();
        let r = solve_dsp_with(&p, &disc, &opts).unwrap();
        for (a, b) in r.dofs.cell_potentials.iter().zip(x.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(r.power > 0.0);
        assert!((r.conductance - r.conductance_power).abs() < 1e-9 * r.conductance);
    }

    #[test]
    fn zero_excitation_gives_zero_solution() {
        let mut p = double_tet_problem();
        p.voltages = vec![0.0, 0.0];
        let r = solve_dsp(&p, &SolveOptions::default()).unwrap();
        assert!(r.dofs.cell_potentials.iter().all(|&u| u == 0.0));
        assert_eq!(dissipated_power(&r.dofs.dual_edge_voltages, &SparseMatrix::identity(p.mesh.num_faces())), 0.0);
    }

    #[test]
    fn source_voltages_live_on_electrode_one() {
        let p = double_tet_problem();
        let disc = Discretization::new(&p.mesh);
        let es = build_source_voltages(&p, &disc.incidence);
        let f = p.mesh.find_face([0, 1, 3]).unwrap();
        for (g, &v) in es.iter().enumerate() {
            if g == f {
                assert_eq!(v.abs(), 1.0);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn condensation_matches_dense_schur_complement() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let local = LocalMatrix { entities: vec![7, 2, 5], matrix: m.clone() };
        let mut insulated = vec![false; 8];
        insulated[2] = true;
        let s = condense_insulated(&local, &insulated).unwrap();
        assert_eq!(s.entities, vec![7, 5]);
        // oracle: the (0,0) entry of the inverse of the kept block of m⁻¹
        let inv = m.try_inverse().unwrap();
        let kept = DMatrix::from_row_slice(2, 2, &[inv[(0, 0)], inv[(0, 2)], inv[(2, 0)], inv[(2, 2)]]);
        let oracle = kept.try_inverse().unwrap();
        assert!((s.matrix - oracle).norm() < 1e-14);
    }

    #[test]
    fn problem_validation() {
        let m = double_tet();
        assert!(ConductionProblem::new(m.clone(), vec![MaterialTensor::identity(); 2], vec![0.0, 1.0]).is_err());
        assert!(ConductionProblem::new(m, vec![MaterialTensor::identity()], vec![0.0, 1.0]).is_err());
        // the two electrodes share nodes 0 and 1
        let p = double_tet_problem();
        assert!(matches!(solve_sp(&p, &SolveOptions::default()), Err(SolverError::InvalidProblem(_))));
    }
}
