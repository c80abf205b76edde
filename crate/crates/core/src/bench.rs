//! Benchmark meshes and the studies run by the command-line tool.
//!
//! All meshes are structured hexahedral lattices with every hexahedron cut
//! into six tetrahedra around its main diagonal, so neighbouring hexahedra
//! share conforming faces. Boundary tags follow the solver convention:
//! `0` insulated, `1` electrode 0 (0 V), `2` electrode 1 (`voltage`).

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dualgeom::identities::{check_mesh, IdentityReport};
use crate::hodge::{MaterialMode, MaterialTensor};
use crate::mesh::{MeshError, Point3, TetMesh};
use crate::solver::{
    solve_dsp_with, solve_sp_with, ConductionProblem, Discretization, Formulation, SolveOptions, SolveResult,
    SolverError,
};

/// Analytic conductance of the full square resistor (S).
pub const SQUARE_RESISTOR_CONDUCTANCE: f64 = 10.23409256;

/// The one-eighth model carries an eighth of the total current: the
/// resistor is cut by two vertical symmetry planes into four quarters in
/// parallel and by its mid-height plane into two halves in parallel.
pub const SQUARE_RESISTOR_SYMMETRY_FACTOR: f64 = 8.0;

const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Unit cube, electrodes on `x = 0` and `x = 1`, `σ = 1`.
    UnitBox,
    /// Unit cube with `σ = 1` for `x < 1/2` and `σ = 2` for `x > 1/2`.
    SeriesBox,
    /// Unit cube with `σ = 1` for `y < 1/2` and `σ = 2` for `y > 1/2`.
    ParallelBox,
    /// One eighth of the square resistor: the L-shaped quarter
    /// `[0,2]² \ [0,1)²` of the cross-section times `z ∈ [0, 1/2]`.
    SquareResistorEighth,
}

impl Geometry {
    pub const ALL: [Geometry; 4] =
        [Geometry::UnitBox, Geometry::SeriesBox, Geometry::ParallelBox, Geometry::SquareResistorEighth];

    /// Exact conductance of the full device (S) at 1 V.
    pub fn analytic_conductance(self) -> f64 {
        match self {
            Geometry::UnitBox => 1.0,
            Geometry::SeriesBox => 1.0 / (0.5 / 1.0 + 0.5 / 2.0),
            Geometry::ParallelBox => (1.0 + 2.0) / 2.0,
            Geometry::SquareResistorEighth => SQUARE_RESISTOR_CONDUCTANCE,
        }
    }

    /// Factor from the modelled domain to the full device.
    pub fn symmetry_factor(self) -> f64 {
        match self {
            Geometry::SquareResistorEighth => SQUARE_RESISTOR_SYMMETRY_FACTOR,
            _ => 1.0,
        }
    }
}

impl FromStr for Geometry {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit_box" | "uniform" => Ok(Geometry::UnitBox),
            "series_box" | "series" => Ok(Geometry::SeriesBox),
            "parallel_box" | "parallel" => Ok(Geometry::ParallelBox),
            "square_resistor_eighth" | "resistor" => Ok(Geometry::SquareResistorEighth),
            _ => Err(format!(
                "unknown geometry '{s}' (expected unit_box, series_box, parallel_box or square_resistor_eighth)"
            )),
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::UnitBox => "unit_box",
            Geometry::SeriesBox => "series_box",
            Geometry::ParallelBox => "parallel_box",
            Geometry::SquareResistorEighth => "square_resistor_eighth",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub geometry: Geometry,
    /// Refinement level, at least 1.
    pub level: usize,
    /// Interior node perturbation as a fraction of the lattice spacing.
    pub jitter: f64,
    pub seed: u64,
    /// Voltage of electrode 1 (V).
    pub voltage: f64,
}

impl BenchmarkSpec {
    pub fn new(geometry: Geometry, level: usize) -> Self {
        Self { geometry, level, jitter: 0.0, seed: 0, voltage: 1.0 }
    }

    pub fn with_jitter(mut self, jitter: f64, seed: u64) -> Self {
        self.jitter = jitter;
        self.seed = seed;
        self
    }

    /// Lattice subdivisions along x, y and z.
    pub fn divisions(&self) -> [usize; 3] {
        let l = self.level.max(1);
        match self.geometry {
            Geometry::UnitBox => [l; 3],
            Geometry::SeriesBox | Geometry::ParallelBox => [2 * l.div_ceil(2); 3],
            Geometry::SquareResistorEighth => {
                let n = resistor_resolution(l);
                [2 * n, 2 * n, n.div_ceil(2)]
            }
        }
    }

    /// Lattice spacing along x.
    pub fn spacing(&self) -> f64 {
        let extent = if self.geometry == Geometry::SquareResistorEighth { 2.0 } else { 1.0 };
        extent / self.divisions()[0] as f64
    }
}

impl FromStr for BenchmarkSpec {
    type Err = String;
    /// `geometry[:level[:jitter]]`, e.g. `unit_box:4:0.1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let geometry: Geometry = parts.next().unwrap_or_default().parse()?;
        let level = match parts.next() {
            Some(p) => p.parse::<usize>().map_err(|e| format!("bad level '{p}': {e}"))?,
            None => 1,
        };
        if level == 0 {
            return Err("level must be at least 1".into());
        }
        let jitter = match parts.next() {
            Some(p) => p.parse::<f64>().map_err(|e| format!("bad jitter '{p}': {e}"))?,
            None => 0.0,
        };
        if !(0.0..0.25).contains(&jitter) {
            return Err(format!("jitter {jitter} must lie in [0, 0.25)"));
        }
        if parts.next().is_some() {
            return Err(format!("too many fields in '{s}' (expected geometry[:level[:jitter]])"));
        }
        Ok(BenchmarkSpec { jitter, ..BenchmarkSpec::new(geometry, level) })
    }
}

/// Lattice cells per metre of the square resistor at a refinement level:
/// 3, 6, 12, 24, ... giving about `9 n³` tetrahedra.
pub fn resistor_resolution(level: usize) -> usize {
    3 << (level.max(1) - 1)
}

/// Builds a Kuhn-split lattice over `[0, size]` with `n` divisions per
/// axis, keeping the hexahedra whose centre satisfies `keep`.
pub fn kuhn_lattice(n: [usize; 3], size: [f64; 3], keep: impl Fn(&Point3) -> bool) -> Result<TetMesh, MeshError> {
    let h = [size[0] / n[0] as f64, size[1] / n[1] as f64, size[2] / n[2] as f64];
    let id = |i: usize, j: usize, k: usize| i + (n[0] + 1) * (j + (n[1] + 1) * k);
    let mut cells = Vec::new();
    const AXES: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let centre = Point3::new((i as f64 + 0.5) * h[0], (j as f64 + 0.5) * h[1], (k as f64 + 0.5) * h[2]);
                if !keep(&centre) {
                    continue;
                }
                for perm in AXES {
                    let mut d = [0usize; 3];
                    let mut tet = [id(i, j, k); 4];
                    for (slot, &axis) in perm.iter().take(2).enumerate() {
                        d[axis] = 1;
                        tet[slot + 1] = id(i + d[0], j + d[1], k + d[2]);
                    }
                    tet[3] = id(i + 1, j + 1, k + 1);
                    cells.push(tet);
                }
            }
        }
    }
    let total = (n[0] + 1) * (n[1] + 1) * (n[2] + 1);
    let mut remap = vec![usize::MAX; total];
    let mut nodes = Vec::new();
    for cell in &mut cells {
        for v in cell.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = nodes.len();
                let (i, rest) = (*v % (n[0] + 1), *v / (n[0] + 1));
                let (j, k) = (rest % (n[1] + 1), rest / (n[1] + 1));
                nodes.push(Point3::new(i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]));
            }
            *v = remap[*v];
        }
    }
    let tags = vec![1; cells.len()];
    TetMesh::new(nodes, cells, tags)
}

fn face_centroid(mesh: &TetMesh, f: usize) -> Point3 {
    let [a, b, c] = mesh.faces()[f];
    (mesh.nodes()[a] + mesh.nodes()[b] + mesh.nodes()[c]) / 3.0
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < GEOM_TOL
}

/// Generates the tagged benchmark mesh, jittered if requested.
pub fn generate_mesh(spec: &BenchmarkSpec) -> Result<TetMesh, MeshError> {
    let n = spec.divisions();
    let mut mesh = match spec.geometry {
        Geometry::SquareResistorEighth => {
            kuhn_lattice(n, [2.0, 2.0, 0.5], |c| !(c.x < 1.0 && c.y < 1.0))?
        }
        _ => kuhn_lattice(n, [1.0; 3], |_| true)?,
    };
    for c in 0..mesh.num_cells() {
        let [a, b, cc, d] = mesh.cells()[c];
        let x = &mesh.nodes();
        let centre = (x[a] + x[b] + x[cc] + x[d]) * 0.25;
        let tag = match spec.geometry {
            Geometry::SeriesBox if centre.x > 0.5 => 2,
            Geometry::ParallelBox if centre.y > 0.5 => 2,
            _ => 1,
        };
        mesh.set_cell_tag(c, tag);
    }
    let boundary: Vec<usize> = mesh.boundary_faces().collect();
    for f in boundary {
        let p = face_centroid(&mesh, f);
        let tag = match spec.geometry {
            Geometry::SquareResistorEighth => {
                if (near(p.x, 1.0) && p.y < 1.0) || (near(p.y, 1.0) && p.x < 1.0) {
                    2
                } else if near(p.x, 2.0) || near(p.y, 2.0) {
                    1
                } else {
                    0
                }
            }
            _ => {
                if near(p.x, 0.0) {
                    1
                } else if near(p.x, 1.0) {
                    2
                } else {
                    0
                }
            }
        };
        mesh.set_face_tag(f, tag);
    }
    if spec.jitter > 0.0 {
        mesh = jitter(&mesh, spec)?;
    }
    Ok(mesh)
}

/// Moves interior nodes by up to `jitter · h` per coordinate. Nodes on a
/// material interface only move within the interface plane.
fn jitter(mesh: &TetMesh, spec: &BenchmarkSpec) -> Result<TetMesh, MeshError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let amp = spec.jitter * spec.spacing();
    let on_boundary = mesh.boundary_nodes();
    let nodes = mesh
        .nodes()
        .iter()
        .zip(&on_boundary)
        .map(|(p, &b)| {
            let mut d = Point3::new(rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp));
            if b {
                return *p;
            }
            match spec.geometry {
                Geometry::SeriesBox if near(p.x, 0.5) => d.x = 0.0,
                Geometry::ParallelBox if near(p.y, 0.5) => d.y = 0.0,
                _ => {}
            }
            p + d
        })
        .collect();
    mesh.with_nodes(nodes)
}

/// Conductivity per cell from the material tags.
pub fn conductivity(mesh: &TetMesh) -> Vec<MaterialTensor> {
    mesh.cell_tags().iter().map(|&t| MaterialTensor::scalar(if t == 2 { 2.0 } else { 1.0 })).collect()
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Invalid(String),
}

pub fn build_problem(spec: &BenchmarkSpec) -> Result<ConductionProblem, BenchError> {
    let mesh = generate_mesh(spec)?;
    let sigma = conductivity(&mesh);
    Ok(ConductionProblem::new(mesh, sigma, vec![0.0, spec.voltage])?)
}

/// Identity suite on a mesh.
pub fn cmd_check_identities(mesh: &TetMesh) -> IdentityReport {
    check_mesh(mesh)
}

/// Exact potential of the box patch tests at `p` for 1 V.
pub fn patch_potential(geometry: Geometry, p: &Point3) -> f64 {
    match geometry {
        Geometry::SeriesBox => {
            if p.x <= 0.5 {
                p.x * 4.0 / 3.0
            } else {
                2.0 / 3.0 + (p.x - 0.5) * 2.0 / 3.0
            }
        }
        _ => p.x,
    }
}

/// Outcome of a patch test.
#[derive(Debug, Clone)]
pub struct PatchReport {
    pub geometry: Geometry,
    pub formulation: Formulation,
    pub mode: MaterialMode,
    pub cells: usize,
    pub conductance: f64,
    pub expected: f64,
    /// Largest deviation of the discrete potentials from the exact one (V).
    pub potential_deviation: f64,
    /// Largest deviation of the cell fields from the exact ones.
    pub field_deviation: f64,
    /// Largest jump of tangential E across the material interface.
    pub tangential_e_jump: f64,
    /// Largest jump of normal J across the material interface.
    pub normal_j_jump: f64,
    pub iterations: usize,
    pub result: SolveResult,
}

impl PatchReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.potential_deviation,
            self.field_deviation,
            self.tangential_e_jump,
            self.normal_j_jump,
            (self.conductance - self.expected).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() < tol
    }

    pub fn to_csv(&self, tol: f64) -> String {
        format!(
            "variant,formulation,material_mode,cells,G,G_expected,potential_dev,field_dev,tangential_E_jump,normal_J_jump,iterations,pass\n\
             {},{},{},{},{:.12},{:.12},{:.3e},{:.3e},{:.3e},{:.3e},{},{}\n",
            self.geometry,
            self.formulation,
            self.mode,
            self.cells,
            self.conductance,
            self.expected,
            self.potential_deviation,
            self.field_deviation,
            self.tangential_e_jump,
            self.normal_j_jump,
            self.iterations,
            if self.passes(tol) { "pass" } else { "fail" }
        )
    }
}

/// Runs a box patch test and compares against the exact solution.
pub fn cmd_patch_test(spec: &BenchmarkSpec, formulation: Formulation, opts: &SolveOptions) -> Result<PatchReport, BenchError> {
    if spec.geometry == Geometry::SquareResistorEighth {
        return Err(BenchError::Invalid("patch tests run on the box geometries only".into()));
    }
    let problem = build_problem(spec)?;
    let disc = Discretization::new(&problem.mesh);
    let result = match formulation {
        Formulation::Sp => solve_sp_with(&problem, &disc, opts)?,
        Formulation::Dsp => solve_dsp_with(&problem, &disc, opts)?,
    };
    let mesh = &problem.mesh;
    let u = spec.voltage;
    let exact = |p: &Point3| u * patch_potential(spec.geometry, p);
    let potential_deviation = match formulation {
        Formulation::Sp => mesh
            .nodes()
            .iter()
            .zip(&result.dofs.node_potentials)
            .map(|(p, v)| (v - exact(p)).abs())
            .fold(0.0, f64::max),
        Formulation::Dsp => disc
            .vectors
            .cell_barycenter
            .iter()
            .zip(&result.dofs.cell_potentials)
            .map(|(p, v)| (v - exact(p)).abs())
            .fold(0.0, f64::max),
    };
    let expected = spec.geometry.analytic_conductance() * u;
    let mut field_deviation: f64 = 0.0;
    for c in 0..mesh.num_cells() {
        let sigma = problem.sigma[c].matrix()[(0, 0)];
        let slope = match spec.geometry {
            Geometry::SeriesBox => expected / sigma,
            _ => u,
        };
        let e = Point3::new(-slope, 0.0, 0.0);
        field_deviation = field_deviation.max((result.cell_e[c] - e).amax()).max((result.cell_j[c] - e * sigma).amax());
    }
    let (mut tangential_e_jump, mut normal_j_jump) = (0.0f64, 0.0f64);
    for f in 0..mesh.num_faces() {
        let (c1, Some(c2)) = mesh.face_cells(f) else { continue };
        if mesh.cell_tag(c1) == mesh.cell_tag(c2) {
            continue;
        }
        let n = disc.vectors.face_vec[f].normalize();
        let de = result.cell_e[c1] - result.cell_e[c2];
        let dj = result.cell_j[c1] - result.cell_j[c2];
        tangential_e_jump = tangential_e_jump.max((de - n * n.dot(&de)).norm());
        normal_j_jump = normal_j_jump.max(n.dot(&dj).abs());
    }
    Ok(PatchReport {
        geometry: spec.geometry,
        formulation,
        mode: opts.mode,
        cells: mesh.num_cells(),
        conductance: result.conductance,
        expected,
        potential_deviation,
        field_deviation,
        tangential_e_jump,
        normal_j_jump,
        iterations: result.iterations,
        result,
    })
}

/// One line of the square-resistor study.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub level: usize,
    pub h: f64,
    pub cells: usize,
    pub formulation: Formulation,
    pub mode: MaterialMode,
    /// Conductance of the full resistor (S).
    pub conductance: f64,
    pub relative_error: f64,
    pub iterations: usize,
    /// Wall time of the solve in seconds.
    pub wall_time: f64,
}

pub fn report_csv(rows: &[ReportRow], timing: bool) -> String {
    let mut s = String::from("level,h,cells,formulation,material_mode,G,G_reference,relative_error,iterations");
    s.push_str(if timing { ",wall_time_s\n" } else { "\n" });
    for r in rows {
        let _ = write!(
            s,
            "{},{:.6},{},{},{},{:.8},{:.8},{:.6e},{}",
            r.level, r.h, r.cells, r.formulation, r.mode, r.conductance, SQUARE_RESISTOR_CONDUCTANCE, r.relative_error, r.iterations
        );
        if timing {
            let _ = write!(s, ",{:.3}", r.wall_time);
        }
        s.push('\n');
    }
    s
}

/// Square-resistor convergence study over levels `1..=levels`.
///
/// The total conductance is the one-eighth result times
/// [`SQUARE_RESISTOR_SYMMETRY_FACTOR`]. Rows are ordered by level, then by
/// the order of `formulations`.
pub fn cmd_square_resistor(
    levels: usize,
    formulations: &[Formulation],
    opts: &SolveOptions,
) -> Result<Vec<ReportRow>, BenchError> {
    if levels == 0 {
        return Err(BenchError::Invalid("levels must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for level in 1..=levels {
        let spec = BenchmarkSpec::new(Geometry::SquareResistorEighth, level);
        let problem = build_problem(&spec)?;
        let disc = Discretization::new(&problem.mesh);
        for &formulation in formulations {
            let start = Instant::now();
            let result = match formulation {
                Formulation::Sp => solve_sp_with(&problem, &disc, opts)?,
                Formulation::Dsp => solve_dsp_with(&problem, &disc, opts)?,
            };
            let g = result.conductance_power * SQUARE_RESISTOR_SYMMETRY_FACTOR;
            rows.push(ReportRow {
                level,
                h: spec.spacing(),
                cells: problem.mesh.num_cells(),
                formulation,
                mode: opts.mode,
                conductance: g,
                relative_error: (g - SQUARE_RESISTOR_CONDUCTANCE).abs() / SQUARE_RESISTOR_CONDUCTANCE,
                iterations: result.iterations,
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}
