//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparse_hodge::assembly::GlobalOperators;
use sparse_hodge::bench::{
    cmd_patch_test, cmd_square_resistor, conductivity, generate_mesh, BenchmarkSpec, Geometry, PatchReport,
    SQUARE_RESISTOR_CONDUCTANCE,
};
use sparse_hodge::dualgeom::identities::{check_mesh, IdentityReport};
use sparse_hodge::dualgeom::DualGeometry;
use sparse_hodge::hodge::{
    consistent_term, local_inverse_mass_etilde, local_inverse_mass_ftilde, local_mass_e, local_mass_f,
    stabilization_term, LocalMatrix, MaterialMode, MaterialTensor, Stabilization,
};
use sparse_hodge::linalg::rows_to_matrix;
use sparse_hodge::mesh::fixtures::random_tet;
use sparse_hodge::mesh::{GeometricVectors, Point3, TetMesh};
use sparse_hodge::solver::{
    circuital_residual, dsp_system, solve_dsp_with, ConductionProblem, Discretization, Formulation, SolveOptions,
    SolveResult,
};

use common::{dense_operators, inf_norm, random_spd, relative_entry_error};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const GEOMETRY_FAMILIES: [&str; 10] = [
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
];
const BARYCENTRIC_FAMILIES: [&str; 4] =
    ["restricted_volume", "restricted_edge", "restricted_face", "dual_volume_partition"];

fn benchmark_meshes() -> Vec<(String, TetMesh)> {
    let mut out = Vec::new();
    for g in [Geometry::UnitBox, Geometry::SeriesBox, Geometry::ParallelBox] {
        for (level, jitter) in [(1, 0.0), (2, 0.0), (4, 0.0), (4, 0.1), (6, 0.1)] {
            let spec = BenchmarkSpec::new(g, level).with_jitter(jitter, 11);
            out.push((format!("{g}:{level}:{jitter}"), generate_mesh(&spec).unwrap()));
        }
    }
    for level in 1..=2 {
        let spec = BenchmarkSpec::new(Geometry::SquareResistorEighth, level);
        out.push((format!("square_resistor_eighth:{level}"), generate_mesh(&spec).unwrap()));
    }
    out
}

fn random_tet_report(count: usize) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut report = IdentityReport::default();
    let mut first = true;
    for _ in 0..count {
        let r = check_mesh(&random_tet(&mut rng, 1e-3));
        if first {
            report = r;
            first = false;
        } else {
            report.merge(&r);
        }
    }
    report
}

fn worst_of(report: &IdentityReport, families: &[&str]) -> (f64, String) {
    families
        .iter()
        .filter_map(|f| report.get(f))
        .filter(|e| e.checked > 0)
        .map(|e| (e.worst, format!("{} at {}", e.name, e.location)))
        .fold((0.0, String::from("-")), |a, b| if b.0 > a.0 { b } else { a })
}

fn criterion_1_and_2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut report = random_tet_report(1000);
    let random_worst = worst_of(&report, &GEOMETRY_FAMILIES);
    for (_, mesh) in benchmark_meshes() {
        report.merge(&check_mesh(&mesh));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let (worst, at) = worst_of(&report, &GEOMETRY_FAMILIES);
    let all_checked = GEOMETRY_FAMILIES.iter().all(|f| report.get(f).unwrap().checked > 0);
    let c1 = outcome(
        worst < 1e-10 && all_checked && elapsed < 10.0,
        format!(
            "worst relative residual {worst:.2e} ({at}); random tets alone {:.2e}; {elapsed:.2} s",
            random_worst.0
        ),
    );
    let (worst, at) = worst_of(&report, &BARYCENTRIC_FAMILIES);
    let c2 = outcome(worst < 1e-13, format!("worst relative residual {worst:.2e} ({at})"));
    (c1, c2)
}

fn project(rows: &[Point3], u: &Point3) -> DVector<f64> {
    DVector::from_iterator(rows.len(), rows.iter().map(|r| r.dot(u)))
}

struct LocalCheck {
    symmetric: bool,
    cholesky: bool,
    consistency: f64,
    annihilation: f64,
}

fn check_local(local: &LocalMatrix, from: &[Point3], to: &[Point3], rows: &[Point3], k: &MaterialTensor, volume: f64, u: &Point3) -> LocalCheck {
    let lhs = &local.matrix * project(from, u);
    let rhs = project(to, &(k.matrix() * u));
    let consistent = consistent_term(rows, k.matrix(), volume);
    let stab = stabilization_term(from, &consistent, &Stabilization::default(), "check").unwrap();
    let q = rows_to_matrix(from);
    LocalCheck {
        symmetric: local.matrix == local.matrix.transpose(),
        cholesky: local.matrix.clone().cholesky().is_some(),
        consistency: (lhs - &rhs).norm() / rhs.norm(),
        annihilation: (&stab * &q).norm() / (stab.norm() * q.norm()),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let stab = Stabilization::default();
    let (mut sym, mut chol) = (true, true);
    let (mut cons, mut ann) = (0.0f64, 0.0f64);
    for sample in 0..100 {
        let k = random_spd(&mut rng);
        let u = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let tet = random_tet(&mut rng, 1e-3);
        let dual = DualGeometry::new(&tet, &GeometricVectors::new(&tet));
        let c = &dual.cells[0];
        let mut checks = vec![
            check_local(&local_mass_f(c, &k, &stab).unwrap(), &c.face_vecs, &c.dual_edges, &c.dual_edges, &k, c.volume, &u),
            check_local(&local_mass_e(c, &k, &stab).unwrap(), &c.edge_vecs, &c.dual_faces, &c.dual_faces, &k, c.volume, &u),
        ];
        let spec = BenchmarkSpec::new(Geometry::UnitBox, 3).with_jitter(0.15, sample);
        let mesh = generate_mesh(&spec).unwrap();
        let dual = DualGeometry::new(&mesh, &GeometricVectors::new(&mesh));
        let dc = &dual.dual_cells[rng.gen_range(0..mesh.num_nodes())];
        let faces = dc.augmented_dual_faces();
        let edges = dc.augmented_dual_edges();
        checks.push(check_local(&local_inverse_mass_ftilde(dc, &k, &stab).unwrap(), &faces, &dc.half_edges, &dc.half_edges, &k, dc.volume, &u));
        checks.push(check_local(&local_inverse_mass_etilde(dc, &k, &stab).unwrap(), &edges, &dc.third_faces, &dc.third_faces, &k, dc.volume, &u));
        for ch in checks {
            sym &= ch.symmetric;
            chol &= ch.cholesky;
            cons = cons.max(ch.consistency);
            ann = ann.max(ch.annihilation);
        }
    }
    outcome(
        sym && chol && cons < 1e-12 && ann < 1e-13,
        format!("symmetric {sym}, cholesky {chol}, consistency {cons:.2e}, annihilation {ann:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_op: f64 = 0.0;
    let mut worst_solve: f64 = 0.0;
    let mut largest = 0;
    let specs = [
        BenchmarkSpec::new(Geometry::UnitBox, 2).with_jitter(0.1, 4),
        BenchmarkSpec::new(Geometry::SeriesBox, 2).with_jitter(0.1, 5),
        BenchmarkSpec::new(Geometry::ParallelBox, 2),
        BenchmarkSpec::new(Geometry::UnitBox, 3),
    ];
    for spec in &specs {
        let mesh = generate_mesh(spec).unwrap();
        largest = largest.max(mesh.num_cells());
        let sigma = conductivity(&mesh);
        let disc = Discretization::new(&mesh);
        let ops = GlobalOperators::new(&mesh, &disc.dual, &sigma, MaterialMode::Hybrid, &Stabilization::default()).unwrap();
        let dense = dense_operators(&mesh, &sigma);
        for (s, d) in [(&ops.me, &dense.me), (&ops.mf, &dense.mf), (&ops.met, &dense.met), (&ops.mft, &dense.mft)] {
            worst_op = worst_op.max(relative_entry_error(&s.to_dense(), d));
        }
        let problem = ConductionProblem::new(mesh, sigma, vec![0.0, 1.0]).unwrap();
        let opts = SolveOptions::default();
        let sys = dsp_system(&problem, &disc, &opts).unwrap();
        let x: DMatrix<f64> = sys.matrix.to_dense();
        let direct = x.cholesky().unwrap().solve(&DVector::from_vec(sys.rhs.clone()));
        let cg = solve_dsp_with(&problem, &disc, &opts).unwrap();
        let diff = cg.dofs.cell_potentials.iter().zip(direct.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_solve = worst_solve.max(diff);
    }
    outcome(
        largest <= 200 && worst_op < 1e-14 && worst_solve < 1e-9,
        format!("operators vs dense oracle {worst_op:.2e}, DSP CG vs dense solve {worst_solve:.2e}, up to {largest} cells"),
    )
}

fn criterion_5() -> Outcome {
    let mut rows = Vec::new();
    let mut max_local = 0;
    for level in [4, 8, 16, 32] {
        let mesh = generate_mesh(&BenchmarkSpec::new(Geometry::UnitBox, level)).unwrap();
        let sigma = conductivity(&mesh);
        let dual = DualGeometry::new(&mesh, &GeometricVectors::new(&mesh));
        let ops = GlobalOperators::new(&mesh, &dual, &sigma, MaterialMode::Hybrid, &Stabilization::default()).unwrap();
        max_local = max_local.max(dual.dual_cells.iter().map(|d| d.faces.len()).max().unwrap());
        rows.push((
            level,
            ops.met.nnz() as f64 / mesh.num_faces() as f64,
            ops.mft.nnz() as f64 / mesh.num_edges() as f64,
        ));
    }
    let [(_, a1, b1), (_, a2, b2)] = [rows[rows.len() - 2], rows[rows.len() - 1]];
    let var_e = (a2 - a1).abs() / a1;
    let var_f = (b2 - b1).abs() / b1;
    let ratios: Vec<String> = rows.iter().map(|(l, a, b)| format!("l{l}: {a:.2}/{b:.2}")).collect();
    outcome(
        var_e < 0.1 && var_f < 0.1,
        format!(
            "nnz per entity (M^Ẽ/M^F̃) {}; last-level change {:.1}% / {:.1}%; largest dense block inverted is local, order {max_local}",
            ratios.join(", "),
            var_e * 100.0,
            var_f * 100.0
        ),
    )
}

fn dsp_invariants(report: &PatchReport, problem_spec: &BenchmarkSpec, tol: f64, worst: &mut (f64, f64, f64)) {
    if report.formulation != Formulation::Dsp {
        return;
    }
    let mesh = generate_mesh(problem_spec).unwrap();
    let problem = ConductionProblem::new(mesh.clone(), conductivity(&mesh), vec![0.0, problem_spec.voltage]).unwrap();
    let disc = Discretization::new(&mesh);
    record_invariants(&problem, &disc, &report.result, tol, worst);
}

fn record_invariants(problem: &ConductionProblem, disc: &Discretization, r: &SolveResult, tol: f64, worst: &mut (f64, f64, f64)) {
    let j = &r.dofs.face_currents;
    let dj = disc.incidence.d.matvec(j).unwrap();
    let e = &r.dofs.dual_edge_voltages;
    worst.0 = worst.0.max(inf_norm(&dj) / (tol * inf_norm(j)));
    worst.1 = worst.1.max(circuital_residual(problem, &disc.incidence, e) / inf_norm(e));
    worst.2 = worst.2.max((r.conductance - r.conductance_power).abs() / (tol * r.conductance));
}

fn criterion_6(inv: &mut (f64, f64, f64)) -> Outcome {
    let start = Instant::now();
    let opts = SolveOptions { tol: 1e-12, ..Default::default() };
    let mut dev: f64 = 0.0;
    let mut gerr: f64 = 0.0;
    for seed in [1, 2] {
        let spec = BenchmarkSpec::new(Geometry::UnitBox, 8).with_jitter(0.1, seed);
        for f in [Formulation::Sp, Formulation::Dsp] {
            let r = cmd_patch_test(&spec, f, &opts).unwrap();
            dev = dev.max(r.potential_deviation);
            gerr = gerr.max((r.conductance - 1.0).abs());
            dsp_invariants(&r, &spec, opts.tol, inv);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        dev < 1e-9 && gerr < 1e-9 && elapsed < 5.0,
        format!("max potential deviation {dev:.2e}, |G - 1| {gerr:.2e}, jittered l=8 (3072 cells), {elapsed:.2} s"),
    )
}

fn criterion_7(inv: &mut (f64, f64, f64)) -> Outcome {
    let opts_for = |mode| SolveOptions { tol: 1e-12, mode, ..Default::default() };
    let mut lines = Vec::new();
    let mut pass = true;
    for g in [Geometry::SeriesBox, Geometry::ParallelBox] {
        for mode in [MaterialMode::Hybrid, MaterialMode::Piecewise] {
            let spec = BenchmarkSpec::new(g, 6).with_jitter(0.1, 9);
            let opts = opts_for(mode);
            let r = cmd_patch_test(&spec, Formulation::Dsp, &opts).unwrap();
            dsp_invariants(&r, &spec, opts.tol, inv);
            let gerr = (r.conductance - g.analytic_conductance()).abs();
            let jump = r.tangential_e_jump.max(r.normal_j_jump);
            pass &= gerr < 1e-9 && jump < 1e-9 && r.potential_deviation < 1e-9;
            lines.push(format!("{g}/{mode} G={:.10} jump {jump:.1e}", r.conductance));
        }
    }
    outcome(pass, lines.join("; "))
}

fn criterion_8(inv: &mut (f64, f64, f64)) -> Outcome {
    let start = Instant::now();
    let opts = SolveOptions::default();
    let rows = cmd_square_resistor(4, &[Formulation::Sp, Formulation::Dsp], &opts).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let dsp: Vec<_> = rows.iter().filter(|r| r.formulation == Formulation::Dsp).collect();
    let sp: Vec<_> = rows.iter().filter(|r| r.formulation == Formulation::Sp).collect();
    let decreasing = dsp.windows(2).all(|w| w[1].relative_error < w[0].relative_error);
    let finest = dsp.last().unwrap();
    let bound = sp.iter().all(|r| r.conductance >= SQUARE_RESISTOR_CONDUCTANCE);
    let spec = BenchmarkSpec::new(Geometry::SquareResistorEighth, 2);
    let mesh = generate_mesh(&spec).unwrap();
    let problem = ConductionProblem::new(mesh.clone(), conductivity(&mesh), vec![0.0, 1.0]).unwrap();
    let disc = Discretization::new(&mesh);
    let r = solve_dsp_with(&problem, &disc, &opts).unwrap();
    record_invariants(&problem, &disc, &r, opts.tol, inv);
    let g_dsp: Vec<String> = dsp.iter().map(|r| format!("{:.5}", r.conductance)).collect();
    let g_sp: Vec<String> = sp.iter().map(|r| format!("{:.5}", r.conductance)).collect();
    outcome(
        decreasing && finest.relative_error < 0.02 && bound && elapsed < 60.0,
        format!(
            "G_DSP [{}], G_SP [{}], finest {} cells at {:.2}% error, {elapsed:.1} s",
            g_dsp.join(", "),
            g_sp.join(", "),
            finest.cells,
            finest.relative_error * 100.0
        ),
    )
}

fn main() -> ExitCode {
    let mut inv = (0.0, 0.0, 0.0);
    let (c1, c2) = criterion_1_and_2();
    let c3 = criterion_3();
    let c4 = criterion_4();
    let c5 = criterion_5();
    let c6 = criterion_6(&mut inv);
    let c7 = criterion_7(&mut inv);
    let c8 = criterion_8(&mut inv);
    let c9 = outcome(
        inv.0 <= 10.0 && inv.1 <= 1e-12 && inv.2 <= 10.0,
        format!(
            "max ‖DJ‖∞/(tol‖J‖∞) {:.2}, max ‖CᵀẼ‖∞/‖Ẽ‖∞ {:.2e}, max |G-G_P|/(tol G) {:.2}",
            inv.0, inv.1, inv.2
        ),
    );
    let names = [
        "geometric identities",
        "barycentric facts",
        "local matrix properties",
        "oracle equivalence",
        "sparsity",
        "patch test",
        "multi-material patch tests",
        "square resistor",
        "conservation and circuital invariants",
    ];
    let all = [c1, c2, c3, c4, c5, c6, c7, c8, c9];
    let mut failed = 0;
    for (i, (name, o)) in names.iter().zip(&all).enumerate() {
        println!("criterion {} [{}] {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", all.len() - failed, all.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
