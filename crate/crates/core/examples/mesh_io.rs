//! Reads a small Gmsh 2.2 file, writes it in the simple format and solves a
//! conduction problem on it.

use sparse_hodge::bench::conductivity;
use sparse_hodge::mesh::io::{parse_msh2, parse_simple, to_simple};
use sparse_hodge::solver::{solve_dsp, ConductionProblem, SolveOptions};

const PRISM: &str = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
6
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
5 1 0 1
6 0 1 1
$EndNodes
$Elements
11
1 4 2 1 1 1 2 3 4
2 4 2 2 1 2 3 4 5
3 4 2 1 1 3 4 5 6
4 2 2 1 10 1 2 3
5 2 2 2 11 4 5 6
6 2 2 0 12 1 2 4
7 2 2 0 12 2 4 5
8 2 2 0 12 1 3 4
9 2 2 0 12 3 4 6
10 2 2 0 12 2 3 5
11 2 2 0 12 3 5 6
$EndElements
";

fn main() {
    let mesh = parse_msh2(PRISM).expect("valid msh");
    println!("read {} nodes and {} cells", mesh.num_nodes(), mesh.num_cells());
    let text = to_simple(&mesh);
    print!("{text}");
    let mesh = parse_simple(&text).expect("round trip");
    let sigma = conductivity(&mesh);
    let problem = ConductionProblem::new(mesh, sigma, vec![0.0, 1.0]).expect("two electrodes");
    let r = solve_dsp(&problem, &SolveOptions::default()).expect("solve");
    println!("prism with one sigma = 2 cell: G = {:.6} S, G from power = {:.6} S", r.conductance, r.conductance_power);
}
