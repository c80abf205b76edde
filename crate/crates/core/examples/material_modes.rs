//! Series and parallel two-material boxes under each material mode. Only
//! the piecewise and hybrid modes reproduce the exact conductances.

use sparse_hodge::bench::{cmd_patch_test, BenchmarkSpec, Geometry};
use sparse_hodge::hodge::MaterialMode;
use sparse_hodge::solver::{Formulation, SolveOptions};

fn main() {
    for g in [Geometry::SeriesBox, Geometry::ParallelBox] {
        println!("{g}: exact G = {:.6} S", g.analytic_conductance());
        let spec = BenchmarkSpec::new(g, 6).with_jitter(0.1, 3);
        for mode in [MaterialMode::Weighted, MaterialMode::Piecewise, MaterialMode::Hybrid] {
            let opts = SolveOptions { mode, tol: 1e-12, ..Default::default() };
            let r = cmd_patch_test(&spec, Formulation::Dsp, &opts).expect("solve");
            println!(
                "  {:<9} G = {:.10}  tangential E jump {:.1e}  normal J jump {:.1e}",
                mode.to_string(), r.conductance, r.tangential_e_jump, r.normal_j_jump
            );
        }
    }
}
