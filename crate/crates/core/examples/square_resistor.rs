//! Square-resistor convergence: SP approaches the reference from above and
//! DSP from below.

use sparse_hodge::bench::{cmd_square_resistor, report_csv, SQUARE_RESISTOR_CONDUCTANCE};
use sparse_hodge::solver::{Formulation, SolveOptions};

fn main() {
    let levels = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let rows = cmd_square_resistor(levels, &[Formulation::Sp, Formulation::Dsp], &SolveOptions::default()).expect("solve");
    println!("reference G = {SQUARE_RESISTOR_CONDUCTANCE} S");
    print!("{}", report_csv(&rows, true));
}
