use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_hodge::assembly::GlobalOperators;
use sparse_hodge::bench::{
    cmd_check_identities, cmd_patch_test, cmd_square_resistor, conductivity, generate_mesh, report_csv, BenchmarkSpec,
    Geometry,
};
use sparse_hodge::hodge::{MaterialMode, Stabilization};
use sparse_hodge::mesh::io::{load_mesh, write_simple, MeshFormat};
use sparse_hodge::mesh::{GeometricVectors, TetMesh};
use sparse_hodge::dualgeom::DualGeometry;
use sparse_hodge::solver::{Formulation, SolveOptions};

const IDENTITY_TOL: f64 = 1e-10;
const PATCH_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "sparse-hodge", version, about = "Sparse inverse mass matrices on barycentric dual grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for randomized meshes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct MeshSource {
    /// Mesh file (.msh for Gmsh 2.2 ASCII, anything else for the simple format).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Built-in mesh as geometry[:level[:jitter]], e.g. unit_box:4:0.1.
    #[arg(long = "gen")]
    generate: Option<BenchmarkSpec>,
}

impl MeshSource {
    fn load(&self, seed: u64) -> Result<TetMesh, String> {
        match (&self.mesh, &self.generate) {
            (Some(path), _) => load_mesh(path, MeshFormat::from_path(path)).map_err(|e| format!("{}: {e}", path.display())),
            (None, Some(spec)) => generate_mesh(&spec.clone().with_jitter(spec.jitter, seed)).map_err(|e| e.to_string()),
            (None, None) => Err("one of --mesh or --gen is required".into()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Me,
    Mf,
    Met,
    Mft,
}

#[derive(Subcommand)]
enum Command {
    /// Check every reconstruction identity and print the worst residuals as CSV.
    /// Exits nonzero if any relative residual reaches 1e-10.
    CheckIdentities {
        #[command(flatten)]
        source: MeshSource,
        #[command(flatten)]
        common: Common,
    },
    /// Run a uniform, series or parallel patch test and compare with the exact solution.
    PatchTest {
        #[arg(long, default_value = "uniform")]
        variant: Geometry,
        #[arg(long, default_value = "dsp")]
        formulation: Formulation,
        #[arg(long, default_value = "hybrid")]
        material_mode: MaterialMode,
        #[arg(long, default_value_t = 4)]
        level: usize,
        /// Interior node jitter as a fraction of the lattice spacing.
        #[arg(long, default_value_t = 0.1)]
        jitter: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Square-resistor convergence study.
    ///
    /// The one-eighth model (an L-shaped quarter of the cross-section, half
    /// the height) is solved with insulated symmetry planes. Four quarters and
    /// two halves conduct in parallel, so the reported conductance is eight
    /// times the modelled one. The reference value is 10.23409256 S.
    Resistor {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, value_delimiter = ',', default_value = "sp,dsp")]
        formulations: Vec<Formulation>,
        #[arg(long, default_value = "hybrid")]
        material_mode: MaterialMode,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Append a wall-time column (makes the output run dependent).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Export a global operator in 1-based coordinate format.
    ExportMatrix {
        #[arg(long)]
        which: Which,
        #[arg(long, default_value = "hybrid")]
        material_mode: MaterialMode,
        #[command(flatten)]
        source: MeshSource,
        #[command(flatten)]
        common: Common,
    },
    /// Write a built-in mesh in the simple format.
    Generate {
        #[arg(long = "gen")]
        generate: BenchmarkSpec,
        #[command(flatten)]
        common: Common,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match out {
        Some(p) => Ok(Box::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    sink(out)?.write_all(text.as_bytes()).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::CheckIdentities { source, common } => {
            let mesh = source.load(common.seed)?;
            let report = cmd_check_identities(&mesh);
            emit(&common.out, &report.to_csv())?;
            let failures = report.failures(IDENTITY_TOL);
            if failures.is_empty() {
                return Ok(ExitCode::SUCCESS);
            }
            for f in failures {
                eprintln!("identity {} fails: residual {:e} at {}", f.name, f.worst, f.location);
            }
            Ok(ExitCode::FAILURE)
        }
        Command::PatchTest { variant, formulation, material_mode, level, jitter, tol, common } => {
            if variant == Geometry::SquareResistorEighth {
                return Err("--variant must be uniform, series or parallel".into());
            }
            if level == 0 || !(0.0..0.25).contains(&jitter) {
                return Err("--level must be at least 1 and --jitter in [0, 0.25)".into());
            }
            let spec = BenchmarkSpec::new(variant, level).with_jitter(jitter, common.seed);
            let opts = SolveOptions { mode: material_mode, tol, ..Default::default() };
            let report = cmd_patch_test(&spec, formulation, &opts).map_err(|e| e.to_string())?;
            emit(&common.out, &report.to_csv(PATCH_TOL))?;
            Ok(if report.passes(PATCH_TOL) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Resistor { levels, formulations, material_mode, tol, timing, common } => {
            if levels == 0 || formulations.is_empty() {
                return Err("--levels must be at least 1 and --formulations non-empty".into());
            }
            let opts = SolveOptions { mode: material_mode, tol, ..Default::default() };
            let rows = cmd_square_resistor(levels, &formulations, &opts).map_err(|e| e.to_string())?;
            emit(&common.out, &report_csv(&rows, timing))?;
            let reference = Geometry::SquareResistorEighth.analytic_conductance();
            let mut ok = true;
            for r in rows.iter().filter(|r| r.formulation == Formulation::Sp) {
                if r.conductance < reference {
                    eprintln!("level {}: SP conductance {} is below the reference", r.level, r.conductance);
                    ok = false;
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::ExportMatrix { which, material_mode, source, common } => {
            let mesh = source.load(common.seed)?;
            let vectors = GeometricVectors::new(&mesh);
            let dual = DualGeometry::new(&mesh, &vectors);
            let sigma = conductivity(&mesh);
            let ops = GlobalOperators::new(&mesh, &dual, &sigma, material_mode, &Stabilization::default())
                .map_err(|e| e.to_string())?;
            let m = match which {
                Which::Me => &ops.me,
                Which::Mf => &ops.mf,
                Which::Met => &ops.met,
                Which::Mft => &ops.mft,
            };
            m.write_coordinate(sink(&common.out)?).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate { generate, common } => {
            let mesh = generate_mesh(&generate.clone().with_jitter(generate.jitter, common.seed)).map_err(|e| e.to_string())?;
            match &common.out {
                Some(p) => write_simple(&mesh, p).map_err(|e| e.to_string())?,
                None => emit(&None, &sparse_hodge::mesh::io::to_simple(&mesh))?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
