//! `svem`: mesh generation, solves, convergence studies and operator dumps.

mod commands;
mod mesh_source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mesh_source::MeshArgs;

#[derive(Debug, Parser)]
#[command(name = "svem", version, about = "Serendipity virtual elements on polygonal meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a mesh of the unit square and write it as JSON.
    GenMesh {
        #[command(flatten)]
        generator: mesh_source::GeneratorArgs,
        /// Output file; the mesh goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one model problem and report the errors.
    Solve {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// poisson-quintic, variable-coeff or zero.
        #[arg(long, default_value = "poisson-quintic")]
        problem: String,
        /// Write the reduced matrix and right-hand side as Matrix Market files here.
        #[arg(long)]
        dump_system: Option<PathBuf>,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a convergence study over a mesh family.
    Convergence {
        /// A problem id or a preset (trapezoid-quintic, lloyd-variable).
        #[arg(long)]
        problem: String,
        /// square, trapezoid or voronoi; presets supply their own.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        lloyd: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        text: Option<PathBuf>,
    },
    /// Dump D, the serendipity projector and the L2 projector of every element.
    Inspect {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count degrees of freedom per strategy.
    Dofs {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// `all` or a comma-separated list of strategies.
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long)]
        theta0: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Polynomial degree, 1 to 8.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// original, lazy, stingy, stingy:<theta0> or fixed:<j>.
    #[arg(long, default_value = "stingy")]
    strategy: String,
    /// Collinearity tolerance for the stingy strategy.
    #[arg(long)]
    theta0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
