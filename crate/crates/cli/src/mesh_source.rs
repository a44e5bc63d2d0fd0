use std::path::PathBuf;

use clap::Args;
use svem::experiments::{DEFAULT_LLOYD_ITERATIONS, DEFAULT_SEED, DEFAULT_SIGMA};
use svem::geometry::{gen_square_grid, gen_trapezoid_grid, gen_voronoi_lloyd, read_mesh, Mesh};

use crate::commands::Failure;

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    /// square, trapezoid or voronoi.
    #[arg(long)]
    pub family: Option<String>,
    /// Cells per side of the structured grids.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,
    /// Number of Voronoi cells.
    #[arg(long, default_value_t = 100)]
    pub cells: usize,
    /// Lloyd iterations for Voronoi meshes.
    #[arg(long, default_value_t = DEFAULT_LLOYD_ITERATIONS)]
    pub lloyd: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// A mesh file or a generator, exactly one of them.
#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, conflicts_with = "family")]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Square { n: usize },
    Trapezoid { n: usize, sigma: f64 },
    Voronoi { cells: usize, lloyd: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    File(PathBuf),
    Generated(Generator),
}

impl GeneratorArgs {
    pub fn validate(&self) -> Result<Generator, Failure> {
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Failure::config("a mesh family is required (--family square|trapezoid|voronoi)"))?;
        let generator = match family {
            "square" => Generator::Square { n: self.n },
            "trapezoid" => Generator::Trapezoid {
                n: self.n,
                sigma: self.sigma,
            },
            "voronoi" | "lloyd" => Generator::Voronoi {
                cells: self.cells,
                lloyd: self.lloyd,
                seed: self.seed,
            },
            other => return Err(Failure::config(format!("unknown mesh family `{other}`"))),
        };
        match generator {
            Generator::Square { n } | Generator::Trapezoid { n, .. } if n == 0 => {
                Err(Failure::config("--n must be at least 1"))
            }
            Generator::Trapezoid { sigma, .. } if !(0.0..0.5).contains(&sigma) => {
                Err(Failure::config(format!("--sigma must lie in [0, 0.5), got {sigma}")))
            }
            Generator::Voronoi { cells, .. } if cells < 4 => Err(Failure::config("--cells must be at least 4")),
            g => Ok(g),
        }
    }
}

impl MeshArgs {
    pub fn validate(&self) -> Result<MeshSource, Failure> {
        match &self.mesh {
            Some(path) => Ok(MeshSource::File(path.clone())),
            None if self.generator.family.is_none() => {
                Err(Failure::config("give either --mesh <file> or --family <name>"))
            }
            None => Ok(MeshSource::Generated(self.generator.validate()?)),
        }
    }
}

impl Generator {
    pub fn generate(&self) -> svem::Result<Mesh> {
        match *self {
            Generator::Square { n } => gen_square_grid(n),
            Generator::Trapezoid { n, sigma } => gen_trapezoid_grid(n, sigma),
            Generator::Voronoi { cells, lloyd, seed } => gen_voronoi_lloyd(cells, lloyd, seed),
        }
    }
}

impl MeshSource {
    pub fn load(&self) -> Result<Mesh, Failure> {
        match self {
            MeshSource::File(path) => read_mesh(path).map_err(|e| Failure::from_core(e).context(path.display())),
            MeshSource::Generated(g) => g.generate().map_err(Failure::from_core),
        }
    }
}
