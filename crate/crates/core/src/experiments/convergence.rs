use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{error_norms, problem_by_id};
use crate::assembly::solve_problem;
use crate::element::SerendipityStrategy;
use crate::geometry::{gen_square_grid, gen_trapezoid_grid, gen_voronoi_lloyd, Mesh};
use crate::{Error, Result};

pub const DEFAULT_SIGMA: f64 = 0.2;
pub const DEFAULT_LLOYD_ITERATIONS: usize = 50;
pub const DEFAULT_SEED: u64 = 1;

/// Mesh sequences for convergence studies. Level `i` has `8·2^i` cells per
/// side for the structured families and `25·4^i` cells for Voronoi meshes,
/// whose seed is `seed + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MeshFamily {
    Square,
    Trapezoid { sigma: f64 },
    Voronoi { lloyd_iterations: usize, seed: u64 },
}

impl MeshFamily {
    pub fn mesh(&self, level: usize) -> Result<(Mesh, String)> {
        match *self {
            MeshFamily::Square => {
                let n = 8 << level;
                Ok((gen_square_grid(n)?, format!("square {n}x{n}")))
            }
            MeshFamily::Trapezoid { sigma } => {
                let n = 8 << level;
                Ok((gen_trapezoid_grid(n, sigma)?, format!("trapezoid {n}x{n}")))
            }
            MeshFamily::Voronoi { lloyd_iterations, seed } => {
                let cells = 25 << (2 * level);
                let s = seed + level as u64;
                Ok((
                    gen_voronoi_lloyd(cells, lloyd_iterations, s)?,
                    format!("voronoi {cells} cells seed {s}"),
                ))
            }
        }
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(MeshFamily::Square),
            "trapezoid" => Ok(MeshFamily::Trapezoid { sigma: DEFAULT_SIGMA }),
            "voronoi" | "lloyd" => Ok(MeshFamily::Voronoi {
                lloyd_iterations: DEFAULT_LLOYD_ITERATIONS,
                seed: DEFAULT_SEED,
            }),
            other => Err(Error::InvalidParameter(format!(
                "unknown mesh family {other:?}; expected square, trapezoid or voronoi"
            ))),
        }
    }
}

/// Named problem and mesh-family pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    TrapezoidQuintic,
    LloydVariable,
}

impl Preset {
    pub fn problem(self) -> &'static str {
        match self {
            Preset::TrapezoidQuintic => "poisson-quintic",
            Preset::LloydVariable => "variable-coeff",
        }
    }

    pub fn family(self) -> MeshFamily {
        match self {
            Preset::TrapezoidQuintic => MeshFamily::Trapezoid { sigma: DEFAULT_SIGMA },
            Preset::LloydVariable => MeshFamily::Voronoi {
                lloyd_iterations: DEFAULT_LLOYD_ITERATIONS,
                seed: DEFAULT_SEED,
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trapezoid-quintic" => Ok(Preset::TrapezoidQuintic),
            "lloyd-variable" => Ok(Preset::LloydVariable),
            other => Err(Error::InvalidParameter(format!("unknown preset {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub problem: String,
    pub family: MeshFamily,
    pub levels: usize,
    pub k: usize,
    pub strategy: SerendipityStrategy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub mesh: String,
    pub n_cells: usize,
    /// Largest cell diameter.
    pub h: f64,
    pub n_dofs: usize,
    pub n_free: usize,
    pub rel_l2: f64,
    pub rel_h1: f64,
    pub residual: f64,
}

/// Levels ordered by decreasing `h`; rates compare consecutive levels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub problem: String,
    pub mesh_family: MeshFamily,
    pub k: usize,
    pub strategy: String,
    pub theta0: Option<f64>,
    pub discretization: &'static str,
    pub levels: Vec<ConvergenceLevel>,
    pub rates_l2: Vec<f64>,
    pub rates_h1: Vec<f64>,
}

const DISCRETIZATION: &str = "gradients projected to degree k-1; convection and reaction values projected \
to degree k-1; load against the degree-k projection; stabilization tau*|(I - D Pi0_k) u|^2 with tau the \
mean diagonal of the element stiffness over vertex and edge dofs";

fn rates(h: &[f64], e: &[f64]) -> Vec<f64> {
    (1..h.len())
        .map(|i| (e[i - 1] / e[i]).ln() / (h[i - 1] / h[i]).ln())
        .collect()
}

/// Solve on `levels` meshes of the family and tabulate errors and rates.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if cfg.levels < 2 {
        return Err(Error::InvalidParameter("a convergence study needs at least 2 levels".into()));
    }
    let prob = problem_by_id(&cfg.problem)?;
    let mut levels = Vec::with_capacity(cfg.levels);
    for level in 0..cfg.levels {
        let (mesh, name) = cfg.family.mesh(level)?;
        let sol = solve_problem(&mesh, cfg.k, cfg.strategy, &prob)?;
        let norms = error_norms(&mesh, &sol, &prob)?;
        let dofs = &sol.assembled.dofs;
        levels.push(ConvergenceLevel {
            mesh: name,
            n_cells: mesh.n_cells(),
            h: mesh.max_diameter(),
            n_dofs: dofs.n_dofs(),
            n_free: dofs.n_dofs() - dofs.n_boundary_dofs(),
            rel_l2: norms.rel_l2,
            rel_h1: norms.rel_h1,
            residual: sol.residual,
        });
    }
    levels.sort_by(|a, b| b.h.total_cmp(&a.h));
    let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let l2: Vec<f64> = levels.iter().map(|l| l.rel_l2).collect();
    let h1: Vec<f64> = levels.iter().map(|l| l.rel_h1).collect();
    let theta0 = match cfg.strategy {
        SerendipityStrategy::Stingy { theta0 } => Some(theta0),
        _ => None,
    };
    Ok(ConvergenceReport {
        problem: cfg.problem.clone(),
        mesh_family: cfg.family,
        k: cfg.k,
        strategy: cfg.strategy.to_string(),
        theta0,
        discretization: DISCRETIZATION,
        rates_l2: rates(&h, &l2),
        rates_h1: rates(&h, &h1),
        levels,
    })
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,mesh,cells,h,dofs,rel_l2,rel_h1,rate_l2,rate_h1\n");
        for (i, l) in self.levels.iter().enumerate() {
            let (r0, r1) = if i == 0 {
                (String::new(), String::new())
            } else {
                (format!("{:.4}", self.rates_l2[i - 1]), format!("{:.4}", self.rates_h1[i - 1]))
            };
            let _ = writeln!(
                out,
                "{i},{},{},{:.10e},{},{:.10e},{:.10e},{r0},{r1}",
                l.mesh, l.n_cells, l.h, l.n_dofs, l.rel_l2, l.rel_h1
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem   {}", self.problem);
        let _ = writeln!(out, "family    {}", serde_json::to_string(&self.mesh_family).unwrap_or_default());
        let _ = writeln!(out, "k         {}", self.k);
        let _ = writeln!(out, "strategy  {}", self.strategy);
        let _ = writeln!(
            out,
            "{:<28} {:>7} {:>11} {:>9} {:>11} {:>7} {:>11} {:>7}",
            "mesh", "cells", "h", "dofs", "rel L2", "rate", "rel H1", "rate"
        );
        for (i, l) in self.levels.iter().enumerate() {
            let rate = |r: &[f64]| if i == 0 { "-".to_string() } else { format!("{:.2}", r[i - 1]) };
            let _ = writeln!(
                out,
                "{:<28} {:>7} {:>11.4e} {:>9} {:>11.4e} {:>7} {:>11.4e} {:>7}",
                l.mesh,
                l.n_cells,
                l.h,
                l.n_dofs,
                l.rel_l2,
                rate(&self.rates_l2),
                l.rel_h1,
                rate(&self.rates_h1)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
