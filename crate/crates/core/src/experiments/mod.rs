//! Model problems, error norms, convergence studies and dof-count reports.

mod convergence;
mod dofs;
mod norms;

pub use convergence::{
    run_convergence, ConvergenceConfig, ConvergenceLevel, ConvergenceReport, MeshFamily, Preset, DEFAULT_LLOYD_ITERATIONS,
    DEFAULT_SEED, DEFAULT_SIGMA,
};
pub use dofs::{dof_report, element_dof_counts, DofReport, DofRow, ElementDofCounts};
pub use norms::{error_norms, ErrorNorms};

use std::f64::consts::PI;

use crate::assembly::ModelProblem;
use crate::{Error, Result};

/// Identifiers accepted by [`problem_by_id`].
pub const PROBLEM_IDS: [&str; 3] = ["poisson-quintic", "variable-coeff", "zero"];

pub fn problem_by_id(id: &str) -> Result<ModelProblem> {
    match id {
        "poisson-quintic" => Ok(poisson_quintic()),
        "variable-coeff" => Ok(variable_coeff()),
        "zero" => Ok(zero_problem()),
        other => Err(Error::InvalidParameter(format!(
            "unknown problem {other:?}; expected one of {}",
            PROBLEM_IDS.join(", ")
        ))),
    }
}

fn quintic(x: f64, y: f64) -> f64 {
    x.powi(3) + 5.0 * y * y - 10.0 * y.powi(3) + y.powi(4) + x.powi(5) + x.powi(4) * y
}

/// `-Δp = f` on the unit square with a fifth-degree polynomial solution.
pub fn poisson_quintic() -> ModelProblem {
    let source = |x: f64, y: f64| {
        -20.0 * x.powi(3) - 12.0 * x * x * y - 6.0 * x - 12.0 * y * y + 60.0 * y - 10.0
    };
    ModelProblem::poisson(
        "poisson-quintic",
        Box::new(move |p| source(p.x, p.y)),
        Box::new(|p| quintic(p.x, p.y)),
    )
    .with_exact(
        Box::new(|p| quintic(p.x, p.y)),
        Box::new(|p| {
            let (x, y) = (p.x, p.y);
            [
                3.0 * x * x + 5.0 * x.powi(4) + 4.0 * x.powi(3) * y,
                10.0 * y - 30.0 * y * y + 4.0 * y.powi(3) + x.powi(4),
            ]
        }),
    )
}

const OMEGA: f64 = 2.0 * PI;

fn oscillating(x: f64, y: f64) -> f64 {
    x * x * y + (OMEGA * x).sin() * (OMEGA * y).sin() + 2.0
}

fn oscillating_grad(x: f64, y: f64) -> [f64; 2] {
    let (sx, cx) = (OMEGA * x).sin_cos();
    let (sy, cy) = (OMEGA * y).sin_cos();
    [2.0 * x * y + OMEGA * cx * sy, x * x + OMEGA * sx * cy]
}

/// Full-tensor diffusion with convection `(x, y)` and reaction `x² + y³`,
/// source in closed form.
pub fn variable_coeff() -> ModelProblem {
    let source = |x: f64, y: f64| {
        let (sx, cx) = (OMEGA * x).sin_cos();
        let (sy, cy) = (OMEGA * y).sin_cos();
        let w2 = OMEGA * OMEGA;
        let p = oscillating(x, y);
        let [px, py] = oscillating_grad(x, y);
        let pxx = 2.0 * y - w2 * sx * sy;
        let pyy = -w2 * sx * sy;
        let pxy = 2.0 * x + w2 * cx * cy;
        let diffusion = (y * y + 1.0) * pxx + (x * x + 1.0) * pyy - 2.0 * x * y * pxy - y * py - x * px;
        -diffusion + 2.0 * p + x * px + y * py + (x * x + y.powi(3)) * p
    };
    ModelProblem {
        name: "variable-coeff".into(),
        diffusion: Box::new(|p| [[p.y * p.y + 1.0, -p.x * p.y], [-p.x * p.y, p.x * p.x + 1.0]]),
        convection: Some(Box::new(|p| [p.x, p.y])),
        reaction: Some(Box::new(|p| p.x * p.x + p.y.powi(3))),
        source: Box::new(move |p| source(p.x, p.y)),
        dirichlet: Box::new(|p| oscillating(p.x, p.y)),
        exact: Some(Box::new(|p| oscillating(p.x, p.y))),
        exact_gradient: Some(Box::new(|p| oscillating_grad(p.x, p.y))),
    }
}

/// Homogeneous data and no known solution.
pub fn zero_problem() -> ModelProblem {
    ModelProblem::poisson("zero", Box::new(|_| 0.0), Box::new(|_| 0.0))
}
