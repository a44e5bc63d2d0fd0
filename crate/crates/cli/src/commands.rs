use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use svem::assembly::{apply_dirichlet, assemble, solve, write_matrix_market, write_vector_market, Solution};
use svem::element::{ElementDump, ElementOperators, SerendipityStrategy};
use svem::experiments::{
    dof_report, error_norms, problem_by_id, run_convergence, ConvergenceConfig, MeshFamily, Preset,
};
use svem::geometry::{mesh_to_json, Mesh};
use svem::Error;

use crate::{Command, Format, MethodArgs};

pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PROPERTY_S: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn from_core(e: Error) -> Self {
        let code = match e {
            Error::PropertyS { .. } => EXIT_PROPERTY_S,
            Error::Solver { .. } => EXIT_SOLVER,
            Error::Io(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }

    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from_core(e)
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn validate_k(k: usize) -> Result<usize, Failure> {
    if (1..=8).contains(&k) {
        Ok(k)
    } else {
        Err(Failure::config(format!("--k must lie in 1..=8, got {k}")))
    }
}

fn validate_theta0(theta0: f64) -> Result<f64, Failure> {
    if theta0.is_finite() && theta0 > 0.0 {
        Ok(theta0)
    } else {
        Err(Failure::config(format!("--theta0 must be positive and finite, got {theta0}")))
    }
}

/// `--theta0` only refines a bare `stingy`.
fn parse_strategy(text: &str, theta0: Option<f64>) -> Result<SerendipityStrategy, Failure> {
    let strategy: SerendipityStrategy = text.parse().map_err(Failure::from_core)?;
    match (strategy, theta0) {
        (s, None) => Ok(s),
        (SerendipityStrategy::Stingy { .. }, Some(_)) if text.contains(':') => {
            Err(Failure::config("give theta0 either in --strategy or with --theta0, not both"))
        }
        (SerendipityStrategy::Stingy { .. }, Some(t)) => Ok(SerendipityStrategy::Stingy {
            theta0: validate_theta0(t)?,
        }),
        (s, Some(_)) => Err(Failure::config(format!("--theta0 applies only to the stingy strategy, not {s}"))),
    }
}

impl MethodArgs {
    fn validate(&self) -> Result<(usize, SerendipityStrategy), Failure> {
        Ok((validate_k(self.k)?, parse_strategy(&self.strategy, self.theta0)?))
    }
}

/// Write to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| io_failure(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialisation cannot fail");
    s.push('\n');
    s
}

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::GenMesh { generator, out } => {
            let mesh = generator.validate()?.generate()?;
            let mut json = mesh_to_json(&mesh);
            json.push('\n');
            emit(out.as_deref(), &json)?;
            let summary = format!(
                "{} cells, {} vertices, {} edges",
                mesh.n_cells(),
                mesh.n_vertices(),
                mesh.n_edges()
            );
            // keep stdout clean when it carries the mesh
            if out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            Ok(())
        }
        Command::Solve {
            mesh,
            method,
            problem,
            dump_system,
            json,
        } => {
            let (k, strategy) = method.validate()?;
            let prob = problem_by_id(&problem)?;
            let mesh = mesh.validate()?.load()?;
            let report = solve_and_report(&mesh, k, strategy, &prob, dump_system.as_deref())?;
            let text = if json { to_json(&report) } else { report.to_text() };
            emit(None, &text)
        }
        Command::Convergence {
            problem,
            family,
            sigma,
            lloyd,
            seed,
            levels,
            method,
            csv,
            json,
            text,
        } => {
            let (k, strategy) = method.validate()?;
            let (problem, family) = resolve_study(&problem, family.as_deref(), sigma, lloyd, seed)?;
            if levels < 2 {
                return Err(Failure::config("--levels must be at least 2"));
            }
            let report = run_convergence(&ConvergenceConfig {
                problem,
                family,
                levels,
                k,
                strategy,
            })?;
            let csv_out = report.to_csv();
            if csv.is_none() && json.is_none() && text.is_none() {
                return emit(None, &csv_out);
            }
            if let Some(p) = &csv {
                emit(Some(p), &csv_out)?;
            }
            if let Some(p) = &json {
                emit(Some(p), &report.to_json())?;
            }
            if let Some(p) = &text {
                emit(Some(p), &report.to_text())?;
            }
            Ok(())
        }
        Command::Inspect { mesh, method, out } => {
            let (k, strategy) = method.validate()?;
            let mesh = mesh.validate()?.load()?;
            let dumps = inspect(&mesh, k, strategy)?;
            emit(out.as_deref(), &to_json(&dumps))
        }
        Command::Dofs {
            mesh,
            k,
            strategy,
            theta0,
            format,
            out,
        } => {
            let k = validate_k(k)?;
            let strategies = parse_strategy_list(&strategy, theta0)?;
            let mesh = mesh.validate()?.load()?;
            let report = dof_report(&mesh, k, &strategies)?;
            let content = match format {
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv(),
                Format::Json => to_json(&report),
            };
            emit(out.as_deref(), &content)
        }
    }
}

fn parse_strategy_list(text: &str, theta0: Option<f64>) -> Result<Vec<SerendipityStrategy>, Failure> {
    if text.trim() == "all" {
        let stingy = match theta0 {
            Some(t) => SerendipityStrategy::Stingy {
                theta0: validate_theta0(t)?,
            },
            None => SerendipityStrategy::stingy(),
        };
        return Ok(vec![SerendipityStrategy::Original, SerendipityStrategy::Lazy, stingy]);
    }
    text.split(',').map(|s| parse_strategy(s.trim(), theta0)).collect()
}

/// A preset fixes both problem and family; a bare problem id defaults to
/// trapezoid grids. Explicit family knobs override either.
fn resolve_study(
    problem: &str,
    family: Option<&str>,
    sigma: Option<f64>,
    lloyd: Option<usize>,
    seed: Option<u64>,
) -> Result<(String, MeshFamily), Failure> {
    let (problem, default_family) = match problem.parse::<Preset>() {
        Ok(preset) => (preset.problem().to_string(), preset.family()),
        Err(_) => {
            problem_by_id(problem)?;
            (problem.to_string(), "trapezoid".parse::<MeshFamily>()?)
        }
    };
    let family = match family {
        Some(name) => name.parse::<MeshFamily>()?,
        None => default_family,
    };
    match family {
        MeshFamily::Square if sigma.or(lloyd.map(|_| 0.0)).or(seed.map(|_| 0.0)).is_some() => {
            Err(Failure::config("square grids take no --sigma, --lloyd or --seed"))
        }
        MeshFamily::Trapezoid { sigma: default } => {
            if lloyd.is_some() || seed.is_some() {
                return Err(Failure::config("trapezoid grids take no --lloyd or --seed"));
            }
            let sigma = sigma.unwrap_or(default);
            if !(0.0..0.5).contains(&sigma) {
                return Err(Failure::config(format!("--sigma must lie in [0, 0.5), got {sigma}")));
            }
            Ok((problem, MeshFamily::Trapezoid { sigma }))
        }
        MeshFamily::Voronoi {
            lloyd_iterations,
            seed: default_seed,
        } => {
            if sigma.is_some() {
                return Err(Failure::config("Voronoi meshes take no --sigma"));
            }
            Ok((
                problem,
                MeshFamily::Voronoi {
                    lloyd_iterations: lloyd.unwrap_or(lloyd_iterations),
                    seed: seed.unwrap_or(default_seed),
                },
            ))
        }
        f => Ok((problem, f)),
    }
}

fn inspect(mesh: &Mesh, k: usize, strategy: SerendipityStrategy) -> Result<Vec<ElementDump>, Failure> {
    mesh.polygons()?
        .iter()
        .enumerate()
        .map(|(c, p)| {
            ElementOperators::build(p, k, strategy)
                .map(|ops| ops.dump(c))
                .map_err(|e| Failure::from_core(e.at_element(c)))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct SolveReport {
    problem: String,
    n_cells: usize,
    n_vertices: usize,
    h: f64,
    k: usize,
    strategy: String,
    n_dofs: usize,
    n_free: usize,
    residual: f64,
    /// `None` when the problem has no exact solution.
    rel_l2: Option<f64>,
    rel_h1: Option<f64>,
}

impl SolveReport {
    fn to_text(&self) -> String {
        let norm = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
        format!(
            "problem   {}\nmesh      {} cells, {} vertices, h = {:.6e}\nmethod    k = {}, {}\ndofs      {} ({} free)\nresidual  {:.3e}\nrel L2    {}\nrel H1    {}\n",
            self.problem,
            self.n_cells,
            self.n_vertices,
            self.h,
            self.k,
            self.strategy,
            self.n_dofs,
            self.n_free,
            self.residual,
            norm(self.rel_l2),
            norm(self.rel_h1),
        )
    }
}

fn write_market(path: &Path, write: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(|e| io_failure(path, e))?;
    let mut out = BufWriter::new(file);
    write(&mut out).and_then(|()| out.flush()).map_err(|e| io_failure(path, e))
}

fn solve_and_report(
    mesh: &Mesh,
    k: usize,
    strategy: SerendipityStrategy,
    prob: &svem::assembly::ModelProblem,
    dump_dir: Option<&Path>,
) -> Result<SolveReport, Failure> {
    let assembled = assemble(mesh, k, strategy, prob)?;
    let reduced = apply_dirichlet(&assembled, mesh, &prob.dirichlet)?;
    if let Some(dir) = dump_dir {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        write_market(&dir.join("matrix.mtx"), |out| write_matrix_market(out, &reduced.system))?;
        write_market(&dir.join("rhs.mtx"), |out| write_vector_market(out, &reduced.system.rhs))?;
    }
    let (x, residual) = solve(&reduced.system)?;
    let solution = Solution {
        dofs: reduced.expand(&x),
        assembled,
        residual,
    };
    let (rel_l2, rel_h1) = match error_norms(mesh, &solution, prob) {
        Ok(n) => (Some(n.rel_l2), Some(n.rel_h1)),
        Err(Error::ReportUnavailable(_)) => (None, None),
        Err(e) => return Err(e.into()),
    };
    let dofs = &solution.assembled.dofs;
    Ok(SolveReport {
        problem: prob.name.clone(),
        n_cells: mesh.n_cells(),
        n_vertices: mesh.n_vertices(),
        h: mesh.max_diameter(),
        k,
        strategy: strategy.to_string(),
        n_dofs: dofs.n_dofs(),
        n_free: reduced.free.len(),
        residual,
        rel_l2,
        rel_h1,
    })
}
