//! The eight acceptance criteria, one PASS/FAIL line each.

mod common;

use std::time::Instant;

use common::{degenerate_quad_mesh, poisson_with_solution, random_polygon, voronoi_pool, Poly, Shape, SHAPES};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svem::assembly::{assemble, local_forms, solve_problem};
use svem::element::{
    build_d, build_dof_layout, check_property_s, ElementOperators, SerendipityStrategy, DEFAULT_THETA0,
};
use svem::experiments::{
    dof_report, element_dof_counts, error_norms, run_convergence, ConvergenceConfig, MeshFamily,
};
use svem::geometry::{gen_square_grid, gen_trapezoid_grid, gen_voronoi_lloyd, Mesh, Point2, Polygon};
use svem::polynomials::poly_dim;
use svem::Error;

type Outcome = Result<String, String>;

const STRATEGIES: [SerendipityStrategy; 3] = [
    SerendipityStrategy::Original,
    SerendipityStrategy::Lazy,
    SerendipityStrategy::Stingy { theta0: DEFAULT_THETA0 },
];

fn projector_reproduces_monomials() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pool = voronoi_pool();
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let shape = SHAPES[i % SHAPES.len()];
        let p = random_polygon(&mut rng, shape, &pool);
        for k in 1..=4 {
            for strategy in [SerendipityStrategy::Lazy, SerendipityStrategy::stingy()] {
                let ops = ElementOperators::build(&p, k, strategy)
                    .map_err(|e| format!("{shape:?} #{i} k={k} {strategy}: {e}"))?;
                let n = ops.basis.len();
                worst = worst.max((&ops.pi_s * &ops.ds - DMatrix::identity(n, n)).amax());
            }
        }
    }
    if worst <= 1e-10 {
        Ok(format!("max coefficient error {worst:.2e}"))
    } else {
        Err(format!("max coefficient error {worst:.2e} > 1e-10"))
    }
}

fn property_s_conditions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pool = voronoi_pool();
    let (mut boundary_only, mut stingy, mut forced) = (0, 0, 0);
    for i in 0..150 {
        let shape = [Shape::Triangle, Shape::ConvexQuad, Shape::Trapezoid, Shape::VoronoiCell][i % 4];
        let p = random_polygon(&mut rng, shape, &pool);
        for k in 1..=6 {
            let eta = build_dof_layout(&p, k, SerendipityStrategy::Lazy).map_err(|e| e.to_string())?.eta;
            if k < eta {
                let l = build_dof_layout(&p, k, SerendipityStrategy::FixedInternalDegree(-1)).unwrap();
                let c = check_property_s(&build_d(&p, &l).unwrap());
                if !c.ok {
                    return Err(format!("{shape:?} #{i} k={k} eta={eta}: boundary rows lose rank ({:.2e})", c.min_sv));
                }
                boundary_only += 1;
            }
            let l = build_dof_layout(&p, k, SerendipityStrategy::stingy()).unwrap();
            let c = check_property_s(&build_d(&p, &l).unwrap());
            if !c.ok {
                return Err(format!("{shape:?} #{i} k={k}: stingy layout fails ({:.2e})", c.min_sv));
            }
            stingy += 1;
            if k >= eta {
                let short = SerendipityStrategy::FixedInternalDegree(k as i32 - eta as i32 - 1);
                let l = build_dof_layout(&p, k, short).unwrap();
                let c = check_property_s(&build_d(&p, &l).unwrap());
                if c.ok {
                    return Err(format!("{shape:?} #{i} k={k} eta={eta}: too few moments accepted ({:.2e})", c.min_sv));
                }
                forced += 1;
            }
        }
    }
    Ok(format!("{boundary_only} boundary-only, {stingy} stingy, {forced} under-resolved layouts checked"))
}

fn patch_tests() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let meshes: Vec<(&str, Mesh)> = vec![
        ("square", gen_square_grid(4).unwrap()),
        ("trapezoid", gen_trapezoid_grid(4, 0.2).unwrap()),
        ("voronoi", gen_voronoi_lloyd(25, 50, 1).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    for (name, mesh) in &meshes {
        for k in 2..=4 {
            for strategy in STRATEGIES {
                let prob = poisson_with_solution(Poly::random(&mut rng, k as i32));
                let sol = solve_problem(mesh, k, strategy, &prob).map_err(|e| format!("{name} k={k} {strategy}: {e}"))?;
                let e = error_norms(mesh, &sol, &prob).unwrap().rel_l2;
                if e > 1e-9 {
                    return Err(format!("{name} k={k} {strategy}: relative L2 error {e:.2e}"));
                }
                worst = worst.max(e);
            }
        }
    }
    Ok(format!("max relative L2 error {worst:.2e} over 27 runs"))
}

fn finest_rate(problem: &str, family: MeshFamily, levels: usize, k: usize, strategy: SerendipityStrategy) -> Result<svem::experiments::ConvergenceReport, String> {
    run_convergence(&ConvergenceConfig {
        problem: problem.into(),
        family,
        levels,
        k,
        strategy,
    })
    .map_err(|e| format!("k={k} {strategy}: {e}"))
}

fn trapezoid_quintic_rates() -> Outcome {
    let mut summary = Vec::new();
    let mut failed = false;
    for k in 2..=4 {
        let r = finest_rate("poisson-quintic", MeshFamily::Trapezoid { sigma: 0.2 }, 3, k, SerendipityStrategy::stingy())?;
        let rate = *r.rates_l2.last().unwrap();
        failed |= rate < (k + 1) as f64 - 0.2;
        summary.push(format!("k={k} rate {rate:.2}"));
    }
    let s = summary.join(", ");
    if failed {
        Err(s)
    } else {
        Ok(s)
    }
}

fn lloyd_variable_rates() -> Outcome {
    let family = MeshFamily::Voronoi {
        lloyd_iterations: 50,
        seed: 1,
    };
    let mut summary = Vec::new();
    let mut failed = false;
    for k in 2..=4 {
        let stingy = finest_rate("variable-coeff", family, 3, k, SerendipityStrategy::stingy())?;
        let lazy = finest_rate("variable-coeff", family, 3, k, SerendipityStrategy::Lazy)?;
        let rate = *stingy.rates_l2.last().unwrap();
        let ratio = stingy
            .levels
            .iter()
            .zip(&lazy.levels)
            .map(|(s, l)| (s.rel_l2 / l.rel_l2).max(l.rel_l2 / s.rel_l2))
            .fold(0.0, f64::max);
        failed |= rate < (k + 1) as f64 - 0.3 || ratio > 2.0;
        summary.push(format!("k={k} rate {rate:.2} lazy/stingy {ratio:.3}"));
    }
    let s = summary.join(", ");
    if failed {
        Err(s)
    } else {
        Ok(s)
    }
}

fn dof_accounting() -> Outcome {
    let tri = Polygon::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.2, 0.9)]).unwrap();
    let par = Polygon::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(2.6, 1.0),
        Point2::new(0.6, 1.0),
    ])
    .unwrap();
    for k in 1..=8 {
        let t = element_dof_counts(&tri, k, DEFAULT_THETA0).map_err(|e| e.to_string())?;
        let p = element_dof_counts(&par, k, DEFAULT_THETA0).map_err(|e| e.to_string())?;
        let ki = k as i32;
        if t.stingy != Some(poly_dim(ki - 3, 2)) || t.lagrange_fem != t.stingy {
            return Err(format!("triangle k={k}: {t:?}"));
        }
        if p.stingy != Some(poly_dim(ki - 4, 2)) || p.serendipity_fem != p.stingy {
            return Err(format!("parallelogram k={k}: {p:?}"));
        }
        if t.original != poly_dim(ki - 2, 2) || p.original != poly_dim(ki - 2, 2) {
            return Err(format!("original count at k={k}"));
        }
    }
    let meshes = [gen_trapezoid_grid(4, 0.2).unwrap(), gen_voronoi_lloyd(25, 50, 3).unwrap()];
    let prob = svem::experiments::zero_problem();
    for mesh in &meshes {
        for k in 1..=4 {
            let report = dof_report(mesh, k, &STRATEGIES).map_err(|e| e.to_string())?;
            for (row, s) in report.rows.iter().zip(STRATEGIES) {
                let asm = assemble(mesh, k, s, &prob).map_err(|e| e.to_string())?;
                if asm.dofs.n_dofs() != row.global_total {
                    return Err(format!("k={k} {s}: report {} vs map {}", row.global_total, asm.dofs.n_dofs()));
                }
            }
        }
    }
    Ok("triangle, parallelogram and original counts for k=1..8; mesh totals reconcile".into())
}

fn degenerate_quad() -> Outcome {
    let mesh = degenerate_quad_mesh();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let quad = mesh.cell_polygon(0).unwrap();
    let eta = build_dof_layout(&quad, 4, SerendipityStrategy::stingy()).unwrap().eta;
    if eta != 3 {
        return Err(format!("eta detected as {eta}"));
    }
    let prob = poisson_with_solution(Poly::random(&mut rng, 4));
    let sol = solve_problem(&mesh, 4, SerendipityStrategy::stingy(), &prob).map_err(|e| e.to_string())?;
    let e = error_norms(&mesh, &sol, &prob).unwrap().rel_l2;
    if e > 1e-9 {
        return Err(format!("patch test error {e:.2e}"));
    }
    let forced = build_dof_layout(&quad, 4, SerendipityStrategy::FixedInternalDegree(0)).unwrap();
    match ElementOperators::from_layout(&quad, forced) {
        Err(Error::PropertyS { min_sv, .. }) => Ok(format!("patch error {e:.2e}; four-line layout rejected (min_sv {min_sv:.2e})")),
        Ok(ops) => Err(format!("four-line layout accepted with min_sv {:.2e}", ops.min_sv)),
        Err(other) => Err(other.to_string()),
    }
}

fn stabilization_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let pool = voronoi_pool();
    let prob = svem::experiments::zero_problem();
    for i in 0..50 {
        let shape = SHAPES[i % SHAPES.len()];
        let p = random_polygon(&mut rng, shape, &pool);
        let k = rng.gen_range(1..=4);
        let strategy = STRATEGIES[rng.gen_range(0..3)];
        let ops = ElementOperators::build(&p, k, strategy).map_err(|e| e.to_string())?;
        let forms = local_forms(&p, &ops, &prob).map_err(|e| e.to_string())?;
        let eig = SymmetricEigen::new((&forms.stabilization + forms.stabilization.transpose()) * 0.5).eigenvalues;
        // relative to the stiffness scale: the form vanishes when S = dim P_k
        let tol = 1e-10 * forms.stiffness.diagonal().amax();
        if eig.iter().any(|&v| v < -tol) {
            return Err(format!("{shape:?} #{i}: negative eigenvalue {:.2e}", eig.min()));
        }
        let kernel = eig.iter().filter(|&&v| v.abs() <= tol).count();
        if kernel != ops.basis.len() {
            return Err(format!("{shape:?} #{i} k={k} {strategy}: kernel {kernel} vs {}", ops.basis.len()));
        }
    }
    Ok("50 elements PSD with kernel dimension dim P_k".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("projector reproduces P_k", projector_reproduces_monomials),
        ("property S conditions", property_s_conditions),
        ("patch test", patch_tests),
        ("trapezoid quintic rates", trapezoid_quintic_rates),
        ("lloyd variable-coefficient rates", lloyd_variable_rates),
        ("dof accounting", dof_accounting),
        ("degenerate quadrilateral", degenerate_quad),
        ("stabilization kernel", stabilization_kernel),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
