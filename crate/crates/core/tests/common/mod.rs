//! Random element shapes shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use svem::geometry::{gen_voronoi_lloyd, Mesh, Point2, Polygon};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Triangle,
    ConvexQuad,
    Trapezoid,
    VoronoiCell,
    ReentrantQuad,
}

pub const SHAPES: [Shape; 5] = [
    Shape::Triangle,
    Shape::ConvexQuad,
    Shape::Trapezoid,
    Shape::VoronoiCell,
    Shape::ReentrantQuad,
];

fn similarity(rng: &mut impl Rng, pts: Vec<Point2>) -> Polygon {
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    let (s, c) = rng.gen_range(0.0..std::f64::consts::TAU).sin_cos();
    let shift = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let moved = pts
        .into_iter()
        .map(|p| Point2::new(scale * (c * p.x - s * p.y), scale * (s * p.x + c * p.y)) + shift)
        .collect();
    Polygon::new(moved).expect("similarity keeps polygons valid")
}

/// Random elements contain a disc of radius `MIN_CHUNKINESS * h_E`, the
/// usual shape-regularity assumption on polygonal meshes.
pub const MIN_CHUNKINESS: f64 = 0.1;

/// A random polygon of the given kind, randomly scaled, rotated and moved.
pub fn random_polygon(rng: &mut impl Rng, shape: Shape, cells: &Mesh) -> Polygon {
    let pts = match shape {
        Shape::Triangle => loop {
            let p: Vec<Point2> = (0..3).map(|_| Point2::new(rng.gen(), rng.gen())).collect();
            let area = (p[1] - p[0]).cross(p[2] - p[0]);
            let sides = [p[0].dist(p[1]), p[1].dist(p[2]), p[2].dist(p[0])];
            let inradius = area.abs() / sides.iter().sum::<f64>();
            if inradius >= MIN_CHUNKINESS * sides.iter().copied().fold(0.0, f64::max) {
                break if area > 0.0 { p } else { vec![p[0], p[2], p[1]] };
            }
        },
        Shape::ConvexQuad => {
            let base = [0.0, 0.5, 1.0, 1.5].map(|t| t * std::f64::consts::PI);
            base.iter()
                .map(|&t| {
                    let a: f64 = t + rng.gen_range(-0.5..0.5);
                    Point2::new(1.5 * a.cos(), a.sin())
                })
                .collect()
        }
        Shape::Trapezoid => {
            let w = rng.gen_range(0.5..2.0);
            let y1 = rng.gen_range(-0.4..0.4);
            let top0 = rng.gen_range(0.6..1.4);
            let top1 = y1 + rng.gen_range(0.6..1.4);
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(w, y1),
                Point2::new(w, top1),
                Point2::new(0.0, top0),
            ]
        }
        Shape::VoronoiCell => {
            let c = rng.gen_range(0..cells.n_cells());
            cells.cell_polygon(c).unwrap().vertices().to_vec()
        }
        Shape::ReentrantQuad => {
            let r = rng.gen_range(0.3..0.8);
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(2.0 + rng.gen_range(-0.3..0.3), 0.0),
                Point2::new(r + rng.gen_range(-0.1..0.1), r + rng.gen_range(-0.1..0.1)),
                Point2::new(rng.gen_range(-0.3..0.3), 2.0),
            ]
        }
    };
    similarity(rng, pts)
}

/// Source of Voronoi cells for [`Shape::VoronoiCell`].
pub fn voronoi_pool() -> Mesh {
    gen_voronoi_lloyd(60, 10, 7).unwrap()
}

/// The quadrilateral with two collinear edges, completed to the unit square
/// by one triangle.
pub fn degenerate_quad_mesh() -> Mesh {
    Mesh::new(
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
        ],
        vec![vec![0, 1, 2, 3], vec![2, 4, 3]],
    )
    .unwrap()
}

/// `Σ c x^a y^b` stored as `(a, b, c)` terms.
#[derive(Clone, Debug)]
pub struct Poly(pub Vec<(i32, i32, f64)>);

impl Poly {
    pub fn random(rng: &mut impl Rng, degree: i32) -> Self {
        let mut terms = Vec::new();
        for d in 0..=degree {
            for b in 0..=d {
                terms.push((d - b, b, rng.gen_range(-1.0..1.0)));
            }
        }
        Poly(terms)
    }

    pub fn eval(&self, p: Point2) -> f64 {
        self.0.iter().map(|&(a, b, c)| c * p.x.powi(a) * p.y.powi(b)).sum()
    }

    pub fn dx(&self) -> Poly {
        Poly(self.0.iter().filter(|t| t.0 > 0).map(|&(a, b, c)| (a - 1, b, c * a as f64)).collect())
    }

    pub fn dy(&self) -> Poly {
        Poly(self.0.iter().filter(|t| t.1 > 0).map(|&(a, b, c)| (a, b - 1, c * b as f64)).collect())
    }
}

/// `-Δp = f` with boundary data and exact solution `p`.
pub fn poisson_with_solution(p: Poly) -> svem::assembly::ModelProblem {
    let (px, py) = (p.dx(), p.dy());
    let (pxx, pyy) = (px.dx(), py.dy());
    let (p1, p2, gx, gy) = (p.clone(), p.clone(), px, py);
    svem::assembly::ModelProblem::poisson(
        "polynomial",
        Box::new(move |q| -pxx.eval(q) - pyy.eval(q)),
        Box::new(move |q| p1.eval(q)),
    )
    .with_exact(Box::new(move |q| p2.eval(q)), Box::new(move |q| [gx.eval(q), gy.eval(q)]))
}
