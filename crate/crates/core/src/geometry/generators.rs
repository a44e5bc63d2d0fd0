//! Mesh families on the unit square used by the convergence studies.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::clip::clip_convex;
use super::polygon::signed_area;
use super::{Mesh, Point2};
use crate::{Error, Result};

/// `n x n` axis-aligned squares on `]0,1[^2`.
pub fn gen_square_grid(n: usize) -> Result<Mesh> {
    gen_trapezoid_grid(n, 0.0)
}

/// `n x n` trapezoids: interior node rows are shifted vertically by
/// `(-1)^(i+j) * sigma / n`, boundary rows stay put. Vertical edges remain
/// vertical, so every cell has two parallel vertical sides and is
/// non-affine for `sigma > 0`.
pub fn gen_trapezoid_grid(n: usize, sigma: f64) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidParameter("grid size must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&sigma) {
        return Err(Error::InvalidParameter(format!("sigma must lie in [0, 0.5), got {sigma}")));
    }
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let shift = if j == 0 || j == n {
                0.0
            } else if (i + j) % 2 == 0 {
                sigma * h
            } else {
                -sigma * h
            };
            vertices.push(Point2::new(i as f64 * h, j as f64 * h + shift));
        }
    }
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells)
}

/// Voronoi diagram of `n_cells` random seeds clipped to the unit square,
/// relaxed by `n_iter` Lloyd iterations.
///
/// Deterministic in `seed`. If a cell collapses the run is restarted from a
/// perturbed seed, up to 10 attempts.
pub fn gen_voronoi_lloyd(n_cells: usize, n_iter: usize, seed: u64) -> Result<Mesh> {
    if n_cells < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 Voronoi cells, got {n_cells}")));
    }
    let mut last = None;
    for attempt in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        let mut seeds: Vec<Point2> = (0..n_cells)
            .map(|_| Point2::new(rng.gen::<f64>(), rng.gen::<f64>()))
            .collect();
        match lloyd(&mut seeds, n_iter).and_then(|cells| merge_into_mesh(&cells)) {
            Ok(m) => return Ok(m),
            Err(e) => last = Some(e),
        }
    }
    Err(Error::MeshGeneration(format!(
        "Voronoi generation failed after 10 attempts: {}",
        last.map_or_else(String::new, |e| e.to_string())
    )))
}

fn lloyd(seeds: &mut [Point2], n_iter: usize) -> Result<Vec<Vec<Point2>>> {
    let mut cells = voronoi_cells(seeds)?;
    for _ in 0..n_iter {
        for (s, cell) in seeds.iter_mut().zip(&cells) {
            *s = centroid(cell);
        }
        cells = voronoi_cells(seeds)?;
    }
    Ok(cells)
}

fn centroid(v: &[Point2]) -> Point2 {
    let n = v.len();
    let o = v[0];
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (v[i] - o, v[(i + 1) % n] - o);
        let w = p.cross(q);
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    o + Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
}

/// Per-seed half-plane clipping of the unit square. Candidate neighbours are
/// visited ring by ring in a bucket grid; the search stops once no seed in
/// the next ring can reach the current cell.
fn voronoi_cells(seeds: &[Point2]) -> Result<Vec<Vec<Point2>>> {
    let n = seeds.len();
    let nb = ((n as f64).sqrt().ceil() as usize).max(1);
    let cs = 1.0 / nb as f64;
    let bucket_of = |p: Point2| -> (usize, usize) {
        (
            ((p.x / cs).floor().max(0.0) as usize).min(nb - 1),
            ((p.y / cs).floor().max(0.0) as usize).min(nb - 1),
        )
    };
    let mut grid = vec![Vec::new(); nb * nb];
    for (i, &s) in seeds.iter().enumerate() {
        let (bx, by) = bucket_of(s);
        grid[by * nb + bx].push(i);
    }
    let square = [
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ];
    let mut cells = Vec::with_capacity(n);
    for (i, &si) in seeds.iter().enumerate() {
        let mut poly = square.to_vec();
        let (bx, by) = bucket_of(si);
        for ring in 0..=nb {
            let radius = poly.iter().map(|p| p.dist(si)).fold(0.0, f64::max);
            if ring >= 2 && (ring as f64 - 1.0) * cs > 2.0 * radius {
                break;
            }
            for (gx, gy) in ring_buckets(bx, by, ring, nb) {
                for &j in &grid[gy * nb + gx] {
                    if j == i {
                        continue;
                    }
                    let sj = seeds[j];
                    let d = sj - si;
                    if d.norm() < 1e-14 {
                        return Err(Error::MeshGeneration("coincident Voronoi seeds".into()));
                    }
                    // keep points closer to si: d·x <= (|sj|^2 - |si|^2) / 2
                    let c = -0.5 * (sj.dot(sj) - si.dot(si));
                    poly = clip_convex(&poly, d.x, d.y, c);
                }
            }
        }
        if poly.len() < 3 || signed_area(&poly) < 1e-14 {
            return Err(Error::MeshGeneration(format!("Voronoi cell {i} collapsed")));
        }
        cells.push(poly);
    }
    Ok(cells)
}

fn ring_buckets(bx: usize, by: usize, ring: usize, nb: usize) -> Vec<(usize, usize)> {
    let (bx, by, r, nb) = (bx as isize, by as isize, ring as isize, nb as isize);
    let mut out = Vec::new();
    for gy in by - r..=by + r {
        for gx in bx - r..=bx + r {
            if (gx - bx).abs().max((gy - by).abs()) != r {
                continue;
            }
            if (0..nb).contains(&gx) && (0..nb).contains(&gy) {
                out.push((gx as usize, gy as usize));
            }
        }
    }
    out
}

/// Merge independently clipped cells into one conforming mesh by snapping
/// coincident vertices.
fn merge_into_mesh(cells: &[Vec<Point2>]) -> Result<Mesh> {
    const TOL: f64 = 1e-10;
    let snap = |v: f64| {
        if v.abs() < 1e-12 {
            0.0
        } else if (v - 1.0).abs() < 1e-12 {
            1.0
        } else {
            v
        }
    };
    let key = |p: Point2| ((p.x / TOL).round() as i64, (p.y / TOL).round() as i64);
    let mut lookup: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices: Vec<Point2> = Vec::new();
    let mut out_cells = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut ids: Vec<usize> = Vec::with_capacity(cell.len());
        for &p in cell {
            let p = Point2::new(snap(p.x), snap(p.y));
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(&id) = lookup.get(&(kx + dx, ky + dy)) {
                        if vertices[id].dist(p) <= 2.0 * TOL {
                            found = Some(id);
                            break 'search;
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                lookup.insert((kx, ky), vertices.len() - 1);
                vertices.len() - 1
            });
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if ids.len() < 3 {
            return Err(Error::MeshGeneration("cell collapsed while merging vertices".into()));
        }
        out_cells.push(ids);
    }
    Mesh::new(vertices, out_cells).map_err(|e| Error::MeshGeneration(e.to_string()))
}
