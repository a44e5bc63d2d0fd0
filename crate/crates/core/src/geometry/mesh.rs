use std::collections::HashMap;

use serde::Serialize;

use super::clip::clip_convex;
use super::polygon::{segments_intersect, signed_area};
use super::{Point2, Polygon};
use crate::{Error, Result};

/// A polygonal decomposition of a planar domain.
///
/// Edges are numbered canonically: each is stored with its lower vertex
/// index first and the list is sorted, so numbering does not depend on cell
/// order.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    edges: Vec<[usize; 2]>,
    cell_edges: Vec<Vec<usize>>,
    edge_cells: Vec<Vec<(usize, usize)>>,
}

impl Mesh {
    /// Build and validate; fails unless [`validate_mesh`] with `rho0 = 0`
    /// reports a clean mesh.
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self::from_parts(vertices, cells)?;
        let report = validate_mesh(&m, 0.0);
        if !report.is_clean() {
            return Err(Error::mesh(report.summary()));
        }
        Ok(m)
    }

    /// Build the topology only: checks index ranges, nothing geometric.
    pub fn from_parts(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::mesh("mesh has no cells"));
        }
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(Error::mesh(format!("cell {c} has fewer than 3 vertices")));
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::mesh(format!("cell {c} references missing vertex {v}")));
            }
        }
        let mut keys: Vec<[usize; 2]> = cells
            .iter()
            .flat_map(|cell| {
                (0..cell.len()).map(move |i| {
                    let (a, b) = (cell[i], cell[(i + 1) % cell.len()]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let index: HashMap<[usize; 2], usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut edge_cells = vec![Vec::new(); keys.len()];
        let cell_edges = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                (0..cell.len())
                    .map(|i| {
                        let (a, b) = (cell[i], cell[(i + 1) % cell.len()]);
                        let e = index[&[a.min(b), a.max(b)]];
                        edge_cells[e].push((c, i));
                        e
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            vertices,
            cells,
            edges: keys,
            cell_edges,
            edge_cells,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Vertex pair of edge `e`, lower index first.
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Global edge index of every local edge of cell `c`.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    /// `(cell, local edge)` pairs sharing edge `e`.
    pub fn edge_cells(&self, e: usize) -> &[(usize, usize)] {
        &self.edge_cells[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_cells[e].len() == 1
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut b = vec![false; self.vertices.len()];
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            if self.is_boundary_edge(e) {
                b[u] = true;
                b[v] = true;
            }
        }
        b
    }

    pub fn cell_polygon(&self, c: usize) -> Result<Polygon> {
        Polygon::new(self.cells[c].iter().map(|&v| self.vertices[v]).collect())
    }

    pub fn polygons(&self) -> Result<Vec<Polygon>> {
        (0..self.n_cells()).map(|c| self.cell_polygon(c)).collect()
    }

    /// Largest cell diameter.
    pub fn max_diameter(&self) -> f64 {
        (0..self.n_cells())
            .filter_map(|c| self.cell_polygon(c).ok())
            .map(|p| p.diameter())
            .fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.cells
            .iter()
            .map(|cell| signed_area(&cell.iter().map(|&v| self.vertices[v]).collect::<Vec<_>>()))
            .sum()
    }

    /// The same mesh with cells listed in a different order.
    pub fn permute_cells(&self, order: &[usize]) -> Result<Mesh> {
        Mesh::from_parts(
            self.vertices.clone(),
            order.iter().map(|&c| self.cells[c].clone()).collect(),
        )
    }
}

/// Findings of [`validate_mesh`]; an empty report means the mesh is usable.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct MeshReport {
    /// Cells whose loop is clockwise.
    pub orientation: Vec<usize>,
    /// Cells failing polygon validity for other reasons.
    pub invalid_cells: Vec<(usize, String)>,
    /// Edges shared by more than two cells or twice in the same direction.
    pub nonmanifold_edges: Vec<usize>,
    /// Boundary edges that do not close up into boundary loops.
    pub dangling_edges: Vec<usize>,
    /// `(vertex, edge)`: a vertex lying inside an edge it does not bound.
    pub hanging_vertices: Vec<(usize, usize)>,
    pub unreferenced_vertices: Vec<usize>,
    /// `(cell, local edge)` with length below `rho0 * h_E`.
    pub short_edges: Vec<(usize, usize)>,
    /// Cells whose kernel contains no ball of radius `rho0 * h_E`.
    pub not_star_shaped: Vec<usize>,
}

impl MeshReport {
    pub fn is_clean(&self) -> bool {
        self.orientation.is_empty()
            && self.invalid_cells.is_empty()
            && self.nonmanifold_edges.is_empty()
            && self.dangling_edges.is_empty()
            && self.hanging_vertices.is_empty()
            && self.unreferenced_vertices.is_empty()
            && self.short_edges.is_empty()
            && self.not_star_shaped.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        let mut push = |name: &str, n: usize| {
            if n > 0 {
                parts.push(format!("{n} {name}"));
            }
        };
        push("clockwise cells", self.orientation.len());
        push("invalid cells", self.invalid_cells.len());
        push("non-manifold edges", self.nonmanifold_edges.len());
        push("dangling edges", self.dangling_edges.len());
        push("hanging vertices", self.hanging_vertices.len());
        push("unreferenced vertices", self.unreferenced_vertices.len());
        push("short edges", self.short_edges.len());
        push("non-star-shaped cells", self.not_star_shaped.len());
        if let Some((c, msg)) = self.invalid_cells.first() {
            parts.push(format!("first invalid cell {c}: {msg}"));
        }
        if parts.is_empty() {
            "clean".into()
        } else {
            parts.join(", ")
        }
    }
}

/// Check conformity, orientation and (for `rho0 > 0`) shape regularity.
pub fn validate_mesh(m: &Mesh, rho0: f64) -> MeshReport {
    let mut r = MeshReport::default();
    let mut polys: Vec<Option<Polygon>> = Vec::with_capacity(m.n_cells());

    for (c, cell) in m.cells.iter().enumerate() {
        let loop_pts: Vec<Point2> = cell.iter().map(|&v| m.vertices[v]).collect();
        match Polygon::new(loop_pts.clone()) {
            Ok(p) => polys.push(Some(p)),
            Err(e) => {
                if loop_pts.iter().all(|p| p.is_finite()) && Polygon::new_any_orientation(loop_pts).is_ok() {
                    r.orientation.push(c);
                } else {
                    r.invalid_cells.push((c, e.to_string()));
                }
                polys.push(None);
            }
        }
    }

    for (e, users) in m.edge_cells.iter().enumerate() {
        if users.len() > 2 {
            r.nonmanifold_edges.push(e);
        } else if users.len() == 2 {
            let dir = |&(c, i): &(usize, usize)| {
                let cell = &m.cells[c];
                cell[i] < cell[(i + 1) % cell.len()]
            };
            if dir(&users[0]) == dir(&users[1]) && !r.orientation.contains(&users[0].0) && !r.orientation.contains(&users[1].0) {
                r.nonmanifold_edges.push(e);
            }
        }
    }

    let mut boundary_degree = vec![0usize; m.n_vertices()];
    for (e, &[u, v]) in m.edges.iter().enumerate() {
        if m.is_boundary_edge(e) {
            boundary_degree[u] += 1;
            boundary_degree[v] += 1;
        }
    }
    for (e, &[u, v]) in m.edges.iter().enumerate() {
        if m.is_boundary_edge(e) && (boundary_degree[u] != 2 || boundary_degree[v] != 2) {
            r.dangling_edges.push(e);
        }
    }

    let mut used = vec![false; m.n_vertices()];
    for cell in &m.cells {
        for &v in cell {
            used[v] = true;
        }
    }
    r.unreferenced_vertices = (0..m.n_vertices()).filter(|&v| !used[v]).collect();

    r.hanging_vertices = hanging_vertices(m, &used);

    if rho0 > 0.0 {
        for (c, p) in polys.iter().enumerate() {
            let Some(p) = p else { continue };
            let h = p.diameter();
            for (i, (a, b)) in p.edges().enumerate() {
                if a.dist(b) < rho0 * h {
                    r.short_edges.push((c, i));
                }
            }
            if !has_kernel_ball(p, rho0 * h) {
                r.not_star_shaped.push(c);
            }
        }
    }
    r
}

/// Does the kernel of `p` contain a disc of radius `radius`?
fn has_kernel_ball(p: &Polygon, radius: f64) -> bool {
    let (lo, hi) = p.vertices().iter().fold(
        (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), v| (Point2::new(lo.x.min(v.x), lo.y.min(v.y)), Point2::new(hi.x.max(v.x), hi.y.max(v.y))),
    );
    let mut k = vec![lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)];
    for i in 0..p.n_edges() {
        let (n, _) = p.edge_normal(i);
        let (a, _) = p.edge(i);
        // inside of edge i, pulled in by the radius
        k = clip_convex(&k, n.x, n.y, -n.dot(a) + radius);
        if k.len() < 3 {
            return false;
        }
    }
    signed_area(&k) > 0.0
}

/// Vertices lying on the interior of an edge they are not an endpoint of,
/// found through a uniform bucket grid over edge bounding boxes.
fn hanging_vertices(m: &Mesh, used: &[bool]) -> Vec<(usize, usize)> {
    let pts = &m.vertices;
    let finite: Vec<&Point2> = pts.iter().filter(|p| p.is_finite()).collect();
    if finite.is_empty() || m.edges.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = (*finite[0], *finite[0]);
    for p in &finite {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let nb = ((m.edges.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
    let span = Point2::new((hi.x - lo.x).max(f64::MIN_POSITIVE), (hi.y - lo.y).max(f64::MIN_POSITIVE));
    let bucket = |x: f64, y: f64| -> (usize, usize) {
        let bx = (((x - lo.x) / span.x) * nb as f64).floor();
        let by = (((y - lo.y) / span.y) * nb as f64).floor();
        (
            (bx.max(0.0) as usize).min(nb - 1),
            (by.max(0.0) as usize).min(nb - 1),
        )
    };
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); nb * nb];
    for (e, &[u, v]) in m.edges.iter().enumerate() {
        let (a, b) = (pts[u], pts[v]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        let (x0, y0) = bucket(a.x.min(b.x), a.y.min(b.y));
        let (x1, y1) = bucket(a.x.max(b.x), a.y.max(b.y));
        // very long edges would flood the grid; they are rare, cap the work
        if (x1 - x0 + 1) * (y1 - y0 + 1) > 4096 {
            for cell in grid.iter_mut() {
                cell.push(e);
            }
            continue;
        }
        for bx in x0..=x1 {
            for by in y0..=y1 {
                grid[by * nb + bx].push(e);
            }
        }
    }
    let mut out = Vec::new();
    for (vi, p) in pts.iter().enumerate() {
        if !used[vi] || !p.is_finite() {
            continue;
        }
        let (bx, by) = bucket(p.x, p.y);
        for &e in &grid[by * nb + bx] {
            let [u, v] = m.edges[e];
            if u == vi || v == vi {
                continue;
            }
            if *p == pts[u] || *p == pts[v] || segments_intersect(pts[u], pts[v], *p, *p) {
                out.push((vi, e));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
