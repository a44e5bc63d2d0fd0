use super::Point2;
use crate::{Error, Result};

/// Relative tolerance used by orientation predicates on polygon vertices.
const ORIENT_EPS: f64 = 1e-12;

/// A simple polygon with counterclockwise vertex loop.
///
/// Area, centroid and diameter are computed once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
    area: f64,
    centroid: Point2,
    diameter: f64,
}

impl Polygon {
    /// Validate and build a polygon from a counterclockwise loop.
    ///
    /// Rejects fewer than three vertices, non-finite coordinates, repeated
    /// consecutive vertices, non-positive signed area and self-intersections.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::geometry(format!("vertex {i} is not finite")));
        }
        let n = vertices.len();
        let diameter = max_pairwise_distance(&vertices);
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(Error::geometry("polygon has zero or non-finite extent"));
        }
        for i in 0..n {
            if vertices[i].dist(vertices[(i + 1) % n]) <= 1e-14 * diameter {
                return Err(Error::geometry(format!("repeated consecutive vertex at {i}")));
            }
        }
        let (area, centroid) = area_and_centroid(&vertices);
        if area.is_nan() || area <= 1e-14 * diameter * diameter || !centroid.is_finite() {
            return Err(Error::geometry(format!(
                "signed area {area:e} is not positive (clockwise or degenerate loop)"
            )));
        }
        if !is_simple(&vertices) {
            return Err(Error::geometry("polygon boundary self-intersects"));
        }
        Ok(Self {
            vertices,
            area,
            centroid,
            diameter,
        })
    }

    /// Build from a loop in either orientation, reversing clockwise input.
    pub fn new_any_orientation(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() >= 3 && signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn centroid(&self) -> Point2 {
        self.centroid
    }

    /// Largest distance between two vertices, `h_E`.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `(area, centroid, diameter)`.
    pub fn measures(&self) -> (f64, Point2, f64) {
        (self.area, self.centroid, self.diameter)
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1` (cyclically).
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        (0..self.n_edges()).map(|i| self.edge(i))
    }

    /// Outward unit normal and length of edge `i`.
    pub fn edge_normal(&self, i: usize) -> (Point2, f64) {
        let (a, b) = self.edge(i);
        let d = b - a;
        let len = d.norm();
        (Point2::new(d.y / len, -d.x / len), len)
    }

    /// Turn at vertex `i`: positive for convex corners, negative for reflex ones,
    /// normalised by the adjacent edge lengths.
    fn turn(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let prev = self.vertices[(i + n - 1) % n];
        let cur = self.vertices[i];
        let next = self.vertices[(i + 1) % n];
        let (e0, e1) = (cur - prev, next - cur);
        e0.cross(e1) / (e0.norm() * e1.norm())
    }

    /// Indices of vertices with interior angle greater than pi.
    pub fn reflex_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&i| self.turn(i) < -ORIENT_EPS)
            .collect()
    }

    /// Straight angles (collinear neighbours) count as convex.
    pub fn is_convex(&self) -> bool {
        self.reflex_vertices().is_empty()
    }

    /// Crossing-number point location; boundary points may go either way.
    pub fn contains(&self, p: Point2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Split into triangles: a fan for convex polygons, ear clipping otherwise.
    ///
    /// Vertices lying on a straight angle are dropped first, so no triangle
    /// of the result is degenerate.
    pub fn triangulate(&self) -> Result<Vec<[Point2; 3]>> {
        let pts: Vec<Point2> = (0..self.n_vertices())
            .filter(|&i| self.turn(i).abs() > ORIENT_EPS)
            .map(|i| self.vertices[i])
            .collect();
        if pts.len() < 3 {
            return Err(Error::geometry("polygon has fewer than 3 corners"));
        }
        if self.is_convex() {
            return Ok((1..pts.len() - 1)
                .map(|i| [pts[0], pts[i], pts[i + 1]])
                .collect());
        }
        ear_clip(pts)
    }

    /// Apply a map to every vertex and revalidate.
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<Polygon> {
        Polygon::new(self.vertices.iter().map(|&v| f(v)).collect())
    }

    /// Same polygon with the vertex loop starting at `shift`.
    pub fn rotate_start(&self, shift: usize) -> Polygon {
        let mut v = self.vertices.clone();
        let n = v.len();
        v.rotate_left(shift % n);
        Polygon::new(v).expect("cyclic relabelling preserves validity")
    }
}

pub(crate) fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    let o = v[0];
    (0..n)
        .map(|i| (v[i] - o).cross(v[(i + 1) % n] - o))
        .sum::<f64>()
        * 0.5
}

fn area_and_centroid(v: &[Point2]) -> (f64, Point2) {
    let n = v.len();
    let o = v[0];
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = v[i] - o;
        let q = v[(i + 1) % n] - o;
        let w = p.cross(q);
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let area = 0.5 * a2;
    (area, o + Point2::new(cx / (3.0 * a2), cy / (3.0 * a2)))
}

fn max_pairwise_distance(v: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(v[i].dist(v[j]));
        }
    }
    d
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test.
pub(crate) fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn is_simple(v: &[Point2]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        // consecutive edges must not fold back onto each other
        let c = v[(i + 2) % n];
        let (e0, e1) = (b - a, c - b);
        if e0.cross(e1).abs() <= ORIENT_EPS * e0.norm() * e1.norm() && e0.dot(e1) < 0.0 {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

fn ear_clip(mut pts: Vec<Point2>) -> Result<Vec<[Point2; 3]>> {
    let mut tris = Vec::with_capacity(pts.len() - 2);
    while pts.len() > 3 {
        let n = pts.len();
        let ear = (0..n).find(|&i| {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            if orient(a, b, c) <= 0.0 {
                return false;
            }
            pts.iter()
                .enumerate()
                .filter(|&(j, _)| j != i && j != (i + n - 1) % n && j != (i + 1) % n)
                .all(|(_, &p)| !point_in_triangle(p, a, b, c) || p == a || p == b || p == c)
        });
        let Some(i) = ear else {
            return Err(Error::geometry("ear clipping found no ear"));
        };
        tris.push([pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]]);
        pts.remove(i);
    }
    tris.push([pts[0], pts[1], pts[2]]);
    Ok(tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[(f64, f64)]) -> Result<Polygon> {
        Polygon::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    #[test]
    fn unit_square_measures() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let (a, c, d) = p.measures();
        assert!((a - 1.0).abs() < 1e-15);
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn triangle_measures() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        assert!((p.area() - 0.5).abs() < 1e-15);
        assert!((p.centroid().x - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.centroid().y - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn regular_hexagon_area() {
        let v: Vec<_> = (0..6)
            .map(|i| {
                let t = std::f64::consts::PI / 3.0 * i as f64;
                Point2::new(t.cos(), t.sin())
            })
            .collect();
        let p = Polygon::new(v).unwrap();
        assert!((p.area() - 3.0 * 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_loops() {
        assert!(poly(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
        // clockwise
        assert!(poly(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).is_err());
        // bow tie
        assert!(poly(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]).is_err());
        // repeated vertex
        assert!(poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).is_err());
        // collinear
        assert!(poly(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).is_err());
        assert!(poly(&[(0.0, 0.0), (f64::NAN, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn orientation_is_normalised_on_request() {
        let p = Polygon::new_any_orientation(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(p.area() > 0.0);
    }

    #[test]
    fn convexity_and_reflex_vertices() {
        let l = poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
            .unwrap();
        assert_eq!(l.reflex_vertices(), vec![3]);
        // straight angle is allowed
        let q = poly(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        assert!(q.is_convex());
    }

    #[test]
    fn triangulation_covers_area() {
        let l = poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
            .unwrap();
        let tris = l.triangulate().unwrap();
        let a: f64 = tris.iter().map(|t| 0.5 * orient(t[0], t[1], t[2])).sum();
        assert!((a - 3.0).abs() < 1e-14);
        assert!(tris.iter().all(|t| orient(t[0], t[1], t[2]) > 0.0));

        let q = poly(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        assert_eq!(q.triangulate().unwrap().len(), 1);
    }
}
