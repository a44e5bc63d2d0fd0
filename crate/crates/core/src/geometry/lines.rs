//! Straight lines supporting polygon edges: the collinearity count `eta`
//! and detection of re-entrant lines on non-convex polygons.

use serde::{Deserialize, Serialize};

use super::{Point2, Polygon};
use crate::polynomials::PolyCoeffs;
use crate::{Error, Result};

/// Normalised line `a x + b y + c = 0` with `a^2 + b^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineEquation {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineEquation {
    /// Line through `p -> q`, oriented so `(a, b)` is the outward normal of a
    /// counterclockwise polygon edge.
    pub fn through(p: Point2, q: Point2) -> Self {
        let d = q - p;
        let len = d.norm();
        let (a, b) = (d.y / len, -d.x / len);
        Self {
            a,
            b,
            c: -(a * p.x + b * p.y),
        }
    }

    pub fn eval(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn distance(&self, p: Point2) -> f64 {
        self.eval(p).abs()
    }

    /// The same affine function written in the scaled coordinates
    /// `((x - center) / h)`, divided by `h` so it stays O(1) on the element.
    pub fn in_scaled_coordinates(&self, center: Point2, h: f64) -> PolyCoeffs {
        PolyCoeffs::new(1, vec![self.eval(center) / h, self.a, self.b])
    }
}

/// Result of grouping the edges of a polygon by supporting line.
#[derive(Clone, Debug)]
pub struct EdgeLines {
    /// Number of distinct lines, never below 3.
    pub eta: usize,
    /// One representative per class, taken from the first edge of the class.
    pub lines: Vec<LineEquation>,
    /// Class index of every edge.
    pub edge_class: Vec<usize>,
}

/// Count the distinct straight lines covering the boundary of `p`.
///
/// Two edge lines are identified when the smaller angle between them is at
/// most `theta0` and each edge's endpoints lie within `theta0 * h_E` of the
/// other line. Classes are closed transitively.
pub fn distinct_edge_lines(p: &Polygon, theta0: f64) -> EdgeLines {
    let n = p.n_edges();
    let h = p.diameter();
    let edge_lines: Vec<LineEquation> = p.edges().map(|(a, b)| LineEquation::through(a, b)).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    let close = |i: usize, j: usize| {
        let (li, lj) = (&edge_lines[i], &edge_lines[j]);
        let cross = li.a * lj.b - li.b * lj.a;
        let dot = li.a * lj.a + li.b * lj.b;
        let angle = cross.abs().atan2(dot.abs());
        if angle > theta0 {
            return false;
        }
        let (pi, qi) = p.edge(i);
        let (pj, qj) = p.edge(j);
        let tol = theta0 * h;
        lj.distance(pi) <= tol && lj.distance(qi) <= tol && li.distance(pj) <= tol && li.distance(qj) <= tol
    };

    for i in 0..n {
        for j in i + 1..n {
            if close(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut class_of_root = vec![usize::MAX; n];
    let mut lines = Vec::new();
    let mut edge_class = Vec::with_capacity(n);
    for (i, line) in edge_lines.iter().enumerate() {
        let r = find(&mut parent, i);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = lines.len();
            lines.push(*line);
        }
        edge_class.push(class_of_root[r]);
    }
    EdgeLines {
        eta: lines.len().max(3),
        lines,
        edge_class,
    }
}

/// Classification of the lines that cut through a polygon's interior.
#[derive(Clone, Debug, PartialEq)]
pub enum ReentrantLines {
    Convex,
    Two([LineEquation; 2]),
    TooMany(usize),
}

/// Find the edge lines that take both signs on the polygon.
pub fn reentrant_lines(p: &Polygon) -> ReentrantLines {
    if p.is_convex() {
        return ReentrantLines::Convex;
    }
    let tol = 1e-10 * p.diameter();
    let found: Vec<LineEquation> = distinct_edge_lines(p, 1e-10)
        .lines
        .into_iter()
        .filter(|l| {
            let vals = p.vertices().iter().map(|&v| l.eval(v));
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s), hi.max(s))
            });
            lo < -tol && hi > tol
        })
        .collect();
    match found.len() {
        0 => ReentrantLines::Convex,
        2 => ReentrantLines::Two([found[0], found[1]]),
        m => ReentrantLines::TooMany(m),
    }
}

/// The quadratic weight `w2` (product of the two re-entrant lines, scaled
/// coordinates of `p`), or `None` for convex polygons.
pub fn reentrant_weight(p: &Polygon) -> Result<Option<PolyCoeffs>> {
    match reentrant_lines(p) {
        ReentrantLines::Convex => Ok(None),
        ReentrantLines::Two([l0, l1]) => {
            let (c, h) = (p.centroid(), p.diameter());
            Ok(Some(
                l0.in_scaled_coordinates(c, h)
                    .mul(&l1.in_scaled_coordinates(c, h)),
            ))
        }
        ReentrantLines::TooMany(m) => Err(Error::UnsupportedShape(format!(
            "{m} re-entrant lines; only two are supported, use the lazy strategy"
        ))),
    }
}
