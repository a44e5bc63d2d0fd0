//! Per-element serendipity machinery.
//!
//! Degrees of freedom of an element, in order:
//!
//! 1. values at the vertices,
//! 2. values at the `k - 1` interior Gauss-Lobatto nodes of every edge,
//!    listed edge by edge along the counterclockwise loop,
//! 3. retained internal moments `(1/|E|) ∫_E φ m_a (w2)` for `|a| <= k_int`.
//!
//! Boundary dofs always come first. The moments of degree above `k_int`
//! (and, for weighted layouts, the plain moments) are not dofs of the
//! reduced space: they are defined from the serendipity projection
//! [`build_pi_s`] of the retained dofs.

mod operators;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{distinct_edge_lines, reentrant_weight, Point2, Polygon};
use crate::polynomials::{gauss_lobatto, poly_dim, PolyCoeffs};
use crate::{Error, Result};

pub use operators::{
    build_d, build_pi0_grad, build_pi_s, check_property_s, extend_and_project, ElementDump, ElementOperators,
    PropertyCheck, PROPERTY_S_THRESHOLD,
};

/// Default collinearity tolerance for exact-geometry meshes.
pub const DEFAULT_THETA0: f64 = 1e-8;

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 12;

/// How many internal moments an element keeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SerendipityStrategy {
    /// Moments up to `k - 2`: the dof count of the original nodal space.
    Original,
    /// Moments up to `k - 3` on every element.
    Lazy,
    /// Moments up to `k - eta_E(theta0)`.
    Stingy { theta0: f64 },
    /// Moments up to a fixed degree, mainly for experiments.
    FixedInternalDegree(i32),
}

impl SerendipityStrategy {
    pub fn stingy() -> Self {
        SerendipityStrategy::Stingy { theta0: DEFAULT_THETA0 }
    }
}

impl fmt::Display for SerendipityStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SerendipityStrategy::Original => write!(f, "original"),
            SerendipityStrategy::Lazy => write!(f, "lazy"),
            SerendipityStrategy::Stingy { theta0 } => write!(f, "stingy:{theta0:e}"),
            SerendipityStrategy::FixedInternalDegree(j) => write!(f, "fixed:{j}"),
        }
    }
}

/// Parses `original`, `lazy`, `stingy`, `stingy:<theta0>` and `fixed:<j>`.
impl FromStr for SerendipityStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown strategy `{s}`"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name.trim().to_ascii_lowercase().as_str(), arg) {
            ("original", None) => Ok(SerendipityStrategy::Original),
            ("lazy", None) => Ok(SerendipityStrategy::Lazy),
            ("stingy", None) => Ok(SerendipityStrategy::stingy()),
            ("stingy", Some(a)) => {
                let theta0: f64 = a.trim().parse().map_err(|_| bad())?;
                if !(theta0.is_finite() && theta0 >= 0.0) {
                    return Err(Error::InvalidParameter(format!("theta0 must be finite and >= 0, got {a}")));
                }
                Ok(SerendipityStrategy::Stingy { theta0 })
            }
            ("fixed", Some(a)) => {
                let j: i32 = a.trim().parse().map_err(|_| bad())?;
                Ok(SerendipityStrategy::FixedInternalDegree(j.max(-1)))
            }
            _ => Err(bad()),
        }
    }
}

/// Enumeration of the dofs of one element under a strategy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DofLayout {
    pub k: usize,
    pub n_vertices: usize,
    /// Highest degree of retained internal moments, `-1` for none.
    pub internal_degree: i32,
    /// Re-entrant weight `w2` for non-convex stingy layouts.
    pub weight: Option<PolyCoeffs>,
    pub eta: usize,
    pub convex: bool,
}

impl DofLayout {
    pub fn n_edges(&self) -> usize {
        self.n_vertices
    }

    pub fn n_boundary(&self) -> usize {
        self.n_vertices + self.n_edges() * (self.k - 1)
    }

    pub fn n_internal(&self) -> usize {
        poly_dim(self.internal_degree, 2)
    }

    /// Number of retained dofs, `S`.
    pub fn s(&self) -> usize {
        self.n_boundary() + self.n_internal()
    }

    /// Dimension of the full space `V_{k,k}(E)`: `k N_e + pi_k`.
    pub fn n_full(&self) -> usize {
        self.k * self.n_edges() + poly_dim(self.k as i32, 2)
    }

    pub fn edge_dof(&self, edge: usize, slot: usize) -> usize {
        self.n_vertices + edge * (self.k - 1) + slot
    }

    pub fn internal_dof(&self, a: usize) -> usize {
        self.n_boundary() + a
    }
}

pub(crate) fn check_degree(k: usize) -> Result<()> {
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(Error::InvalidParameter(format!("degree k must lie in 1..={MAX_DEGREE}, got {k}")));
    }
    Ok(())
}

/// Choose the retained internal moments of `p` for degree `k`.
pub fn build_dof_layout(p: &Polygon, k: usize, strategy: SerendipityStrategy) -> Result<DofLayout> {
    check_degree(k)?;
    let convex = p.is_convex();
    let k_i = k as i32;
    let (eta, internal_degree, weight) = match strategy {
        SerendipityStrategy::Original => (distinct_edge_lines(p, DEFAULT_THETA0).eta, k_i - 2, None),
        SerendipityStrategy::Lazy => (distinct_edge_lines(p, DEFAULT_THETA0).eta, k_i - 3, None),
        // moments above degree k - 2 are not functionals on the virtual space
        SerendipityStrategy::FixedInternalDegree(j) if j > k_i - 2 => {
            return Err(Error::InvalidParameter(format!(
                "internal moment degree {j} exceeds k - 2 = {}",
                k_i - 2
            )))
        }
        SerendipityStrategy::FixedInternalDegree(j) => (distinct_edge_lines(p, DEFAULT_THETA0).eta, j, None),
        SerendipityStrategy::Stingy { theta0 } => {
            let eta = distinct_edge_lines(p, theta0).eta;
            let deg = k_i - eta as i32;
            if deg < 0 || convex {
                (eta, deg, None)
            } else {
                (eta, deg, reentrant_weight(p)?)
            }
        }
    };
    Ok(DofLayout {
        k,
        n_vertices: p.n_vertices(),
        internal_degree: internal_degree.max(-1),
        weight,
        eta,
        convex,
    })
}

/// Interior nodes of the `(k+1)`-point Gauss-Lobatto rule mapped to `[0, 1]`.
pub fn edge_node_params(k: usize) -> Vec<f64> {
    let (t, _) = gauss_lobatto(k + 1);
    t[1..k].iter().map(|&t| 0.5 * (t + 1.0)).collect()
}

/// Points carrying the boundary dofs: vertices, then edge nodes.
pub fn boundary_dof_points(p: &Polygon, k: usize) -> Vec<Point2> {
    let params = edge_node_params(k);
    let mut pts = p.vertices().to_vec();
    for (a, b) in p.edges() {
        pts.extend(params.iter().map(|&t| a.lerp(b, t)));
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[(f64, f64)]) -> Polygon {
        Polygon::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    fn square() -> Polygon {
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn stingy_square_k2_has_no_internal() {
        let l = build_dof_layout(&square(), 2, SerendipityStrategy::stingy()).unwrap();
        assert_eq!(l.n_internal(), 0);
        assert_eq!(l.s(), 8);
        assert_eq!(l.n_full(), 2 * 4 + 6);
    }

    #[test]
    fn stingy_triangle_k3_keeps_mean() {
        let t = poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let l = build_dof_layout(&t, 3, SerendipityStrategy::stingy()).unwrap();
        assert_eq!(l.internal_degree, 0);
        assert_eq!(l.s(), 10);
        assert_eq!(l.s(), poly_dim(3, 2));
    }

    #[test]
    fn stingy_square_k4_keeps_mean() {
        let l = build_dof_layout(&square(), 4, SerendipityStrategy::stingy()).unwrap();
        assert_eq!(l.internal_degree, 0);
        assert_eq!(l.s(), 17);
    }

    #[test]
    fn strategy_counts() {
        let hex: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let t = std::f64::consts::PI / 3.0 * i as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let p = poly(&hex);
        for k in 1..=6 {
            let n = |s| build_dof_layout(&p, k, s).unwrap().n_internal();
            assert_eq!(n(SerendipityStrategy::Original), poly_dim(k as i32 - 2, 2));
            assert_eq!(n(SerendipityStrategy::Lazy), poly_dim(k as i32 - 3, 2));
            assert_eq!(n(SerendipityStrategy::stingy()), poly_dim(k as i32 - 6, 2));
        }
    }

    #[test]
    fn nonconvex_stingy_uses_weight() {
        let q = poly(&[(0.0, 0.0), (2.0, 0.0), (0.6, 0.6), (0.0, 2.0)]);
        let l = build_dof_layout(&q, 4, SerendipityStrategy::stingy()).unwrap();
        assert_eq!(l.internal_degree, 0);
        assert!(l.weight.is_some());
        let l = build_dof_layout(&q, 3, SerendipityStrategy::stingy()).unwrap();
        assert_eq!(l.internal_degree, -1);
        assert!(l.weight.is_none());
    }

    #[test]
    fn too_many_reentrant_lines_under_stingy() {
        let comb = poly(&[
            (0.0, 0.0),
            (3.0, 0.0),
            (3.0, 2.0),
            (2.5, 2.0),
            (2.5, 1.0),
            (2.0, 1.0),
            (2.0, 2.0),
            (1.0, 2.0),
            (1.0, 1.0),
            (0.5, 1.0),
            (0.5, 2.0),
            (0.0, 2.0),
        ]);
        let eta = distinct_edge_lines(&comb, DEFAULT_THETA0).eta;
        assert!(matches!(
            build_dof_layout(&comb, eta, SerendipityStrategy::stingy()),
            Err(Error::UnsupportedShape(_))
        ));
        // below eta nothing internal is needed, so the shape is fine
        assert!(build_dof_layout(&comb, 3, SerendipityStrategy::stingy()).is_ok());
        assert!(build_dof_layout(&comb, eta, SerendipityStrategy::Lazy).is_ok());
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("lazy".parse::<SerendipityStrategy>().unwrap(), SerendipityStrategy::Lazy);
        assert_eq!("Original".parse::<SerendipityStrategy>().unwrap(), SerendipityStrategy::Original);
        assert_eq!(
            "stingy:1e-2".parse::<SerendipityStrategy>().unwrap(),
            SerendipityStrategy::Stingy { theta0: 1e-2 }
        );
        assert_eq!(
            "fixed:-5".parse::<SerendipityStrategy>().unwrap(),
            SerendipityStrategy::FixedInternalDegree(-1)
        );
        for bad in ["", "lazy:1", "stingy:nan", "stingy:-1", "fixed:", "greedy"] {
            assert!(bad.parse::<SerendipityStrategy>().is_err(), "{bad}");
        }
        for s in [SerendipityStrategy::Lazy, SerendipityStrategy::stingy(), SerendipityStrategy::FixedInternalDegree(2)] {
            assert_eq!(s.to_string().parse::<SerendipityStrategy>().unwrap(), s);
        }
    }

    #[test]
    fn degree_bounds() {
        assert!(build_dof_layout(&square(), 0, SerendipityStrategy::Lazy).is_err());
        assert!(build_dof_layout(&square(), MAX_DEGREE + 1, SerendipityStrategy::Lazy).is_err());
    }

    #[test]
    fn fixed_degree_is_capped_at_k_minus_2() {
        let fixed = SerendipityStrategy::FixedInternalDegree;
        assert_eq!(build_dof_layout(&square(), 3, fixed(1)).unwrap().n_internal(), 3);
        assert!(matches!(
            build_dof_layout(&square(), 3, fixed(2)),
            Err(Error::InvalidParameter(_))
        ));
    }
}
