//! Scaled monomial bases on polygons, polynomial bookkeeping and mass matrices.
//!
//! Monomials are enumerated in graded order, and within one degree `d` by
//! decreasing power of `x`: `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.
//! This ordering is used by every matrix in the crate.

mod quadrature1d;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geometry::{polygon_quadrature, Point2, Polygon};
use crate::Result;

pub use quadrature1d::{gauss, gauss_lobatto};

/// `dim P_k` in `d` variables, with `P_{-1} = {0}`.
pub fn poly_dim(k: i32, d: u32) -> usize {
    if k < 0 {
        return 0;
    }
    let k = k as usize;
    match d {
        1 => k + 1,
        2 => (k + 1) * (k + 2) / 2,
        _ => panic!("only one and two variables are supported"),
    }
}

/// Exponent pair of a bivariate monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub ax: usize,
    pub ay: usize,
}

impl MultiIndex {
    pub const fn new(ax: usize, ay: usize) -> Self {
        Self { ax, ay }
    }

    pub fn degree(self) -> usize {
        self.ax + self.ay
    }

    /// Position in the graded ordering.
    pub fn index(self) -> usize {
        let d = self.degree();
        d * (d + 1) / 2 + self.ay
    }

    pub fn from_index(i: usize) -> Self {
        let mut d = 0;
        while (d + 1) * (d + 2) / 2 <= i {
            d += 1;
        }
        let ay = i - d * (d + 1) / 2;
        Self { ax: d - ay, ay }
    }
}

/// All multi-indices of total degree `<= k` in graded order.
pub fn multi_indices(k: i32) -> Vec<MultiIndex> {
    (0..poly_dim(k, 2)).map(MultiIndex::from_index).collect()
}

/// Scaled monomials `m_a(x) = ((x - center) / h)^a` of degree `<= degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMonomialBasis {
    pub center: Point2,
    pub h: f64,
    pub degree: usize,
}

impl ScaledMonomialBasis {
    pub fn new(center: Point2, h: f64, degree: usize) -> Self {
        assert!(degree < 32, "monomial degree {degree} out of range");
        Self { center, h, degree }
    }

    /// Centered at the centroid and scaled by the diameter of `p`.
    pub fn for_polygon(p: &Polygon, degree: usize) -> Self {
        Self::new(p.centroid(), p.diameter(), degree)
    }

    pub fn len(&self) -> usize {
        poly_dim(self.degree as i32, 2)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scaled(&self, p: Point2) -> (f64, f64) {
        ((p.x - self.center.x) / self.h, (p.y - self.center.y) / self.h)
    }

    /// Values of all members at `p`, written into `out[..len]`.
    pub fn eval_into(&self, p: Point2, out: &mut [f64]) {
        let (xi, eta) = self.scaled(p);
        let mut px = [1.0; 32];
        let mut py = [1.0; 32];
        for d in 1..=self.degree {
            px[d] = px[d - 1] * xi;
            py[d] = py[d - 1] * eta;
        }
        let mut i = 0;
        for d in 0..=self.degree {
            for ay in 0..=d {
                out[i] = px[d - ay] * py[ay];
                i += 1;
            }
        }
    }

    pub fn eval_point(&self, p: Point2) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    /// Matrix with one row per point and one column per member.
    pub fn eval(&self, pts: &[Point2]) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(pts.len(), n);
        let mut row = vec![0.0; n];
        for (r, &p) in pts.iter().enumerate() {
            self.eval_into(p, &mut row);
            for c in 0..n {
                m[(r, c)] = row[c];
            }
        }
        m
    }

    /// `(d/dx, d/dy)` of every member at every point.
    pub fn eval_grad(&self, pts: &[Point2]) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.len();
        let (mut gx, mut gy) = (DMatrix::zeros(pts.len(), n), DMatrix::zeros(pts.len(), n));
        for (r, &p) in pts.iter().enumerate() {
            let (xi, eta) = self.scaled(p);
            for c in 0..n {
                let a = MultiIndex::from_index(c);
                if a.ax > 0 {
                    gx[(r, c)] = a.ax as f64 * xi.powi(a.ax as i32 - 1) * eta.powi(a.ay as i32) / self.h;
                }
                if a.ay > 0 {
                    gy[(r, c)] = a.ay as f64 * xi.powi(a.ax as i32) * eta.powi(a.ay as i32 - 1) / self.h;
                }
            }
        }
        (gx, gy)
    }
}

/// A polynomial as coefficients in a (scaled) monomial basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), poly_dim(degree as i32, 2), "coefficient length must match degree");
        Self { degree, coeffs }
    }

    pub fn zeros(degree: usize) -> Self {
        Self::new(degree, vec![0.0; poly_dim(degree as i32, 2)])
    }

    /// The single monomial `m_a`.
    pub fn monomial(a: MultiIndex) -> Self {
        let mut p = Self::zeros(a.degree());
        p.coeffs[a.index()] = 1.0;
        p
    }

    /// Product; exact since `m_a m_b = m_{a+b}` for a shared center and scale.
    pub fn mul(&self, other: &PolyCoeffs) -> PolyCoeffs {
        let mut out = Self::zeros(self.degree + other.degree);
        for (i, &u) in self.coeffs.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            let a = MultiIndex::from_index(i);
            for (j, &v) in other.coeffs.iter().enumerate() {
                let b = MultiIndex::from_index(j);
                out.coeffs[MultiIndex::new(a.ax + b.ax, a.ay + b.ay).index()] += u * v;
            }
        }
        out
    }

    pub fn eval(&self, basis: &ScaledMonomialBasis, p: Point2) -> f64 {
        let b = ScaledMonomialBasis::new(basis.center, basis.h, self.degree);
        b.eval_point(p).iter().zip(&self.coeffs).map(|(m, c)| m * c).sum()
    }
}

/// `∫_E m_g` for every `|g| <= degree`, by polygon quadrature of matching
/// exactness.
pub fn monomial_integrals(basis: &ScaledMonomialBasis, p: &Polygon, degree: usize) -> Result<Vec<f64>> {
    let big = ScaledMonomialBasis::new(basis.center, basis.h, degree);
    let mut out = vec![0.0; big.len()];
    let mut row = vec![0.0; big.len()];
    for (q, w) in polygon_quadrature(p, degree)? {
        big.eval_into(q, &mut row);
        for (o, r) in out.iter_mut().zip(&row) {
            *o += w * r;
        }
    }
    Ok(out)
}

/// Mass matrix `H_ab = ∫_E m_a m_b (w)` on the members of `basis`.
pub fn mass_matrix(basis: &ScaledMonomialBasis, p: &Polygon, weight: Option<&PolyCoeffs>) -> Result<DMatrix<f64>> {
    let wdeg = weight.map_or(0, |w| w.degree);
    let ints = monomial_integrals(basis, p, 2 * basis.degree + wdeg)?;
    Ok(mass_matrix_from_integrals(basis.degree, &ints, weight))
}

/// Same as [`mass_matrix`] from precomputed monomial integrals.
pub fn mass_matrix_from_integrals(degree: usize, ints: &[f64], weight: Option<&PolyCoeffs>) -> DMatrix<f64> {
    let n = poly_dim(degree as i32, 2);
    let one = PolyCoeffs::new(0, vec![1.0]);
    let w = weight.unwrap_or(&one);
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (MultiIndex::from_index(i), MultiIndex::from_index(j));
        w.coeffs
            .iter()
            .enumerate()
            .map(|(g, &wg)| {
                let g = MultiIndex::from_index(g);
                wg * ints[MultiIndex::new(a.ax + b.ax + g.ax, a.ay + b.ay + g.ay).index()]
            })
            .sum()
    })
}
