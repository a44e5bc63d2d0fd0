use super::{Point2, Polygon};
use crate::polynomials::gauss;
use crate::Result;

/// Quadrature on a triangle exact for total degree `exactness`.
///
/// Collapsed (Duffy) tensor Gauss rule: the square `[0,1]^2` is mapped onto
/// the triangle with Jacobian linear in `u`, which costs one extra degree in
/// that direction.
pub fn triangle_quadrature(tri: &[Point2; 3], exactness: usize) -> Vec<(Point2, f64)> {
    let n = (exactness + 3) / 2;
    let (t, w) = gauss(n);
    let [a, b, c] = *tri;
    let twice_area = (b - a).cross(c - a);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (t[i] + 1.0);
        let wu = 0.5 * w[i];
        for j in 0..n {
            let v = 0.5 * (t[j] + 1.0);
            let wv = 0.5 * w[j];
            let p = a + (b - a) * u + (c - b) * (u * v);
            out.push((p, wu * wv * u * twice_area));
        }
    }
    out
}

/// Quadrature over a polygon exact for bivariate polynomials of total
/// degree `<= exactness`, built on a triangulation of the polygon.
pub fn polygon_quadrature(p: &Polygon, exactness: usize) -> Result<Vec<(Point2, f64)>> {
    Ok(p.triangulate()?
        .iter()
        .flat_map(|t| triangle_quadrature(t, exactness))
        .collect())
}

/// Quadrature on the segment `a -> b`, exact for degree `exactness`.
pub fn segment_quadrature(a: Point2, b: Point2, exactness: usize) -> Vec<(Point2, f64)> {
    let n = exactness / 2 + 1;
    let (t, w) = gauss(n);
    let half = 0.5 * a.dist(b);
    t.iter()
        .zip(&w)
        .map(|(&t, &w)| (a.lerp(b, 0.5 * (t + 1.0)), w * half))
        .collect()
}
