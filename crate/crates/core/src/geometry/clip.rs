use super::Point2;

/// Clip a convex polygon to the half-plane `a x + b y + c <= 0`
/// (Sutherland-Hodgman on a single plane).
pub fn clip_convex(poly: &[Point2], a: f64, b: f64, c: f64) -> Vec<Point2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = a * p.x + b * p.y + c;
        let fq = a * q.x + b * q.y + c;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            out.push(p.lerp(q, fp / (fp - fq)));
        }
    }
    out
}
