//! Gauss-Legendre and Gauss-Lobatto-Legendre rules on `[-1, 1]`.

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1), valid away from the endpoints
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `npts`-point Gauss-Legendre rule, exact for degree `2 npts - 1`.
///
/// Nodes are returned in ascending order.
pub fn gauss(npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1, "Gauss rule needs at least one point");
    let n = npts;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `npts`-point Gauss-Lobatto-Legendre rule (endpoints included), exact for
/// degree `2 npts - 3`.
pub fn gauss_lobatto(npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 2, "Gauss-Lobatto rule needs at least two points");
    let n = npts - 1;
    let nf = n as f64;
    let mut nodes = vec![0.0; npts];
    let mut weights = vec![0.0; npts];
    for i in 0..npts.div_ceil(2) {
        // Chebyshev-Gauss-Lobatto start, then Newton on (1 - x^2) P_n'(x)
        let mut x = -(std::f64::consts::PI * i as f64 / nf).cos();
        if i > 0 {
            for _ in 0..100 {
                let (p, _) = legendre(n, x);
                let (pm1, _) = legendre(n - 1, x);
                // f = x P_n - P_{n-1} ∝ (1 - x^2) P_n',  f' = (n + 1) P_n
                let dx = (x * p - pm1) / ((nf + 1.0) * p);
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
        }
        let (p, _) = legendre(n, x);
        let w = 2.0 / (nf * (nf + 1.0) * p * p);
        nodes[i] = x;
        nodes[npts - 1 - i] = -x;
        weights[i] = w;
        weights[npts - 1 - i] = w;
    }
    if npts % 2 == 1 {
        nodes[npts / 2] = 0.0;
    }
    (nodes, weights)
}
