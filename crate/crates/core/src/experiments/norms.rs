use nalgebra::DVector;
use serde::Serialize;

use crate::assembly::{ModelProblem, Solution};
use crate::geometry::{polygon_quadrature, Mesh};
use crate::{Error, Result};

/// Errors of the projected discrete solution, relative to the norms of the
/// exact one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub rel_l2: f64,
    pub rel_h1: f64,
}

/// Compare `Π^0_k p_h` with `p` in `L2` and `Π^0_{k-1} ∇p_h` with `∇p` in
/// `L2`, element by element. A vanishing exact norm leaves the error absolute.
pub fn error_norms(mesh: &Mesh, sol: &Solution, prob: &ModelProblem) -> Result<ErrorNorms> {
    let (exact, gradient) = match (&prob.exact, &prob.exact_gradient) {
        (Some(u), Some(g)) => (u, g),
        _ => {
            return Err(Error::ReportUnavailable(format!(
                "problem {} has no exact solution",
                prob.name
            )))
        }
    };
    let (mut e0, mut n0, mut e1, mut n1) = (0.0, 0.0, 0.0, 0.0);
    for (c, ops) in sol.assembled.operators.iter().enumerate() {
        let p = mesh.cell_polygon(c)?;
        let values: DVector<f64> = sol.cell_values(c);
        let coeffs = &ops.pi0k * &values;
        let gx = &ops.pi0grad.0 * &values;
        let gy = &ops.pi0grad.1 * &values;
        let nl = gx.len();
        let mut basis = vec![0.0; ops.basis.len()];
        for (q, w) in polygon_quadrature(&p, 2 * ops.k() + 4)? {
            ops.basis.eval_into(q, &mut basis);
            let uh: f64 = coeffs.iter().zip(&basis).map(|(a, b)| a * b).sum();
            let gxh: f64 = gx.iter().zip(&basis[..nl]).map(|(a, b)| a * b).sum();
            let gyh: f64 = gy.iter().zip(&basis[..nl]).map(|(a, b)| a * b).sum();
            let u = exact(q);
            let [ux, uy] = gradient(q);
            e0 += w * (uh - u).powi(2);
            n0 += w * u * u;
            e1 += w * ((gxh - ux).powi(2) + (gyh - uy).powi(2));
            n1 += w * (ux * ux + uy * uy);
        }
    }
    let rel = |e: f64, n: f64| if n > 0.0 { (e / n).sqrt() } else { e.sqrt() };
    Ok(ErrorNorms {
        rel_l2: rel(e0, n0),
        rel_h1: rel(e1, n1),
    })
}
