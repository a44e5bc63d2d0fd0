//! Local bilinear forms of the convection-diffusion-reaction problem,
//! conforming global assembly, Dirichlet elimination and the sparse solve.

mod market;
mod system;

pub use market::{write_matrix_market, write_vector_market};
pub use system::{
    apply_dirichlet, assemble, solve, solve_problem, Assembled, GlobalDofMap, ReducedSystem, Solution,
    SparseSystem,
};

use nalgebra::{DMatrix, DVector};

use crate::element::ElementOperators;
use crate::geometry::{polygon_quadrature, Point2, Polygon};
use crate::{Error, Result};

pub type ScalarField = Box<dyn Fn(Point2) -> f64 + Send + Sync>;
pub type VectorField = Box<dyn Fn(Point2) -> [f64; 2] + Send + Sync>;
pub type TensorField = Box<dyn Fn(Point2) -> [[f64; 2]; 2] + Send + Sync>;

/// `div(-κ ∇p + b p) + γ p = f` in the domain, `p = g` on its boundary.
///
/// Absent convection or reaction fields are skipped during assembly rather
/// than integrated as zero.
pub struct ModelProblem {
    pub name: String,
    pub diffusion: TensorField,
    pub convection: Option<VectorField>,
    pub reaction: Option<ScalarField>,
    pub source: ScalarField,
    pub dirichlet: ScalarField,
    pub exact: Option<ScalarField>,
    pub exact_gradient: Option<VectorField>,
}

impl std::fmt::Debug for ModelProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelProblem")
            .field("name", &self.name)
            .field("convection", &self.convection.is_some())
            .field("reaction", &self.reaction.is_some())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ModelProblem {
    /// `-Δp = f` with `p = g` on the boundary.
    pub fn poisson(name: impl Into<String>, source: ScalarField, dirichlet: ScalarField) -> Self {
        Self {
            name: name.into(),
            diffusion: Box::new(|_| [[1.0, 0.0], [0.0, 1.0]]),
            convection: None,
            reaction: None,
            source,
            dirichlet,
            exact: None,
            exact_gradient: None,
        }
    }

    pub fn with_exact(mut self, exact: ScalarField, gradient: VectorField) -> Self {
        self.exact = Some(exact);
        self.exact_gradient = Some(gradient);
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.convection.is_none()
    }
}

fn check_diffusion(k: [[f64; 2]; 2], at: Point2) -> Result<()> {
    let scale = k[0][0].abs().max(k[1][1].abs()).max(k[0][1].abs());
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let finite = k.iter().flatten().all(|v| v.is_finite());
    if !finite || (k[0][1] - k[1][0]).abs() > 1e-12 * scale || k[0][0] <= 0.0 || det <= 0.0 {
        return Err(Error::Model(format!(
            "diffusion tensor {k:?} at ({}, {}) is not symmetric positive definite",
            at.x, at.y
        )));
    }
    Ok(())
}

/// The separate terms of an element system, all indexed by local dofs.
#[derive(Clone, Debug)]
pub struct LocalForms {
    /// `K_ij = ∫ κ Π∇φ_j · Π∇φ_i`.
    pub stiffness: DMatrix<f64>,
    /// `C_ij = -∫ Π⁰φ_j (b · Π∇φ_i)`; zero without convection.
    pub convection: DMatrix<f64>,
    /// `R_ij = ∫ γ Π⁰φ_j Π⁰φ_i`; zero without reaction.
    pub reaction: DMatrix<f64>,
    /// `τ (I - D_S Π^0_k)ᵀ (I - D_S Π^0_k)` with `τ` the mean diagonal of `K`
    /// over the boundary dofs.
    pub stabilization: DMatrix<f64>,
    /// `f_i = ∫ f Π^0_k φ_i`.
    pub load: DVector<f64>,
}

impl LocalForms {
    pub fn matrix(&self) -> DMatrix<f64> {
        &self.stiffness + &self.convection + &self.reaction + &self.stabilization
    }
}

/// Element matrix `K + C + R + S_stab` and load vector.
///
/// Gradients enter through `Π^0_{k-1} ∇φ`, function values in the
/// convection and reaction terms through `Π^0_{k-1} φ`, the load through
/// `Π^0_k φ`.
pub fn local_system(p: &Polygon, ops: &ElementOperators, prob: &ModelProblem) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let forms = local_forms(p, ops, prob)?;
    Ok((forms.matrix(), forms.load))
}

pub fn local_forms(p: &Polygon, ops: &ElementOperators, prob: &ModelProblem) -> Result<LocalForms> {
    let k = ops.k();
    let s = ops.n_dofs();
    let quad = polygon_quadrature(p, 2 * k + 2)?;
    let nq = quad.len();
    let nk = ops.basis.len();
    let nl = ops.pi0km1.nrows();

    let mut vals = DMatrix::zeros(nq, nk);
    let mut row = vec![0.0; nk];
    for (q, &(pt, _)) in quad.iter().enumerate() {
        ops.basis.eval_into(pt, &mut row);
        for (a, v) in row.iter().enumerate() {
            vals[(q, a)] = *v;
        }
    }
    let low = vals.columns(0, nl);
    // values at the quadrature points of the projected fields, one column per dof
    let gx = low * &ops.pi0grad.0;
    let gy = low * &ops.pi0grad.1;
    let p_low = low * &ops.pi0km1;
    let p_full = &vals * &ops.pi0k;

    let mut wxx = DMatrix::zeros(nq, s);
    let mut wyy = DMatrix::zeros(nq, s);
    let mut conv = DMatrix::zeros(nq, s);
    let mut react = DMatrix::zeros(nq, s);
    let mut load = DVector::zeros(nq);
    for (q, &(pt, w)) in quad.iter().enumerate() {
        let kap = (prob.diffusion)(pt);
        check_diffusion(kap, pt)?;
        // rows of κ ∇φ weighted by w
        for j in 0..s {
            wxx[(q, j)] = w * (kap[0][0] * gx[(q, j)] + kap[0][1] * gy[(q, j)]);
            wyy[(q, j)] = w * (kap[1][0] * gx[(q, j)] + kap[1][1] * gy[(q, j)]);
        }
        if let Some(b) = &prob.convection {
            let [bx, by] = b(pt);
            for j in 0..s {
                conv[(q, j)] = w * (bx * gx[(q, j)] + by * gy[(q, j)]);
            }
        }
        if let Some(gamma) = &prob.reaction {
            let g = gamma(pt);
            for j in 0..s {
                react[(q, j)] = w * g * p_low[(q, j)];
            }
        }
        load[q] = w * (prob.source)(pt);
    }

    let stiffness = gx.transpose() * &wxx + gy.transpose() * &wyy;
    // internal-moment dual functions carry stiffness set by the moment
    // normalization, so only vertex and edge dofs fix the scale
    let nb = ops.layout.n_boundary();
    let tau = stiffness.diagonal().rows(0, nb).sum() / nb as f64;
    Ok(LocalForms {
        convection: -(conv.transpose() * &p_low),
        reaction: p_low.transpose() * &react,
        stabilization: tau * stabilization_kernel_form(ops),
        load: p_full.transpose() * load,
        stiffness,
    })
}

/// `(I - D_S Π^0_k)ᵀ (I - D_S Π^0_k)`, before scaling.
pub fn stabilization_kernel_form(ops: &ElementOperators) -> DMatrix<f64> {
    let s = ops.n_dofs();
    let defect = DMatrix::identity(s, s) - &ops.ds * &ops.pi0k;
    defect.transpose() * defect
}
