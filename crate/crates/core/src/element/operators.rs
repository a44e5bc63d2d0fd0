use nalgebra::DMatrix;
use serde::Serialize;

use super::{boundary_dof_points, build_dof_layout, DofLayout, SerendipityStrategy};
use crate::geometry::Polygon;
use crate::polynomials::{
    gauss_lobatto, mass_matrix_from_integrals, monomial_integrals, poly_dim, MultiIndex, PolyCoeffs,
    ScaledMonomialBasis,
};
use crate::{Error, Result};

/// Smallest admissible singular value of the column-scaled `D_S`.
pub const PROPERTY_S_THRESHOLD: f64 = 1e-10;

/// Outcome of the property-S rank test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub ok: bool,
    pub min_sv: f64,
}

/// Shared per-element data: basis, moments, mass matrix and the map from
/// plain scaled moments to the retained internal dofs.
struct Prep {
    basis: ScaledMonomialBasis,
    area: f64,
    /// `H_ab = ∫_E m_a m_b` for `|a|, |b| <= k`.
    mass: DMatrix<f64>,
    /// Internal dof `r` = `Σ_b moment_map[r, b] (1/|E|) ∫_E φ m_b`.
    moment_map: DMatrix<f64>,
}

impl Prep {
    fn new(p: &Polygon, layout: &DofLayout) -> Result<Self> {
        let k = layout.k;
        let basis = ScaledMonomialBasis::for_polygon(p, k);
        let ints = monomial_integrals(&basis, p, 2 * k)?;
        let mass = mass_matrix_from_integrals(k, &ints, None);
        let nk = poly_dim(k as i32, 2);
        let n_int = layout.n_internal();
        let mut moment_map = DMatrix::zeros(n_int, nk);
        for a in 0..n_int {
            let ma = PolyCoeffs::monomial(MultiIndex::from_index(a));
            let row = match &layout.weight {
                Some(w) => w.mul(&ma),
                None => ma,
            };
            for (b, &c) in row.coeffs.iter().enumerate() {
                moment_map[(a, b)] = c;
            }
        }
        Ok(Self {
            basis,
            area: p.area(),
            mass,
            moment_map,
        })
    }

    fn d_matrix(&self, p: &Polygon, layout: &DofLayout) -> DMatrix<f64> {
        let nk = self.basis.len();
        let mut d = DMatrix::zeros(layout.s(), nk);
        let pts = boundary_dof_points(p, layout.k);
        d.rows_mut(0, pts.len()).copy_from(&self.basis.eval(&pts));
        if layout.n_internal() > 0 {
            let internal = &self.moment_map * &self.mass / self.area;
            d.rows_mut(layout.n_boundary(), layout.n_internal()).copy_from(&internal);
        }
        d
    }
}

/// `D_S[i, a] = δ_i(m_a)` for every retained dof `i`.
pub fn build_d(p: &Polygon, layout: &DofLayout) -> Result<DMatrix<f64>> {
    Ok(Prep::new(p, layout)?.d_matrix(p, layout))
}

fn column_scales(ds: &DMatrix<f64>) -> Vec<f64> {
    ds.column_iter()
        .map(|c| {
            let m = c.amax();
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect()
}

/// Thin SVD `U diag(σ) Vᵀ` of the column-scaled matrix, for `nrows >= ncols`.
struct ScaledSvd {
    scales: Vec<f64>,
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

fn scaled_svd(ds: &DMatrix<f64>) -> Result<ScaledSvd> {
    let scales = column_scales(ds);
    let scaled = faer::Mat::<f64>::from_fn(ds.nrows(), ds.ncols(), |i, j| ds[(i, j)] / scales[j]);
    let svd = scaled
        .thin_svd()
        .map_err(|e| Error::geometry(format!("SVD of the dof matrix did not converge: {e:?}")))?;
    let to_dense = |m: faer::MatRef<'_, f64>| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let s = svd.S().column_vector();
    Ok(ScaledSvd {
        scales,
        u: to_dense(svd.U()),
        sigma: (0..s.nrows()).map(|i| s[i]).collect(),
        v: to_dense(svd.V()),
    })
}

/// Property S holds iff `D_S` has full column rank; measured by the smallest
/// singular value after dividing each column by its largest entry.
pub fn check_property_s(ds: &DMatrix<f64>) -> PropertyCheck {
    let min_sv = if ds.nrows() < ds.ncols() || ds.ncols() == 0 {
        0.0
    } else {
        scaled_svd(ds).map_or(0.0, |svd| svd.sigma.iter().copied().fold(f64::INFINITY, f64::min))
    };
    PropertyCheck {
        ok: min_sv > PROPERTY_S_THRESHOLD,
        min_sv,
    }
}

/// Least-squares projector `Π^S = (D_Sᵀ D_S)⁻¹ D_Sᵀ`, computed through the
/// SVD of the column-scaled matrix rather than the normal equations.
pub fn build_pi_s(ds: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let check = check_property_s(ds);
    if !check.ok {
        return Err(Error::PropertyS {
            element: None,
            min_sv: check.min_sv,
        });
    }
    let svd = scaled_svd(ds)?;
    let mut inv = svd.v;
    for (j, sv) in svd.sigma.iter().enumerate() {
        inv.column_mut(j).unscale_mut(*sv);
    }
    let mut pi = inv * svd.u.transpose();
    for (i, s) in svd.scales.iter().enumerate() {
        pi.row_mut(i).unscale_mut(*s);
    }
    Ok(pi)
}

fn spd_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(ch) = a.clone().cholesky() {
        return Ok(ch.solve(b));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::geometry("singular mass matrix"))
}

fn extend_with(prep: &Prep, layout: &DofLayout, pi_s: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let s = layout.s();
    // scaled moments of Π^S φ
    let mom_pi = &prep.mass * pi_s / prep.area;
    let n_int = layout.n_internal();
    let mom_full = if n_int == 0 {
        mom_pi
    } else {
        // Correct the projected moments along the rows of the internal
        // functionals so the retained internal dofs are reproduced exactly;
        // the orthogonal complement keeps the moments of Π^S φ.
        let w = &prep.moment_map;
        let mut target = DMatrix::zeros(n_int, s);
        for r in 0..n_int {
            target[(r, layout.internal_dof(r))] = 1.0;
        }
        let residual = target - w * &mom_pi;
        let gram = w * w.transpose();
        let corr = spd_solve(&gram, &residual)?;
        mom_pi + w.transpose() * corr
    };
    let pi0k = spd_solve(&prep.mass, &(&mom_full * prep.area))?;
    Ok((mom_full, pi0k))
}

/// Moments of degree `<= k` of the serendipity-extended basis functions
/// (`MomFull`, scaled by `1/|E|`) and the coefficients of their `L2`
/// projection onto `P_k` (`Π^0_k`).
pub fn extend_and_project(
    p: &Polygon,
    layout: &DofLayout,
    pi_s: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    extend_with(&Prep::new(p, layout)?, layout, pi_s)
}

/// `L2` projection onto `P_{k-1}` of the leading moments.
fn pi0_lower(prep: &Prep, k: usize, mom_full: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = poly_dim(k as i32 - 1, 2);
    let h = prep.mass.view((0, 0), (n, n)).into_owned();
    let rhs = mom_full.rows(0, n) * prep.area;
    spd_solve(&h, &rhs)
}

fn grad_with(prep: &Prep, p: &Polygon, layout: &DofLayout, mom_full: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let k = layout.k;
    let s = layout.s();
    let n = poly_dim(k as i32 - 1, 2);
    let lower = ScaledMonomialBasis::new(prep.basis.center, prep.basis.h, k - 1);
    let (mut rx, mut ry) = (DMatrix::zeros(n, s), DMatrix::zeros(n, s));

    // -∫_E φ ∂m_b from the moments
    for b in 0..n {
        let beta = MultiIndex::from_index(b);
        if beta.ax > 0 {
            let src = MultiIndex::new(beta.ax - 1, beta.ay).index();
            let f = -(beta.ax as f64) / prep.basis.h * prep.area;
            let add = mom_full.row(src) * f;
            rx.row_mut(b).copy_from(&add);
        }
        if beta.ay > 0 {
            let src = MultiIndex::new(beta.ax, beta.ay - 1).index();
            let f = -(beta.ay as f64) / prep.basis.h * prep.area;
            let add = mom_full.row(src) * f;
            ry.row_mut(b).copy_from(&add);
        }
    }

    // ∮ φ m_b n: the (k+1)-point Lobatto rule on the dof nodes is exact for
    // the degree 2k-1 integrand
    let (t, w) = gauss_lobatto(k + 1);
    let nv = layout.n_vertices;
    let mut vals = vec![0.0; n];
    for e in 0..layout.n_edges() {
        let (a, bpt) = p.edge(e);
        let (normal, len) = p.edge_normal(e);
        for (m, (&tm, &wm)) in t.iter().zip(&w).enumerate() {
            let dof = if m == 0 {
                e
            } else if m == k {
                (e + 1) % nv
            } else {
                layout.edge_dof(e, m - 1)
            };
            lower.eval_into(a.lerp(bpt, 0.5 * (tm + 1.0)), &mut vals);
            let f = 0.5 * len * wm;
            for b in 0..n {
                rx[(b, dof)] += f * normal.x * vals[b];
                ry[(b, dof)] += f * normal.y * vals[b];
            }
        }
    }
    let h = prep.mass.view((0, 0), (n, n)).into_owned();
    Ok((spd_solve(&h, &rx)?, spd_solve(&h, &ry)?))
}

/// Coefficients of `Π^0_{k-1} ∂φ/∂x` and `Π^0_{k-1} ∂φ/∂y` for every dof
/// basis function, by integration by parts.
pub fn build_pi0_grad(
    p: &Polygon,
    layout: &DofLayout,
    mom_full: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    grad_with(&Prep::new(p, layout)?, p, layout, mom_full)
}

/// Every per-element matrix the assembly needs.
///
/// Matrices act on the local dof vector of the reduced space: column `j`
/// belongs to the basis function dual to dof `j`.
#[derive(Clone, Debug)]
pub struct ElementOperators {
    pub layout: DofLayout,
    pub basis: ScaledMonomialBasis,
    pub area: f64,
    /// `S x pi_k`.
    pub ds: DMatrix<f64>,
    /// `pi_k x S`, coefficients of `Π^S φ`.
    pub pi_s: DMatrix<f64>,
    /// `pi_k x S`, scaled moments of the extended function.
    pub mom_full: DMatrix<f64>,
    /// `pi_k x S`, coefficients of `Π^0_k φ`.
    pub pi0k: DMatrix<f64>,
    /// `pi_{k-1} x S`, coefficients of `Π^0_{k-1} φ`.
    pub pi0km1: DMatrix<f64>,
    /// `pi_{k-1} x S` each, coefficients of `Π^0_{k-1} ∇φ`.
    pub pi0grad: (DMatrix<f64>, DMatrix<f64>),
    pub min_sv: f64,
}

impl ElementOperators {
    pub fn build(p: &Polygon, k: usize, strategy: SerendipityStrategy) -> Result<Self> {
        Self::from_layout(p, build_dof_layout(p, k, strategy)?)
    }

    pub fn from_layout(p: &Polygon, layout: DofLayout) -> Result<Self> {
        let prep = Prep::new(p, &layout)?;
        let ds = prep.d_matrix(p, &layout);
        let check = check_property_s(&ds);
        let pi_s = build_pi_s(&ds)?;
        let (mom_full, pi0k) = extend_with(&prep, &layout, &pi_s)?;
        let pi0km1 = pi0_lower(&prep, layout.k, &mom_full)?;
        let pi0grad = grad_with(&prep, p, &layout, &mom_full)?;
        Ok(Self {
            basis: prep.basis,
            area: prep.area,
            layout,
            ds,
            pi_s,
            mom_full,
            pi0k,
            pi0km1,
            pi0grad,
            min_sv: check.min_sv,
        })
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn n_dofs(&self) -> usize {
        self.layout.s()
    }

    pub fn dump(&self, element: usize) -> ElementDump {
        let rows = |m: &DMatrix<f64>| m.row_iter().map(|r| r.iter().copied().collect()).collect();
        ElementDump {
            element,
            k: self.layout.k,
            n_vertices: self.layout.n_vertices,
            eta: self.layout.eta,
            internal_degree: self.layout.internal_degree,
            weighted: self.layout.weight.is_some(),
            s: self.layout.s(),
            n_full: self.layout.n_full(),
            min_sv: self.min_sv,
            ds: rows(&self.ds),
            pi_s: rows(&self.pi_s),
            pi0k: rows(&self.pi0k),
        }
    }
}

/// JSON-friendly snapshot of one element's operators.
#[derive(Clone, Debug, Serialize)]
pub struct ElementDump {
    pub element: usize,
    pub k: usize,
    pub n_vertices: usize,
    pub eta: usize,
    pub internal_degree: i32,
    pub weighted: bool,
    pub s: usize,
    pub n_full: usize,
    pub min_sv: f64,
    pub ds: Vec<Vec<f64>>,
    pub pi_s: Vec<Vec<f64>>,
    pub pi0k: Vec<Vec<f64>>,
}
