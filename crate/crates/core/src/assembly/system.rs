use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;

use super::{local_system, ModelProblem, ScalarField};
use crate::element::{boundary_dof_points, build_dof_layout, DofLayout, ElementOperators, SerendipityStrategy};
use crate::geometry::{Mesh, Point2};
use crate::{Error, Result};

/// Relative residual every accepted solve must reach.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// Global numbering: vertex values, then edge values by canonical edge and
/// slot (lower vertex index first), then internal moments cell by cell.
#[derive(Clone, Debug)]
pub struct GlobalDofMap {
    pub k: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    /// First internal dof of each cell; one extra trailing entry.
    internal_offsets: Vec<usize>,
    cell_dofs: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

impl GlobalDofMap {
    pub fn new(mesh: &Mesh, k: usize, layouts: &[DofLayout]) -> Self {
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let per_edge = k - 1;
        let first_internal = nv + ne * per_edge;
        let mut internal_offsets = Vec::with_capacity(layouts.len() + 1);
        let mut next = first_internal;
        for l in layouts {
            internal_offsets.push(next);
            next += l.n_internal();
        }
        internal_offsets.push(next);

        let mut boundary = vec![false; next];
        for (v, b) in mesh.boundary_vertices().into_iter().enumerate() {
            boundary[v] = b;
        }
        for e in 0..ne {
            if mesh.is_boundary_edge(e) {
                for slot in 0..per_edge {
                    boundary[nv + e * per_edge + slot] = true;
                }
            }
        }

        let cell_dofs = layouts
            .iter()
            .enumerate()
            .map(|(c, l)| {
                let cell = &mesh.cells()[c];
                let mut dofs = cell.clone();
                for (i, &e) in mesh.cell_edges(c).iter().enumerate() {
                    let forward = cell[i] == mesh.edge(e)[0];
                    for slot in 0..per_edge {
                        let s = if forward { slot } else { per_edge - 1 - slot };
                        dofs.push(nv + e * per_edge + s);
                    }
                }
                dofs.extend((0..l.n_internal()).map(|r| internal_offsets[c] + r));
                dofs
            })
            .collect();
        Self {
            k,
            n_vertices: nv,
            n_edges: ne,
            internal_offsets,
            cell_dofs,
            boundary,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.boundary.len()
    }

    pub fn n_internal(&self) -> usize {
        self.n_dofs() - self.internal_offsets[0]
    }

    pub fn n_boundary_dofs(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    /// Global index of every local dof of cell `c`, in local order.
    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.cell_dofs[c]
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }
}

/// Square sparse matrix as sorted `(row, col, value)` entries without
/// duplicates, plus its right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    /// Sum duplicates in a canonical order, so the result does not depend on
    /// the order the contributions arrived in.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>, rhs: Vec<f64>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        Self { n, entries, rhs }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let lookup: std::collections::HashMap<(usize, usize), f64> =
            self.entries.iter().map(|&(r, c, v)| ((r, c), v)).collect();
        let scale = self.entries.iter().map(|e| e.2.abs()).fold(0.0, f64::max);
        let worst = self
            .entries
            .iter()
            .map(|&(r, c, v)| (v - lookup.get(&(c, r)).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }
}

/// Output of [`assemble`].
#[derive(Debug)]
pub struct Assembled {
    pub system: SparseSystem,
    pub dofs: GlobalDofMap,
    pub operators: Vec<ElementOperators>,
}

/// Sum the element systems of every cell. Elements are processed in
/// parallel; the first failing element in cell order is reported.
pub fn assemble(mesh: &Mesh, k: usize, strategy: SerendipityStrategy, prob: &ModelProblem) -> Result<Assembled> {
    let locals: Vec<Result<_>> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let p = mesh.cell_polygon(c)?;
            let layout = build_dof_layout(&p, k, strategy).map_err(|e| e.at_element(c))?;
            let ops = ElementOperators::from_layout(&p, layout).map_err(|e| e.at_element(c))?;
            let (a, f) = local_system(&p, &ops, prob)?;
            Ok((ops, a, f))
        })
        .collect();
    let locals = locals.into_iter().collect::<Result<Vec<_>>>()?;
    let layouts: Vec<DofLayout> = locals.iter().map(|(o, _, _)| o.layout.clone()).collect();
    let dofs = GlobalDofMap::new(mesh, k, &layouts);

    let n = dofs.n_dofs();
    let mut triplets = Vec::with_capacity(locals.iter().map(|(o, _, _)| o.n_dofs().pow(2)).sum());
    let mut loads = Vec::new();
    for (c, (_, a, f)) in locals.iter().enumerate() {
        let map = dofs.cell_dofs(c);
        for (j, &gj) in map.iter().enumerate() {
            for (i, &gi) in map.iter().enumerate() {
                triplets.push((gi, gj, a[(i, j)]));
            }
        }
        loads.extend(map.iter().zip(f.iter()).map(|(&g, &v)| (g, v)));
    }
    loads.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut rhs = vec![0.0; n];
    for (g, v) in loads {
        rhs[g] += v;
    }
    let system = SparseSystem::from_triplets(n, triplets, rhs);
    let operators = locals.into_iter().map(|(o, _, _)| o).collect();
    Ok(Assembled { system, dofs, operators })
}

/// Interior unknowns after eliminating the Dirichlet dofs.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub system: SparseSystem,
    /// Global dof of each reduced unknown.
    pub free: Vec<usize>,
    /// Full-length vector holding the prescribed boundary values.
    pub prescribed: Vec<f64>,
}

impl ReducedSystem {
    /// Merge a reduced solution with the prescribed boundary values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.prescribed.clone();
        for (&g, &v) in self.free.iter().zip(x) {
            full[g] = v;
        }
        full
    }
}

/// Interpolate `g` at the boundary vertices and edge nodes and eliminate
/// those dofs symmetrically.
pub fn apply_dirichlet(asm: &Assembled, mesh: &Mesh, g: &ScalarField) -> Result<ReducedSystem> {
    let dofs = &asm.dofs;
    let n = dofs.n_dofs();
    let mut prescribed = vec![0.0; n];
    let mut seen = vec![false; n];
    for c in 0..mesh.n_cells() {
        let map = dofs.cell_dofs(c);
        if !map.iter().any(|&d| dofs.is_boundary(d)) {
            continue;
        }
        let p = mesh.cell_polygon(c)?;
        let pts: Vec<Point2> = boundary_dof_points(&p, dofs.k);
        for (&d, &pt) in map.iter().zip(&pts) {
            if dofs.is_boundary(d) && !seen[d] {
                seen[d] = true;
                prescribed[d] = g(pt);
            }
        }
    }

    let mut reduced_index = vec![usize::MAX; n];
    let free: Vec<usize> = (0..n).filter(|&d| !dofs.is_boundary(d)).collect();
    for (i, &d) in free.iter().enumerate() {
        reduced_index[d] = i;
    }
    let sys = &asm.system;
    let mut rhs: Vec<f64> = free.iter().map(|&d| sys.rhs[d]).collect();
    let mut entries = Vec::new();
    for &(r, c, v) in &sys.entries {
        let ri = reduced_index[r];
        if ri == usize::MAX {
            continue;
        }
        let ci = reduced_index[c];
        if ci == usize::MAX {
            rhs[ri] -= v * prescribed[c];
        } else {
            entries.push((ri, ci, v));
        }
    }
    Ok(ReducedSystem {
        system: SparseSystem {
            n: free.len(),
            entries,
            rhs,
        },
        free,
        prescribed,
    })
}

fn relative_residual(sys: &SparseSystem, x: &[f64], bnorm: f64) -> (Vec<f64>, f64) {
    let ax = sys.mul_vec(x);
    let r: Vec<f64> = sys.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    (r, rn / bnorm)
}

/// Sparse LU with up to three steps of iterative refinement; fails unless
/// the relative residual reaches [`SOLVE_TOLERANCE`].
pub fn solve(sys: &SparseSystem) -> Result<(Vec<f64>, f64)> {
    let n = sys.n;
    let bnorm = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0 || bnorm == 0.0 {
        return Ok((vec![0.0; n], 0.0));
    }
    let triplets: Vec<Triplet<usize, usize, f64>> =
        sys.entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let matrix = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).map_err(|e| Error::Solver {
        message: format!("cannot build sparse matrix: {e:?}"),
        residual: f64::NAN,
    })?;
    let lu = matrix.sp_lu().map_err(|e| Error::Solver {
        message: format!("LU factorization failed: {e:?}"),
        residual: f64::NAN,
    })?;
    let lu_solve = |b: &[f64]| -> Vec<f64> {
        let col = faer::Col::<f64>::from_fn(n, |i| b[i]);
        let x = lu.solve(&col);
        (0..n).map(|i| x[i]).collect()
    };
    let mut x = lu_solve(&sys.rhs);
    let (mut r, mut res) = relative_residual(sys, &x, bnorm);
    for _ in 0..3 {
        if res <= SOLVE_TOLERANCE || !res.is_finite() {
            break;
        }
        let dx = lu_solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        (r, res) = relative_residual(sys, &x, bnorm);
    }
    if res <= SOLVE_TOLERANCE {
        Ok((x, res))
    } else {
        Err(Error::Solver {
            message: "residual above tolerance after refinement".into(),
            residual: res,
        })
    }
}

/// A solved discrete problem.
#[derive(Debug)]
pub struct Solution {
    pub assembled: Assembled,
    /// Values of all global dofs, boundary ones included.
    pub dofs: Vec<f64>,
    pub residual: f64,
}

impl Solution {
    /// Local dof vector of cell `c`.
    pub fn cell_values(&self, c: usize) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_iterator(
            self.assembled.dofs.cell_dofs(c).len(),
            self.assembled.dofs.cell_dofs(c).iter().map(|&d| self.dofs[d]),
        )
    }
}

/// Assemble, impose the boundary data and solve.
pub fn solve_problem(mesh: &Mesh, k: usize, strategy: SerendipityStrategy, prob: &ModelProblem) -> Result<Solution> {
    let assembled = assemble(mesh, k, strategy, prob)?;
    let reduced = apply_dirichlet(&assembled, mesh, &prob.dirichlet)?;
    let (x, residual) = solve(&reduced.system)?;
    let dofs = reduced.expand(&x);
    Ok(Solution {
        assembled,
        dofs,
        residual,
    })
}
