use std::fmt::Write as _;

use serde::Serialize;

use crate::assembly::GlobalDofMap;
use crate::element::{build_dof_layout, DofLayout, SerendipityStrategy};
use crate::geometry::{Mesh, Polygon};
use crate::polynomials::poly_dim;
use crate::{Error, Result};

/// Internal dof counts of one element under each strategy, next to the
/// classical finite element counts where the shape has one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementDofCounts {
    pub k: usize,
    pub n_vertices: usize,
    pub eta: usize,
    pub convex: bool,
    pub original: usize,
    pub lazy: usize,
    /// `None` when the stingy layout is unsupported for this shape.
    pub stingy: Option<usize>,
    /// Lagrange element internal count, triangles only.
    pub lagrange_fem: Option<usize>,
    /// Serendipity element internal count, parallelograms only.
    pub serendipity_fem: Option<usize>,
}

fn is_parallelogram(p: &Polygon) -> bool {
    if p.n_vertices() != 4 {
        return false;
    }
    let v = p.vertices();
    let d0 = v[1] - v[0];
    let d2 = v[2] - v[3];
    (d0 - d2).norm() <= 1e-12 * p.diameter()
}

pub fn element_dof_counts(p: &Polygon, k: usize, theta0: f64) -> Result<ElementDofCounts> {
    let internal = |s| build_dof_layout(p, k, s).map(|l| l.n_internal());
    let stingy = match build_dof_layout(p, k, SerendipityStrategy::Stingy { theta0 }) {
        Ok(l) => Some(l.n_internal()),
        Err(Error::UnsupportedShape(_)) => None,
        Err(e) => return Err(e),
    };
    let lazy_layout = build_dof_layout(p, k, SerendipityStrategy::Lazy)?;
    let ki = k as i32;
    Ok(ElementDofCounts {
        k,
        n_vertices: p.n_vertices(),
        eta: lazy_layout.eta,
        convex: lazy_layout.convex,
        original: internal(SerendipityStrategy::Original)?,
        lazy: lazy_layout.n_internal(),
        stingy,
        lagrange_fem: (p.n_vertices() == 3).then(|| poly_dim(ki - 3, 2)),
        serendipity_fem: is_parallelogram(p).then(|| poly_dim(ki - 4, 2)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DofRow {
    pub strategy: String,
    pub internal_min: usize,
    pub internal_max: usize,
    pub internal_total: usize,
    pub global_total: usize,
}

/// Per-strategy dof totals on a mesh.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DofReport {
    pub k: usize,
    pub n_cells: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub rows: Vec<DofRow>,
}

/// Counts come from the same layouts and numbering the solver uses.
pub fn dof_report(mesh: &Mesh, k: usize, strategies: &[SerendipityStrategy]) -> Result<DofReport> {
    let polys = mesh.polygons()?;
    let mut rows = Vec::with_capacity(strategies.len());
    for &s in strategies {
        let layouts = polys
            .iter()
            .enumerate()
            .map(|(c, p)| build_dof_layout(p, k, s).map_err(|e| e.at_element(c)))
            .collect::<Result<Vec<DofLayout>>>()?;
        let counts: Vec<usize> = layouts.iter().map(|l| l.n_internal()).collect();
        let map = GlobalDofMap::new(mesh, k, &layouts);
        rows.push(DofRow {
            strategy: s.to_string(),
            internal_min: counts.iter().copied().min().unwrap_or(0),
            internal_max: counts.iter().copied().max().unwrap_or(0),
            internal_total: counts.iter().sum(),
            global_total: map.n_dofs(),
        });
    }
    Ok(DofReport {
        k,
        n_cells: mesh.n_cells(),
        n_vertices: mesh.n_vertices(),
        n_edges: mesh.n_edges(),
        rows,
    })
}

impl DofReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,internal_min,internal_max,internal_total,global_total\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.strategy, r.internal_min, r.internal_max, r.internal_total, r.global_total
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "k = {}, {} cells, {} vertices, {} edges\n{:<16} {:>10} {:>10} {:>10}\n",
            self.k, self.n_cells, self.n_vertices, self.n_edges, "strategy", "int/cell", "internal", "total"
        );
        for r in &self.rows {
            let per_cell = if r.internal_min == r.internal_max {
                r.internal_min.to_string()
            } else {
                format!("{}-{}", r.internal_min, r.internal_max)
            };
            let _ = writeln!(
                out,
                "{:<16} {:>10} {:>10} {:>10}",
                r.strategy, per_cell, r.internal_total, r.global_total
            );
        }
        out
    }
}
