//! JSON mesh files: `{ "vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...] }`
//! with zero-based indices.

use serde::{Deserialize, Serialize};

use super::polygon::signed_area;
use super::{Mesh, Point2};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
}

/// Parse and validate a mesh file; clockwise cell loops are reversed.
pub fn parse_mesh_json(bytes: &[u8]) -> Result<Mesh> {
    let file: MeshFile = serde_json::from_slice(bytes)?;
    let MeshFile { vertices, mut cells } = file;
    for (c, cell) in cells.iter_mut().enumerate() {
        if cell.iter().any(|&v| v >= vertices.len()) {
            return Err(Error::mesh(format!("cell {c} references a missing vertex")));
        }
        if cell.len() >= 3 {
            let pts: Vec<Point2> = cell.iter().map(|&v| vertices[v]).collect();
            if signed_area(&pts) < 0.0 {
                cell.reverse();
            }
        }
    }
    Mesh::new(vertices, cells)
}

pub fn read_mesh(path: impl AsRef<std::path::Path>) -> Result<Mesh> {
    parse_mesh_json(&std::fs::read(path)?)
}

/// Serialise to the JSON mesh format (compact, deterministic).
pub fn mesh_to_json(m: &Mesh) -> String {
    let file = MeshFile {
        vertices: m.vertices().to_vec(),
        cells: m.cells().to_vec(),
    };
    serde_json::to_string(&file).expect("mesh serialisation cannot fail")
}

pub fn write_mesh(m: &Mesh, path: impl AsRef<std::path::Path>) -> Result<()> {
    std::fs::write(path, mesh_to_json(m))?;
    Ok(())
}
