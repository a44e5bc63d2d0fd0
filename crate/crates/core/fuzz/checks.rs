//! Oracles shared by the fuzz targets and the corpus replay test.

use std::str::FromStr;

use svem::element::{ElementOperators, SerendipityStrategy};
use svem::geometry::{mesh_to_json, parse_mesh_json};

/// Element operators are only built for inputs up to this size.
const MAX_ELEMENT_VERTICES: usize = 24;
const MAX_ELEMENTS: usize = 8;

/// Parsing never panics; an accepted mesh survives a serialise/parse round trip.
pub fn mesh_json(data: &[u8]) {
    let Ok(mesh) = parse_mesh_json(data) else {
        return;
    };
    let again = parse_mesh_json(mesh_to_json(&mesh).as_bytes()).expect("serialised mesh parses");
    assert_eq!(again.vertices(), mesh.vertices());
    assert_eq!(again.cells(), mesh.cells());
    let polygons = mesh.polygons().expect("accepted meshes have valid cells");
    assert!(polygons.iter().all(|p| p.area() > 0.0));
}

/// Accepted strategy strings print back to an equivalent strategy.
pub fn strategy_text(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = SerendipityStrategy::from_str(text) {
        let printed = s.to_string();
        assert_eq!(SerendipityStrategy::from_str(&printed).expect("printed strategy parses"), s);
    }
}

/// The first byte picks the degree and strategy; the rest is a mesh file.
/// Building may fail with an error, never with a panic, and a built
/// element's projector reproduces polynomials up to conditioned roundoff.
pub fn mesh_element_ops(data: &[u8]) {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let k = 1 + (selector & 0x07) as usize;
    let strategy = match selector >> 6 {
        0 => SerendipityStrategy::Original,
        1 => SerendipityStrategy::Lazy,
        2 => SerendipityStrategy::stingy(),
        _ => SerendipityStrategy::FixedInternalDegree(((selector >> 3) & 0x07) as i32 - 1),
    };
    let Ok(mesh) = parse_mesh_json(rest) else {
        return;
    };
    let Ok(polygons) = mesh.polygons() else {
        return;
    };
    for p in polygons.iter().take(MAX_ELEMENTS) {
        if p.n_vertices() > MAX_ELEMENT_VERTICES {
            continue;
        }
        if let Ok(ops) = ElementOperators::build(p, k, strategy) {
            let n = ops.basis.len();
            let scale: Vec<f64> = ops.ds.column_iter().map(|c| c.amax()).collect();
            let defect = &ops.pi_s * &ops.ds - nalgebra::DMatrix::<f64>::identity(n, n);
            let scaled = nalgebra::DMatrix::from_fn(n, n, |i, j| defect[(i, j)] * scale[i] / scale[j]);
            // column scaling removes the anisotropy of the monomials; what is
            // left is roundoff amplified by the smallest singular value
            assert!(
                scaled.amax() * ops.min_sv <= 1e-13,
                "scaled projector defect {:e} with min_sv {:e}",
                scaled.amax(),
                ops.min_sv
            );
        }
    }
}
