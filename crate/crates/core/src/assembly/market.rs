use std::io::Write;

use super::SparseSystem;

/// Coordinate Matrix Market text, one-based indices.
pub fn write_matrix_market(out: &mut impl Write, sys: &SparseSystem) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", sys.n, sys.n, sys.entries.len())?;
    for &(r, c, v) in &sys.entries {
        writeln!(out, "{} {} {:.17e}", r + 1, c + 1, v)?;
    }
    Ok(())
}

/// Dense column vector in Matrix Market array format.
pub fn write_vector_market(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix array real general")?;
    writeln!(out, "{} 1", values.len())?;
    for v in values {
        writeln!(out, "{v:.17e}")?;
    }
    Ok(())
}
