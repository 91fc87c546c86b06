//! Binary 16-bit PGM slices.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{midplane, Part};
use crate::error::Result;
use crate::tensor::SymTensorGridField;

/// Write `values` (row-major, `width` per row) scaled linearly onto 0..=65535.
/// A constant image maps to zero.
pub fn write_pgm16<W: Write>(width: usize, height: usize, values: &[f64], mut w: W) -> Result<()> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    write!(w, "P5\n{width} {height}\n65535\n")?;
    let mut buf = Vec::with_capacity(2 * values.len());
    for &v in values {
        let level = if span > 0.0 {
            ((v - lo) / span * 65535.0).round() as u16
        } else {
            0
        };
        buf.extend_from_slice(&level.to_be_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

/// Slice z = nz/2 of one component; rows run along y, columns along x.
pub fn save_midplane(
    field: &SymTensorGridField,
    component: usize,
    part: Part,
    path: impl AsRef<Path>,
) -> Result<()> {
    let (nx, ny, v) = midplane(field, component, part)?;
    write_pgm16(nx, ny, &v, BufWriter::new(File::create(path)?))
}
