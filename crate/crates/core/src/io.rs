//! Bit-exact field persistence in the FLD1 container.
//!
//! Layout: bytes 0-3 magic "FLD1"; byte 4 version = 1; byte 5 dim; bytes 6-7
//! reserved zero; per-axis sample count as u32 little-endian; half-width as
//! f64 little-endian; then n^dim values as f64 little-endian, row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;

const MAGIC: &[u8; 4] = b"FLD1";
const VERSION: u8 = 1;

pub fn save_field(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, grid.dim() as u8, 0, 0])?;
    for _ in 0..grid.dim() {
        w.write_all(&(grid.n() as u32).to_le_bytes())?;
    }
    w.write_all(&grid.half_width().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_field(path: impl AsRef<Path>) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 8];
    read_exact(&mut r, &mut header, "header")?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:02x?} (expected \"FLD1\")",
            &header[0..4]
        )));
    }
    if header[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let dim = u32::from(header[5]);
    if dim != 3 {
        return Err(Error::Format(format!("unsupported dimension {dim}")));
    }
    if header[6] != 0 || header[7] != 0 {
        return Err(Error::Format("reserved header bytes must be zero".into()));
    }
    let mut n_axis = [0usize; 3];
    for slot in n_axis.iter_mut() {
        let mut buf = [0u8; 4];
        read_exact(&mut r, &mut buf, "axis sample count")?;
        *slot = u32::from_le_bytes(buf) as usize;
    }
    if n_axis[1] != n_axis[0] || n_axis[2] != n_axis[0] {
        return Err(Error::Format(format!("anisotropic grids are not supported: {n_axis:?}")));
    }
    let mut buf = [0u8; 8];
    read_exact(&mut r, &mut buf, "half-width")?;
    let half_width = f64::from_le_bytes(buf);
    let grid = GridSpec::new(dim, n_axis[0], half_width)
        .map_err(|e| Error::Format(format!("invalid grid in file: {e}")))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        read_exact(&mut r, &mut buf, "field values")?;
        values.push(f64::from_le_bytes(buf));
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after field values".into()));
    }
    Field::from_values(grid, values).map_err(|e| Error::Format(format!("invalid field in file: {e}")))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Format(format!("truncated file while reading {what}")))
}
