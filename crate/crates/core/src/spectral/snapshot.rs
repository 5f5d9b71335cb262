use num_complex::Complex64;
use std::io::{Read, Write};
use std::sync::Arc;

use super::field::{FieldLabel, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SHMHDSNP";
const VERSION: u32 = 1;

/// A decoded snapshot: one field at one time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: SpectralField,
}

/// Writes `field` at time `t` in the little-endian snapshot container.
///
/// Layout: magic `SHMHDSNP`, `u32` version, `u32 n_x`, `u32 n_y`, `f64 L_y`,
/// `f64 dealias_fraction`, `f64 t`, `u32` label length, UTF-8 label, then
/// `n_x · n_y` pairs of `f32` (re, im) in row-major centered order
/// (rows `k = −n_x/2 … n_x/2 − 1`, columns `η` ascending).
pub fn write_snapshot<W: Write>(mut out: W, field: &SpectralField, t: f64) -> Result<()> {
    let g = field.grid();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(g.n_x() as u32).to_le_bytes())?;
    out.write_all(&(g.n_y() as u32).to_le_bytes())?;
    out.write_all(&g.l_y().to_le_bytes())?;
    out.write_all(&g.dealias_fraction().to_le_bytes())?;
    out.write_all(&t.to_le_bytes())?;
    let label = field.label().to_string();
    out.write_all(&(label.len() as u32).to_le_bytes())?;
    out.write_all(label.as_bytes())?;
    let mut buf = Vec::with_capacity(8 * g.len());
    for c in field.centered_coeffs() {
        buf.extend_from_slice(&(c.re as f32).to_le_bytes());
        buf.extend_from_slice(&(c.im as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot<R: Read>(mut input: R) -> Result<Snapshot> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config("not a snapshot file".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Config(format!("unsupported snapshot version {version}")));
    }
    let nx = read_u32(&mut input)? as usize;
    let ny = read_u32(&mut input)? as usize;
    let l_y = read_f64(&mut input)?;
    let frac = read_f64(&mut input)?;
    let t = read_f64(&mut input)?;
    let len = read_u32(&mut input)? as usize;
    let mut label = vec![0u8; len];
    input.read_exact(&mut label)?;
    let label = String::from_utf8(label).map_err(|e| Error::Config(e.to_string()))?;
    let grid = Arc::new(Grid::new(nx, ny, l_y, frac)?);
    let mut raw = vec![0u8; 8 * nx * ny];
    input.read_exact(&mut raw)?;
    let centered: Vec<Complex64> = raw
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    let field = SpectralField::from_centered(grid, &centered, FieldLabel::parse(&label))?;
    Ok(Snapshot { t, field })
}
