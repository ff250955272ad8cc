//! Little-endian binary checkpoints of spectral fields.
//!
//! Layout (all integers `u32`, floats `f64`, little-endian):
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 8    | magic `b"LERAYSPC"`                       |
//! | 8      | 4    | format version (`1`)                      |
//! | 12     | 4    | spatial dimension `n`                     |
//! | 16     | 4    | modes per axis `N`                        |
//! | 20     | 8    | period length `L`                         |
//! | 28     | 4    | component count `c`                       |
//! | 32     | 4    | flags (bit 0: divergence-free tag)        |
//! | 36     | ...  | `N^n · c` pairs `(re, im)`                |
//!
//! Coefficient pairs are written in row-major mode order (last axis
//! fastest), with the components of each mode interleaved.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::TorusGrid;

pub const MAGIC: &[u8; 8] = b"LERAYSPC";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 36;

pub fn write_checkpoint<W: Write>(mut w: W, field: &SpectralVectorField) -> Result<()> {
    let grid = field.grid();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    header.extend_from_slice(&(grid.modes() as u32).to_le_bytes());
    header.extend_from_slice(&grid.length().to_le_bytes());
    header.extend_from_slice(&(field.ncomp() as u32).to_le_bytes());
    header.extend_from_slice(&(field.is_div_free() as u32).to_le_bytes());
    w.write_all(&header)?;

    let n = grid.len();
    let mut body = Vec::with_capacity(n * field.ncomp() * 16);
    for idx in 0..n {
        for c in 0..field.ncomp() {
            let z = field.coeff(idx, c);
            body.extend_from_slice(&z.re.to_le_bytes());
            body.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&body)?;
    Ok(())
}

fn u32_at(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(buf[at..at + 4].try_into().unwrap())
}

fn f64_at(buf: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(buf[at..at + 8].try_into().unwrap())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<SpectralVectorField> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|e| Error::Checkpoint(format!("truncated header: {e}")))?;
    if &header[..8] != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = u32_at(&header, 8);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let dim = u32_at(&header, 12) as usize;
    let modes = u32_at(&header, 16) as usize;
    let length = f64_at(&header, 20);
    let ncomp = u32_at(&header, 28) as usize;
    let flags = u32_at(&header, 32);
    let grid = TorusGrid::new(dim, modes, length)?;
    if ncomp == 0 || ncomp > 9 {
        return Err(Error::Checkpoint(format!("component count {ncomp}")));
    }

    let n = grid.len();
    let mut body = vec![0u8; n * ncomp * 16];
    r.read_exact(&mut body)
        .map_err(|e| Error::Checkpoint(format!("truncated body: {e}")))?;
    let mut coeffs = vec![Complex64::default(); n * ncomp];
    for idx in 0..n {
        for c in 0..ncomp {
            let at = (idx * ncomp + c) * 16;
            coeffs[c * n + idx] = Complex64::new(f64_at(&body, at), f64_at(&body, at + 8));
        }
    }
    let mut field = SpectralVectorField::from_coeffs(grid, ncomp, coeffs)?;
    field.set_div_free(flags & 1 == 1);
    Ok(field)
}
