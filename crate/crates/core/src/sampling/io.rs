//! CSV and binary serialization of sampled functions.
//!
//! Binary layout, all little-endian:
//!
//! | field | type |
//! |-------|------|
//! | magic `CBSF` | 4 bytes |
//! | version (1) | u32 |
//! | dimension (1 or 2) | u32 |
//! | per axis: origin, spacing | f64, f64 |
//! | per axis: count | u64 |
//! | samples: re, im | f64, f64 each, x-major |

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;

use super::{Grid1D, Grid2D, SampledFunction1D, SampledFunction2D};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CBSF";
const VERSION: u32 = 1;

impl SampledFunction1D {
    /// Columns `x,re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,re,im")?;
        for (x, v) in self.grid.points().zip(&self.values) {
            writeln!(out, "{x},{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        write_header(&mut out, &[self.grid])?;
        write_samples(&mut out, &self.values)
    }
}

impl SampledFunction2D {
    /// Columns `x,omega,re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,omega,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            let [x, w] = self.grid.point(k);
            writeln!(out, "{x},{w},{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        write_header(&mut out, &[self.grid.x, self.grid.omega])?;
        write_samples(&mut out, &self.values)
    }
}

fn write_header<W: Write>(out: &mut W, axes: &[Grid1D]) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(axes.len() as u32).to_le_bytes())?;
    for axis in axes {
        out.write_all(&axis.origin().to_le_bytes())?;
        out.write_all(&axis.spacing().to_le_bytes())?;
        out.write_all(&(axis.len() as u64).to_le_bytes())?;
    }
    Ok(())
}

fn write_samples<W: Write>(out: &mut W, values: &[Complex64]) -> Result<()> {
    for v in values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_binary(mut input: impl Read, dims: u32) -> Result<(Vec<Grid1D>, Vec<Complex64>)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let found = read_u32(&mut input)?;
    if found != dims {
        return Err(Error::Format(format!("expected {dims}D samples, found {found}D")));
    }
    let mut axes = Vec::with_capacity(dims as usize);
    for _ in 0..dims {
        let origin = read_f64(&mut input)?;
        let spacing = read_f64(&mut input)?;
        let count = read_u64(&mut input)? as usize;
        axes.push(Grid1D::new(origin, spacing, count)?);
    }
    let total: usize = axes.iter().map(Grid1D::len).product();
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let re = read_f64(&mut input)?;
        let im = read_f64(&mut input)?;
        values.push(Complex64::new(re, im));
    }
    Ok((axes, values))
}

pub fn read_binary_1d(input: impl Read) -> Result<SampledFunction1D> {
    let (axes, values) = read_binary(input, 1)?;
    SampledFunction1D::new(axes[0], values)
}

pub fn read_binary_2d(input: impl Read) -> Result<SampledFunction2D> {
    let (axes, values) = read_binary(input, 2)?;
    SampledFunction2D::new(Grid2D::new(axes[0], axes[1]), values)
}

fn parse_rows(input: impl BufRead, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        if row.len() != columns {
            return Err(Error::Format(format!(
                "line {}: expected {columns} columns, found {}",
                n + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn axis_from_coordinates(coords: &[f64]) -> Result<Grid1D> {
    if coords.len() < 2 {
        return Err(Error::Format("need at least two distinct coordinates".into()));
    }
    let spacing = coords[1] - coords[0];
    let grid = Grid1D::new(coords[0], spacing, coords.len())?;
    for (i, &c) in coords.iter().enumerate() {
        if (c - grid.point(i)).abs() > 1e-9 * spacing.max(c.abs()) {
            return Err(Error::Format(format!("non-uniform coordinate {c} at position {i}")));
        }
    }
    Ok(grid)
}

pub fn read_csv_1d(input: impl BufRead) -> Result<SampledFunction1D> {
    let rows = parse_rows(input, 3)?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = axis_from_coordinates(&xs)?;
    SampledFunction1D::new(grid, rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}

pub fn read_csv_2d(input: impl BufRead) -> Result<SampledFunction2D> {
    let rows = parse_rows(input, 4)?;
    let first_x = rows.first().map(|r| r[0]).ok_or_else(|| Error::Format("empty file".into()))?;
    let ny = rows.iter().take_while(|r| r[0] == first_x).count();
    if ny == 0 || rows.len() % ny != 0 {
        return Err(Error::Format("rows do not form a tensor grid".into()));
    }
    let ws: Vec<f64> = rows[..ny].iter().map(|r| r[1]).collect();
    let xs: Vec<f64> = rows.iter().step_by(ny).map(|r| r[0]).collect();
    let grid = Grid2D::new(axis_from_coordinates(&xs)?, axis_from_coordinates(&ws)?);
    SampledFunction2D::new(grid, rows.iter().map(|r| Complex64::new(r[2], r[3])).collect())
}
