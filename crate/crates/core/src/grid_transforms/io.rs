//! GridFunction files: a binary dump (any n) and CSV (n = 1).

use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;

use super::grid::{Domain, FreqGrid, GridFunction};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"AMGF";
const VERSION: u32 = 1;

/// 32-byte little-endian header (magic, version, n, N, L, carrier as two
/// i32) followed by interleaved re/im `f64` samples in row-major order.
/// Only space-domain samples are written.
pub fn write_grid_binary(f: &GridFunction, mut w: impl Write) -> Result<()> {
    f.expect_domain(Domain::Space)?;
    let c = |v: i64| i32::try_from(v).map_err(|_| Error::param("carrier does not fit the file format"));
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(f.grid.n as u32).to_le_bytes())?;
    w.write_all(&(f.grid.size as u32).to_le_bytes())?;
    w.write_all(&f.grid.period.to_le_bytes())?;
    w.write_all(&c(f.grid.carrier[0])?.to_le_bytes())?;
    w.write_all(&c(f.grid.carrier[1])?.to_le_bytes())?;
    for v in &f.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_binary(mut r: impl Read) -> Result<GridFunction> {
    let mut head = [0u8; 32];
    r.read_exact(&mut head).map_err(|_| Error::Parse("grid file shorter than its header".into()))?;
    if &head[0..4] != MAGIC {
        return Err(Error::Parse("not a grid function file (bad magic)".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported grid file version {version}")));
    }
    let n = u32_at(8) as usize;
    let size = u32_at(12) as usize;
    let period = f64::from_le_bytes(head[16..24].try_into().unwrap());
    let c0 = i32::from_le_bytes(head[24..28].try_into().unwrap()) as i64;
    let c1 = i32::from_le_bytes(head[28..32].try_into().unwrap()) as i64;
    let grid = FreqGrid::new(n, size, period)?.with_carrier([c0, c1])?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != grid.len() * 16 {
        return Err(Error::Parse(format!("expected {} payload bytes, found {}", grid.len() * 16, payload.len())));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    GridFunction::new(grid, Domain::Space, values)
}

/// CSV with a `# period=L` comment line and columns `x,re,im`.
pub fn write_grid_csv(f: &GridFunction, mut w: impl Write) -> Result<()> {
    f.expect_domain(Domain::Space)?;
    if f.grid.n != 1 || f.grid.carrier != [0, 0] {
        return Err(Error::param("CSV export supports n = 1 grids without carrier"));
    }
    writeln!(w, "# period={}", f.grid.period)?;
    writeln!(w, "x,re,im")?;
    for (i, v) in f.values.iter().enumerate() {
        writeln!(w, "{},{},{}", f.grid.point(i)[0], v.re, v.im)?;
    }
    Ok(())
}

pub fn read_grid_csv(r: impl Read) -> Result<GridFunction> {
    let mut period = None;
    let mut values = Vec::new();
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("period=") {
                period = Some(v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad period: {e}")))?);
            }
            continue;
        }
        if line.is_empty() || line.starts_with("x,") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 columns", lineno + 1)));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)));
        values.push(Complex64::new(num(cols[1])?, num(cols[2])?));
    }
    let period = period.ok_or_else(|| Error::Parse("missing '# period=' line".into()))?;
    let grid = FreqGrid::new(1, values.len(), period)?;
    GridFunction::new(grid, Domain::Space, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridFunction {
        let grid = FreqGrid::new(1, 16, 2.5).unwrap();
        GridFunction::from_fn(grid, |x| Complex64::new(x[0].sin(), 0.25 * x[0]))
    }

    #[test]
    fn binary_round_trip() {
        let f = sample();
        let mut buf = Vec::new();
        write_grid_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 16 * 16);
        assert_eq!(read_grid_binary(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn csv_round_trip() {
        let f = sample();
        let mut buf = Vec::new();
        write_grid_csv(&f, &mut buf).unwrap();
        let back = read_grid_csv(buf.as_slice()).unwrap();
        assert!(back.relative_l2_distance(&f).unwrap() < 1e-15);
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let f = sample();
        let mut buf = Vec::new();
        write_grid_binary(&f, &mut buf).unwrap();
        buf.truncate(100);
        assert!(matches!(read_grid_binary(buf.as_slice()), Err(Error::Parse(_))));
    }
}
