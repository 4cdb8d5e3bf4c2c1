use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Partition, SparseSymbol, Vec2, WindowIndex};
use crate::error::{Error, Result};
use crate::grid_transforms::FreqGrid;

const MAGIC: &[u8; 4] = b"AMPD";
const VERSION: u32 = 1;

/// Geometry row of one partition member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub index: WindowIndex,
    pub center: Vec2,
    pub scale: f64,
    pub support_radius: f64,
}

fn records(p: &Partition) -> Vec<PartitionRecord> {
    p.members
        .iter()
        .map(|m| PartitionRecord { index: m.index, center: m.center, scale: m.scale, support_radius: m.support_radius() })
        .collect()
}

pub fn write_partition_csv(p: &Partition, mut w: impl Write) -> Result<()> {
    let two = p.grid.n == 2;
    match (p.covering.is_dyadic(), two) {
        (true, _) => writeln!(w, "j,center,scale,support_radius")?,
        (false, false) => writeln!(w, "k,center,scale,support_radius")?,
        (false, true) => writeln!(w, "k1,k2,center1,center2,scale,support_radius")?,
    }
    for r in records(p) {
        match r.index {
            WindowIndex::Dyadic(j) => writeln!(w, "{j},0,{},{}", r.scale, r.support_radius)?,
            WindowIndex::Lattice(k) if !two => writeln!(w, "{},{},{},{}", k[0], r.center[0], r.scale, r.support_radius)?,
            WindowIndex::Lattice(k) => writeln!(
                w,
                "{},{},{},{},{},{}",
                k[0], k[1], r.center[0], r.center[1], r.scale, r.support_radius
            )?,
        }
    }
    Ok(())
}

pub fn write_partition_json(p: &Partition, w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(w, &records(p))?;
    Ok(())
}

/// Samples of a partition read back from a binary dump.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionDump {
    pub grid: FreqGrid,
    pub alpha: f64,
    pub members: Vec<(PartitionRecord, SparseSymbol)>,
}

/// Binary dump: 32-byte little-endian header (magic, version, n, N, L,
/// alpha), then carrier, member count and the sparse samples per member.
pub fn write_partition_dump(p: &Partition, mut w: impl Write) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(p.grid.n as u32).to_le_bytes())?;
    w.write_all(&(p.grid.size as u32).to_le_bytes())?;
    w.write_all(&p.grid.period.to_le_bytes())?;
    w.write_all(&p.alpha().to_le_bytes())?;
    for c in p.grid.carrier {
        w.write_all(&c.to_le_bytes())?;
    }
    w.write_all(&(p.members.len() as u64).to_le_bytes())?;
    for (m, r) in p.members.iter().zip(records(p)) {
        let (tag, a, b) = match m.index {
            WindowIndex::Lattice(k) => (0u8, k[0], k[1]),
            WindowIndex::Dyadic(j) => (1u8, j as i64, 0),
        };
        w.write_all(&[tag])?;
        w.write_all(&a.to_le_bytes())?;
        w.write_all(&b.to_le_bytes())?;
        for v in [r.center[0], r.center[1], r.scale, r.support_radius] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(m.symbol.bins.len() as u64).to_le_bytes())?;
        for (&bin, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
            w.write_all(&(bin as u64).to_le_bytes())?;
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_partition_dump(mut r: impl Read) -> Result<PartitionDump> {
    if &take::<4>(&mut r)? != MAGIC {
        return Err(Error::Parse("not a partition dump (bad magic)".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported partition dump version {version}")));
    }
    let n = u32::from_le_bytes(take(&mut r)?) as usize;
    let size = u32::from_le_bytes(take(&mut r)?) as usize;
    let period = f64::from_le_bytes(take(&mut r)?);
    let alpha = f64::from_le_bytes(take(&mut r)?);
    let carrier = [i64::from_le_bytes(take(&mut r)?), i64::from_le_bytes(take(&mut r)?)];
    let grid = FreqGrid::new(n, size, period)?.with_carrier(carrier)?;
    let count = u64::from_le_bytes(take(&mut r)?);
    let mut members = Vec::new();
    for _ in 0..count {
        let tag = take::<1>(&mut r)?[0];
        let a = i64::from_le_bytes(take(&mut r)?);
        let b = i64::from_le_bytes(take(&mut r)?);
        let index = match tag {
            0 => WindowIndex::Lattice([a, b]),
            1 => WindowIndex::Dyadic(a as u32),
            t => return Err(Error::Parse(format!("bad window tag {t}"))),
        };
        let mut f = [0.0; 4];
        for v in &mut f {
            *v = f64::from_le_bytes(take(&mut r)?);
        }
        let nnz = u64::from_le_bytes(take(&mut r)?) as usize;
        let mut bins = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            bins.push(u64::from_le_bytes(take(&mut r)?) as usize);
            values.push(f64::from_le_bytes(take(&mut r)?));
        }
        let record = PartitionRecord { index, center: [f[0], f[1]], scale: f[2], support_radius: f[3] };
        members.push((record, SparseSymbol { index, bins, values }));
    }
    Ok(PartitionDump { grid, alpha, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha_covering::{build_partition, CoveringSpec};

    #[test]
    fn dump_round_trip() {
        let grid = FreqGrid::new(1, 256, 8.0).unwrap();
        let p = build_partition(&CoveringSpec::calibrated(0.25, 1).unwrap(), &grid).unwrap();
        let mut buf = Vec::new();
        write_partition_dump(&p, &mut buf).unwrap();
        let back = read_partition_dump(buf.as_slice()).unwrap();
        assert_eq!(back.grid, grid);
        assert_eq!(back.alpha, 0.25);
        assert_eq!(back.members.len(), p.members.len());
        for ((rec, sym), m) in back.members.iter().zip(&p.members) {
            assert_eq!(rec.index, m.index);
            assert_eq!(sym, &m.symbol);
        }
        let mut csv = Vec::new();
        write_partition_csv(&p, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), p.members.len() + 1);
    }
}
