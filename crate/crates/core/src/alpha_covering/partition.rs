use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Covering, CoveringSpec, Shape, SparseSymbol, Vec2, WindowIndex};
use crate::error::{Error, Result};
use crate::grid_transforms::FreqGrid;

/// One window of a partition sampled on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMember {
    pub index: WindowIndex,
    pub center: Vec2,
    pub scale: f64,
    pub support: Shape,
    /// Non-zero samples of the symbol.
    pub symbol: SparseSymbol,
}

impl PartitionMember {
    pub fn support_radius(&self) -> f64 {
        match self.support {
            Shape::Ball { radius, .. } => radius,
            Shape::Annulus { outer, .. } => outer,
        }
    }

    pub fn dense_samples(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (&b, &v) in self.symbol.bins.iter().zip(&self.symbol.values) {
            out[b] = v;
        }
        out
    }
}

/// Windows instantiated on a grid plus the mask of bins where they sum to one.
#[derive(Clone, Debug)]
pub struct Partition {
    /// Requested constants (including the truncation bound).
    pub spec: CoveringSpec,
    /// Untruncated covering used to evaluate symbols.
    pub covering: Covering,
    pub grid: FreqGrid,
    pub members: Vec<PartitionMember>,
    /// `safe[b]`: every window touching bin `b` is instantiated.
    pub safe: Vec<bool>,
    lookup: BTreeMap<WindowIndex, usize>,
}

impl Partition {
    pub fn member(&self, idx: WindowIndex) -> Option<&PartitionMember> {
        self.lookup.get(&idx).map(|&i| &self.members[i])
    }

    pub fn alpha(&self) -> f64 {
        self.covering.alpha()
    }

    pub fn safe_count(&self) -> usize {
        self.safe.iter().filter(|&&s| s).count()
    }
}

/// Samples every window (within `k_max`) that meets the grid's band and
/// marks the bins where the partial sum is exact.
pub fn build_partition(spec: &CoveringSpec, grid: &FreqGrid) -> Result<Partition> {
    let covering = Covering::new(*spec)?;
    if grid.n != spec.n {
        return Err(Error::param(format!("covering dimension {} differs from grid dimension {}", spec.n, grid.n)));
    }
    // enumeration ignores k_max; truncation is applied when instantiating
    let unbounded = Covering::new(CoveringSpec { k_max: if covering.is_dyadic() { 62 } else { super::DEFAULT_K_MAX }, ..*spec })?;
    let (lo, hi) = grid.band_box();
    let candidates = unbounded.windows_touching_box(lo, hi)?;
    // a window reaching past the band is still exact on band-limited input,
    // so every touching window within k_max is instantiated
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for idx in candidates {
        if idx.sup_norm() <= spec.k_max {
            kept.push(idx);
        } else {
            dropped.push(unbounded.support(idx)?);
        }
    }
    let members: Vec<PartitionMember> = kept
        .par_iter()
        .map(|&idx| {
            let (center, scale) = unbounded.center_scale(idx)?;
            Ok(PartitionMember {
                index: idx,
                center,
                scale,
                support: unbounded.support(idx)?,
                symbol: unbounded.symbol_on(idx, grid)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut safe = vec![true; grid.len()];
    for sup in &dropped {
        let (a, b) = sup.bounding_box();
        for bin in grid.bins_in_box(a, b) {
            if sup.contains_point(grid.freq(bin)) {
                safe[bin] = false;
            }
        }
    }
    let lookup = members.iter().enumerate().map(|(i, m)| (m.index, i)).collect();
    let partition = Partition { spec: *spec, covering: unbounded, grid: grid.clone(), members, safe, lookup };
    let sums = partial_sums(&partition);
    for (b, &s) in sums.iter().enumerate() {
        if partition.safe[b] && (s - 1.0).abs() > 1e-8 {
            return Err(Error::Covering(format!(
                "partition sum {s} at frequency {:?}: constants too small",
                grid.freq(b)
            )));
        }
    }
    Ok(partition)
}

fn partial_sums(p: &Partition) -> Vec<f64> {
    let mut sums = vec![0.0; p.grid.len()];
    for m in &p.members {
        for (&b, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
            sums[b] += v;
        }
    }
    sums
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub members: usize,
    pub safe_bins: usize,
    pub max_sum_deviation: f64,
    pub max_overlap: usize,
    /// Largest sample found outside a declared support (should be 0).
    pub max_outside_support: f64,
    pub samples_in_unit_interval: bool,
    /// `max|∇η_k| · scale` for a spread of members.
    pub gradient_bounds: Vec<(WindowIndex, f64)>,
    /// max/min of `gradient_bounds`.
    pub gradient_ratio: f64,
}

pub fn verify_partition(p: &Partition) -> Result<PartitionReport> {
    let sums = partial_sums(p);
    let max_sum_deviation = sums
        .iter()
        .zip(&p.safe)
        .filter(|(_, &s)| s)
        .map(|(v, _)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let mut counts = vec![0usize; p.grid.len()];
    let mut max_outside: f64 = 0.0;
    let mut in_range = true;
    for m in &p.members {
        for (&b, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
            if v > 0.0 {
                counts[b] += 1;
            }
            in_range &= (0.0..=1.0).contains(&v);
            if !m.support.contains_point(p.grid.freq(b)) {
                max_outside = max_outside.max(v.abs());
            }
        }
    }
    let max_overlap = counts.into_iter().max().unwrap_or(0);
    // an evenly spread subset keeps the derivative sweep cheap
    let stride = (p.members.len() / 64).max(1);
    let sample: Vec<WindowIndex> = p.members.iter().step_by(stride).map(|m| m.index).collect();
    let gradient_bounds = gradient_profile(&p.covering, &sample)?;
    let (gmin, gmax) = gradient_bounds
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &(_, g)| (a.min(g), b.max(g)));
    Ok(PartitionReport {
        members: p.members.len(),
        safe_bins: p.safe_count(),
        max_sum_deviation,
        max_overlap,
        max_outside_support: max_outside,
        samples_in_unit_interval: in_range,
        gradient_ratio: if gmin > 0.0 { gmax / gmin } else { f64::INFINITY },
        gradient_bounds,
    })
}

/// Finite-difference `max|∇η_k| · scale` along lines through each window.
pub fn gradient_profile(cov: &Covering, indices: &[WindowIndex]) -> Result<Vec<(WindowIndex, f64)>> {
    indices
        .par_iter()
        .map(|&idx| {
            let (center, scale) = cov.center_scale(idx)?;
            let neighbors = if cov.is_dyadic() { Vec::new() } else { cov.neighbors(idx)? };
            let (origin, reach) = match cov.support(idx)? {
                Shape::Ball { radius, .. } => (center, radius),
                Shape::Annulus { outer, .. } => ([0.0, 0.0], outer),
            };
            let dirs: &[Vec2] = if cov.n() == 1 {
                &[[1.0, 0.0]]
            } else {
                &[[1.0, 0.0], [0.0, 1.0], [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]]
            };
            let steps = 800;
            let h = 2.0 * reach / steps as f64;
            let mut best: f64 = 0.0;
            for d in dirs {
                let at = |t: f64| cov.eta_with(idx, &neighbors, [origin[0] + t * d[0], origin[1] + t * d[1]]);
                let mut prev = at(-reach);
                for i in 1..=steps {
                    let v = at(-reach + i as f64 * h);
                    best = best.max((v - prev).abs() / h);
                    prev = v;
                }
            }
            Ok((idx, best * scale))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_lattice_partition_sums_to_one() {
        let grid = FreqGrid::new(1, 1024, 16.0).unwrap();
        let spec = CoveringSpec::calibrated(0.0, 1).unwrap();
        let p = build_partition(&spec, &grid).unwrap();
        let r = verify_partition(&p).unwrap();
        assert!(r.max_sum_deviation < 1e-12);
        assert_eq!(r.safe_bins, grid.len());
        assert_eq!(r.max_outside_support, 0.0);
        assert!(r.samples_in_unit_interval);
    }

    #[test]
    fn truncation_marks_unsafe_bins() {
        let grid = FreqGrid::new(1, 1024, 16.0).unwrap();
        let spec = CoveringSpec::calibrated(0.0, 1).unwrap().with_k_max(10);
        let p = build_partition(&spec, &grid).unwrap();
        assert_eq!(p.members.len(), 21);
        for (b, &safe) in p.safe.iter().enumerate() {
            let x = grid.freq(b)[0].abs();
            if x < 10.0 {
                assert!(safe);
            }
            if x > 11.0 {
                assert!(!safe);
            }
        }
    }

    #[test]
    fn overlap_of_narrow_unit_windows() {
        let grid = FreqGrid::new(1, 512, 8.0).unwrap();
        let spec = CoveringSpec::calibrated(0.0, 1).unwrap().with_c_big(0.8);
        let r = verify_partition(&build_partition(&spec, &grid).unwrap()).unwrap();
        assert!(r.max_overlap <= 2);
    }

    #[test]
    fn dyadic_band_vanishes_off_its_annulus() {
        let grid = FreqGrid::new(1, 1024, 4.0).unwrap();
        let p = build_partition(&CoveringSpec::calibrated(1.0, 1).unwrap(), &grid).unwrap();
        for m in &p.members {
            if let WindowIndex::Dyadic(j) = m.index {
                if j == 0 {
                    continue;
                }
                let s = 2f64.powi(j as i32);
                for (&b, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
                    let r = grid.freq(b)[0].abs();
                    assert!(v == 0.0 || (r > 4.0 / 3.0 * s / 2.0 && r < 1.5 * s));
                }
            }
        }
        assert!(verify_partition(&p).unwrap().max_sum_deviation < 1e-14);
    }

    #[test]
    fn gradient_scaling_is_uniform() {
        let cov = Covering::calibrated(0.5, 1).unwrap();
        let idx: Vec<_> = (1..=64).map(WindowIndex::lattice1).collect();
        let g = gradient_profile(&cov, &idx).unwrap();
        let (lo, hi) = g.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &(_, v)| (a.min(v), b.max(v)));
        assert!(hi / lo <= 4.0, "{lo} {hi} {g:?}");
    }
}
