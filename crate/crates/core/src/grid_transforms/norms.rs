//! Lebesgue quasi-norms and the decomposition norms built from them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft::{forward, inverse};
use super::grid::{Domain, GridFunction};
use super::sequence::index_weight;
use crate::alpha_covering::{Partition, PartitionMember, WindowIndex};
use crate::error::{Error, Result};
use crate::index_calculus::{check_reciprocal, multiplier_aggregate, SpaceParams};

/// Riemann-sum `(Σ|f(x_i)|^p (L/N)ⁿ)^{1/p}`; `rp = 0` is the maximum.
pub fn lp_quasinorm(f: &GridFunction, rp: f64) -> Result<f64> {
    check_reciprocal("1/p", rp)?;
    f.expect_domain(Domain::Space)?;
    Ok(lp_values(&f.values, f.grid.cell_volume(), rp))
}

pub(crate) fn lp_values(values: &[Complex64], cell: f64, rp: f64) -> f64 {
    if rp == 0.0 {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let p = 1.0 / rp;
    let sum: f64 = values.iter().map(|v| v.norm().powf(p)).sum();
    (sum * cell).powf(rp)
}

fn spectrum_of(f: &GridFunction) -> Result<GridFunction> {
    match f.domain {
        Domain::Space => forward(f),
        Domain::Frequency => Ok(f.clone()),
    }
}

/// `□_k f = F⁻¹(η_k · F f)`.
pub fn box_apply(f: &GridFunction, member: &PartitionMember) -> Result<GridFunction> {
    let spec = spectrum_of(f)?;
    let mut out = GridFunction::zeros(spec.grid.clone(), Domain::Frequency);
    for (&b, &v) in member.symbol.bins.iter().zip(&member.symbol.values) {
        if b >= out.values.len() {
            return Err(Error::param("partition member was sampled on a different grid"));
        }
        out.values[b] = spec.values[b] * v;
    }
    inverse(&out)
}

/// `Σ_k □_k f` over all instantiated windows.
pub fn reconstruct(f: &GridFunction, partition: &Partition) -> Result<GridFunction> {
    let spec = spectrum_of(f)?;
    partition.grid.check_same(&spec.grid)?;
    let mut out = GridFunction::zeros(spec.grid.clone(), Domain::Frequency);
    for m in &partition.members {
        for (&b, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
            out.values[b] += spec.values[b] * v;
        }
    }
    inverse(&out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub index: WindowIndex,
    /// `‖□_k f‖_p`
    pub norm: f64,
    /// `⟨k⟩^{s/(1−α)}` or `2^{js}`
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub rq: f64,
    /// Non-vanishing pieces in window order.
    pub pieces: Vec<Piece>,
}

impl NormResult {
    /// Recomputes `value` from the pieces.
    pub fn aggregate(&self) -> f64 {
        multiplier_aggregate(self.pieces.iter().map(|p| p.weight * p.norm), self.rq)
    }
}

/// Fraction of spectral energy outside the partition's safe bins.
pub fn unsafe_energy_fraction(spec: &GridFunction, partition: &Partition) -> f64 {
    let mut total = 0.0;
    let mut outside = 0.0;
    for (v, &safe) in spec.values.iter().zip(&partition.safe) {
        let e = v.norm_sqr();
        total += e;
        if !safe {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

fn check_band(spec: &GridFunction, partition: &Partition) -> Result<()> {
    let frac = unsafe_energy_fraction(spec, partition);
    if frac > 1e-20 {
        return Err(Error::Truncation(format!(
            "spectrum leaves the safe window (relative energy {frac:.3e} outside)"
        )));
    }
    Ok(())
}

/// `‖□_k f‖_p` for every window the spectrum meets (window order).
pub(crate) fn pieces_of_spectrum(spec: &GridFunction, partition: &Partition, rp: f64) -> Result<Vec<(WindowIndex, f64)>> {
    let grid = &spec.grid;
    let cell = grid.cell_volume();
    let out: Vec<Option<(WindowIndex, f64)>> = partition
        .members
        .par_iter()
        .map(|m| {
            let mut hit = false;
            let mut local = GridFunction::zeros(grid.clone(), Domain::Frequency);
            for (&b, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
                let x = spec.values[b] * v;
                hit |= x.norm_sqr() > 0.0;
                local.values[b] = x;
            }
            if !hit {
                return Ok(None);
            }
            let g = inverse(&local)?;
            Ok(Some((m.index, lp_values(&g.values, cell, rp))))
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

/// `M^{s,α}_{p,q}` norm (Besov norm for `α = 1`) of a band-limited `f`.
pub fn space_norm(f: &GridFunction, params: &SpaceParams, partition: &Partition) -> Result<NormResult> {
    params.validate()?;
    if params.alpha != partition.alpha() {
        return Err(Error::param(format!(
            "space alpha {} differs from partition alpha {}",
            params.alpha,
            partition.alpha()
        )));
    }
    let spec = spectrum_of(f)?;
    partition.grid.check_same(&spec.grid)?;
    check_band(&spec, partition)?;
    let pieces: Vec<Piece> = pieces_of_spectrum(&spec, partition, params.rp)?
        .into_iter()
        .map(|(index, norm)| Piece { index, norm, weight: index_weight(index, params.s, params.alpha) })
        .collect();
    let mut r = NormResult { value: 0.0, rq: params.rq, pieces };
    r.value = r.aggregate();
    Ok(r)
}

/// `‖{‖□_k^{α₂} f‖_{M^{0,α₁}_{p,q}}}_k‖_{ℓ_q^{s,α₂}}`: the fine norm of each
/// coarse piece, aggregated over the coarse windows.
pub fn coarse_norm(f: &GridFunction, s: f64, rp: f64, rq: f64, fine: &Partition, coarse: &Partition) -> Result<f64> {
    let (a1, a2) = (fine.alpha(), coarse.alpha());
    if a1 > a2 {
        return Err(Error::param(format!("coarse norm needs alpha1 <= alpha2, got {a1} > {a2}")));
    }
    check_reciprocal("1/p", rp)?;
    check_reciprocal("1/q", rq)?;
    let spec = spectrum_of(f)?;
    fine.grid.check_same(&spec.grid)?;
    coarse.grid.check_same(&spec.grid)?;
    check_band(&spec, fine)?;
    check_band(&spec, coarse)?;
    let mut outer = Vec::new();
    for m in &coarse.members {
        let mut local = GridFunction::zeros(spec.grid.clone(), Domain::Frequency);
        let mut hit = false;
        for (&b, &v) in m.symbol.bins.iter().zip(&m.symbol.values) {
            let x = spec.values[b] * v;
            hit |= x.norm_sqr() > 0.0;
            local.values[b] = x;
        }
        if !hit {
            continue;
        }
        let inner = pieces_of_spectrum(&local, fine, rp)?;
        let inner_norm = multiplier_aggregate(inner.into_iter().map(|(_, v)| v), rq);
        outer.push(index_weight(m.index, s, a2) * inner_norm);
    }
    Ok(multiplier_aggregate(outer.into_iter(), rq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_transforms::FreqGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_function() {
        let grid = FreqGrid::new(1, 64, 5.0).unwrap();
        let f = GridFunction::from_fn(grid, |_| Complex64::new(1.0, 0.0));
        assert!((lp_quasinorm(&f, 0.5).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        assert_eq!(lp_quasinorm(&f, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_lp_norms() {
        let grid = FreqGrid::new(1, 4096, 64.0).unwrap();
        let f = GridFunction::from_fn(grid, |x| Complex64::new((-PI * (x[0] - 32.0).powi(2)).exp(), 0.0));
        for p in [0.5f64, 1.0, 2.0, 3.0, 7.5] {
            let expect = p.powf(-1.0 / (2.0 * p));
            let got = lp_quasinorm(&f, 1.0 / p).unwrap();
            assert!((got - expect).abs() < 1e-6, "p={p}: {got} vs {expect}");
        }
    }

    #[test]
    fn dilation_law() {
        let grid = FreqGrid::new(2, 256, 32.0).unwrap();
        let g = |lam: f64| {
            GridFunction::from_fn(grid.clone(), move |x| {
                let r2 = ((x[0] - 16.0) / lam).powi(2) + ((x[1] - 16.0) / lam).powi(2);
                Complex64::new((-PI * r2).exp(), 0.0)
            })
        };
        let (f1, f2) = (g(1.0), g(2.0));
        for rp in [0.25, 0.5, 1.0, 1.5] {
            let ratio = lp_quasinorm(&f2, rp).unwrap() / lp_quasinorm(&f1, rp).unwrap();
            assert!((ratio - 2f64.powf(2.0 * rp)).abs() < 1e-8);
        }
    }
}
