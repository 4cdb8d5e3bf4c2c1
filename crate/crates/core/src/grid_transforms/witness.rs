//! Test functions with compact Fourier support used in the lower bounds.

use num_complex::Complex64;

use super::fft::inverse;
use super::grid::{Domain, FreqGrid, GridFunction};
use crate::alpha_covering::bump::plateau_bump;
use crate::alpha_covering::{dist, neighbor_set, Covering, Relation, Vec2, WindowIndex};
use crate::error::{Error, Result};

/// Flat top of the base profile relative to its support radius.
pub const WITNESS_PLATEAU: f64 = 0.25;

/// Fewest bins a witness spectrum may span across its diameter.
const MIN_BINS_ACROSS: f64 = 8.0;

/// Spectrum `b((ξ − center)/radius)` of the base bump, `b` supported in the
/// unit ball.
pub fn bump_spectrum(grid: &FreqGrid, center: Vec2, radius: f64) -> Result<GridFunction> {
    if !(radius > 0.0) {
        return Err(Error::param("bump radius must be positive"));
    }
    if 2.0 * radius * grid.period < MIN_BINS_ACROSS {
        return Err(Error::Geometry(format!(
            "bump of radius {radius} spans fewer than {MIN_BINS_ACROSS} bins at period {}",
            grid.period
        )));
    }
    let (lo, hi) = grid.band_box();
    let inside = center[0] - radius >= lo[0]
        && center[0] + radius <= hi[0]
        && (grid.n == 1 || (center[1] - radius >= lo[1] && center[1] + radius <= hi[1]));
    if !inside {
        return Err(Error::Truncation(format!("bump at {center:?} with radius {radius} leaves the grid band")));
    }
    let mut out = GridFunction::zeros(grid.clone(), Domain::Frequency);
    let c = if grid.n == 1 { [center[0], 0.0] } else { center };
    for b in grid.bins_in_box([c[0] - radius, c[1] - radius], [c[0] + radius, c[1] + radius]) {
        let r = dist(grid.freq(b), c) / radius;
        let v = plateau_bump(r, WITNESS_PLATEAU, 1.0);
        if v > 0.0 {
            out.values[b] = Complex64::new(v, 0.0);
        }
    }
    Ok(out.with_band_limit(crate::alpha_covering::norm2(c) + radius))
}

/// Point samples of the bump with the given spectral centre and radius,
/// shifted in space by `shift`.
pub fn bump_function(grid: &FreqGrid, center: Vec2, radius: f64, shift: Vec2) -> Result<GridFunction> {
    let mut spec = bump_spectrum(grid, center, radius)?;
    translate_spectrum(&mut spec, shift);
    inverse(&spec)
}

/// `T_y`: multiplies a spectrum by `e^{−2πi ξ·y}` so that `f ↦ f(· − y)`.
pub fn translate_spectrum(spec: &mut GridFunction, y: Vec2) {
    if y == [0.0, 0.0] {
        return;
    }
    let grid = spec.grid.clone();
    for (b, v) in spec.values.iter_mut().enumerate() {
        if *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let f = grid.freq_index(b);
        // reduce the phase exactly when y is a multiple of the sample spacing
        let turns = (f[0] as f64 * y[0] + f[1] as f64 * y[1]) / grid.period;
        *v *= Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * turns.fract());
    }
}

/// `f_l^α`: base bump dilated by the window scale and centred at the window
/// anchor, with support radius `radius_factor · scale`.
pub fn witness_bump(l: WindowIndex, covering: &Covering, radius_factor: f64, grid: &FreqGrid) -> Result<GridFunction> {
    let w = covering.window(l)?;
    let radius = radius_factor * w.scale;
    if radius > w.clean_radius {
        return Err(Error::Geometry(format!(
            "witness radius {radius:.4} exceeds the clean radius {:.4} of window {l:?}",
            w.clean_radius
        )));
    }
    bump_function(grid, w.anchor, radius, [0.0, 0.0])
}

/// `F_{k,N} = Σ_{l∈Γ̃_k} T_{N l} f_l` with `Γ̃_k` taken between the coarse
/// covering (anchor `k`) and the fine covering (members `l`); `N = pitch`.
///
/// Returns the function and the members used.
pub fn witness_spread(
    k: WindowIndex,
    fine: &Covering,
    coarse: &Covering,
    radius_factor: f64,
    pitch: f64,
    grid: &FreqGrid,
) -> Result<(GridFunction, Vec<WindowIndex>)> {
    let set = neighbor_set(Relation::GammaTilde, k, coarse, Some(fine))?;
    if set.is_empty() {
        return Err(Error::Geometry(format!("no fine window is absorbed by the clean region of {k:?}")));
    }
    let members: Vec<WindowIndex> = set.members.into_iter().collect();
    let offsets = spread_offsets(&members, pitch, grid)?;
    let mut total = GridFunction::zeros(grid.clone(), Domain::Frequency);
    for (&l, &y) in members.iter().zip(&offsets) {
        let w = fine.window(l)?;
        let radius = radius_factor * w.scale;
        if radius > w.clean_radius {
            return Err(Error::Geometry(format!("witness radius exceeds the clean radius of {l:?}")));
        }
        let mut spec = bump_spectrum(grid, w.anchor, radius)?;
        translate_spectrum(&mut spec, y);
        total.add_assign(&spec)?;
    }
    Ok((inverse(&total)?, members))
}

/// Spatial offsets `pitch · (l − l_min)`; fails when they do not fit in
/// one period.
pub fn spread_offsets(members: &[WindowIndex], pitch: f64, grid: &FreqGrid) -> Result<Vec<Vec2>> {
    let coords: Vec<[i64; 2]> = members
        .iter()
        .map(|m| match *m {
            WindowIndex::Lattice(k) => k,
            WindowIndex::Dyadic(j) => [j as i64, 0],
        })
        .collect();
    let lo = [0, 1].map(|i| coords.iter().map(|c| c[i]).min().unwrap_or(0));
    let hi = [0, 1].map(|i| coords.iter().map(|c| c[i]).max().unwrap_or(0));
    for i in 0..grid.n {
        if pitch * (hi[i] - lo[i] + 1) as f64 > grid.period * (1.0 + 1e-12) {
            return Err(Error::Geometry(format!(
                "{} translates at pitch {pitch} do not fit in period {}",
                hi[i] - lo[i] + 1,
                grid.period
            )));
        }
    }
    Ok(coords
        .iter()
        .map(|c| [pitch * (c[0] - lo[0]) as f64, pitch * (c[1] - lo[1]) as f64])
        .collect())
}
