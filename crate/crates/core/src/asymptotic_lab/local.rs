//! Lower bounds for the localized identity `□_k^{α₁∨α₂}: M₁ → M₂` on a grid
//! fitted around one window.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha_covering::bump::plateau_bump;
use crate::alpha_covering::{bracket, build_partition, dist, neighbor_set, Covering, Partition, Relation, Vec2, WindowIndex};
use crate::error::{Error, Result};
use crate::grid_transforms::fft::inverse;
use crate::grid_transforms::witness::{spread_offsets, translate_spectrum};
use crate::grid_transforms::{box_apply, bump_spectrum, space_norm, witness_bump, Domain, FreqGrid, GridFunction};
use crate::index_calculus::SpaceParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    /// One fine window matched to the scale of `k`.
    Uniform,
    /// One full coarse window.
    Concentrated,
    /// Translated fine windows filling the clean region of `k`.
    Spread,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormSample {
    /// Requested dyadic scale.
    pub j: u32,
    /// `log₂⟨k⟩^{1/(1−α∨)}` (or `j` for dyadic windows).
    pub j_eff: f64,
    pub k: WindowIndex,
    pub witness: WitnessKind,
    pub lower_bound: f64,
}

/// Grid-sizing knobs of the lab.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    /// Largest number of samples per axis.
    pub max_grid: usize,
    /// Preferred spread pitch in units of the inverse witness radius.
    pub pitch_units: f64,
    /// Smallest acceptable pitch in the same units.
    pub min_pitch_units: f64,
    /// Bins across the diameter of the narrowest witness spectrum.
    pub bins_across: f64,
    /// Fraction of the available clean radius used by witnesses.
    pub radius_safety: f64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { max_grid: 1 << 16, pitch_units: 24.0, min_pitch_units: 6.0, bins_across: 32.0, radius_safety: 0.9 }
    }
}

/// The two spaces of a localized operator norm and the coverings involved.
#[derive(Clone, Debug)]
pub struct Localization {
    pub source: SpaceParams,
    pub target: SpaceParams,
    /// Covering of `α₁ ∧ α₂`.
    pub fine: Covering,
    /// Covering of `α₁ ∨ α₂`; `k` always addresses this one.
    pub coarse: Covering,
    /// Witness radius in units of the window scale.
    pub radius_factor: f64,
    pub config: LabConfig,
}

/// Geometry available around one coarse window.
#[derive(Clone, Debug)]
struct WindowPlan {
    anchor: Vec2,
    clean_radius: f64,
    uniform: WindowIndex,
    gamma: Vec<WindowIndex>,
    /// Largest admissible radius factor at this window.
    capacity: f64,
}

impl Localization {
    /// Sets up the coverings; the witness radius is fixed later by
    /// [`Localization::calibrate`] or [`Localization::with_radius_factor`].
    pub fn new(source: &SpaceParams, target: &SpaceParams, config: LabConfig) -> Result<Self> {
        source.validate()?;
        target.validate()?;
        if source.n != target.n {
            return Err(Error::param("source and target dimensions differ"));
        }
        if target.rp > source.rp {
            return Err(Error::param("localized lower bounds need 1/p2 <= 1/p1"));
        }
        let n = source.n as usize;
        let (lo, hi) = (source.alpha.min(target.alpha), source.alpha.max(target.alpha));
        Ok(Localization {
            source: source.with_s(0.0),
            target: target.with_s(0.0),
            fine: Covering::calibrated(lo, n)?,
            coarse: Covering::calibrated(hi, n)?,
            radius_factor: 0.0,
            config,
        })
    }

    pub fn alpha_max(&self) -> f64 {
        self.coarse.alpha()
    }

    pub fn equal_alpha(&self) -> bool {
        self.fine.alpha() == self.coarse.alpha()
    }

    pub fn with_radius_factor(mut self, w: f64) -> Self {
        self.radius_factor = w;
        self
    }

    /// Coarse window on the `e₁` ray with `⟨k⟩^{1/(1−α∨)} ≈ 2^j`.
    pub fn window_for_scale(&self, j: u32) -> WindowIndex {
        if self.coarse.is_dyadic() {
            return WindowIndex::Dyadic(j);
        }
        let target = 4f64.powf(j as f64 * (1.0 - self.alpha_max()));
        let k = (target - 1.0).max(0.0).sqrt().round().max(1.0) as i64;
        WindowIndex::lattice1(k)
    }

    pub fn j_eff(&self, k: WindowIndex) -> f64 {
        match k {
            WindowIndex::Dyadic(j) => j as f64,
            WindowIndex::Lattice(_) => bracket(k.euclid()).log2() / (1.0 - self.alpha_max()),
        }
    }

    fn plan(&self, k: WindowIndex) -> Result<WindowPlan> {
        let w = self.coarse.window(k)?;
        if w.clean_radius <= 0.0 {
            return Err(Error::Geometry(format!("window {k:?} has no region where its symbol is one")));
        }
        let mut capacity = w.clean_radius / w.scale;
        let (uniform, gamma) = if self.equal_alpha() {
            (k, vec![k])
        } else {
            let u = self.nearest_fine(w.anchor)?;
            let uw = self.fine.window(u)?;
            capacity = capacity
                .min(uw.clean_radius / uw.scale)
                .min((w.clean_radius - dist(uw.anchor, w.anchor)) / uw.scale);
            let set = neighbor_set(Relation::GammaTilde, k, &self.coarse, Some(&self.fine))?;
            // keep the part of Γ̃ inside the clean ball around the anchor
            let mut gamma = Vec::new();
            for l in set.members {
                let lw = self.fine.window(l)?;
                if dist(lw.center, w.anchor) + self.fine.spec().c_big * lw.scale <= w.clean_radius {
                    capacity = capacity.min(lw.clean_radius / lw.scale);
                    gamma.push(l);
                }
            }
            // empty Γ̃ (scales too close) falls back to the single matched window
            let gamma = if gamma.is_empty() { vec![u] } else { gamma };
            (u, gamma)
        };
        Ok(WindowPlan { anchor: w.anchor, clean_radius: w.clean_radius, uniform, gamma, capacity })
    }

    fn nearest_fine(&self, x: Vec2) -> Result<WindowIndex> {
        let cands = self.fine.windows_touching_box(x, x)?;
        let mut best = (f64::INFINITY, None);
        for c in cands {
            let a = self.fine.window(c)?.anchor;
            let d = dist(a, x);
            if d < best.0 || (d == best.0 && Some(c) < best.1) {
                best = (d, Some(c));
            }
        }
        best.1.ok_or_else(|| Error::Geometry(format!("no fine window near {x:?}")))
    }

    /// Fixes one radius factor for a sweep: the safety fraction of the
    /// smallest capacity among windows whose capacity is at least half the
    /// median one. Windows below that floor are returned as skipped.
    pub fn calibrate(&mut self, ks: &[WindowIndex]) -> Result<Vec<WindowIndex>> {
        let caps: Vec<(WindowIndex, f64)> = ks
            .par_iter()
            .map(|&k| (k, self.plan(k).map(|p| p.capacity).unwrap_or(0.0)))
            .collect();
        let mut sorted: Vec<f64> = caps.iter().map(|c| c.1).collect();
        sorted.sort_by(f64::total_cmp);
        let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
        if median <= 0.0 {
            return Err(Error::Geometry("no window of the sweep admits a witness".into()));
        }
        let floor = 0.5 * median;
        let used = caps.iter().filter(|c| c.1 >= floor).map(|c| c.1).fold(f64::INFINITY, f64::min);
        self.radius_factor = self.config.radius_safety * used;
        Ok(caps.into_iter().filter(|c| c.1 < floor).map(|c| c.0).collect())
    }

    /// Grid and partitions around window `k`.
    fn setup(&self, k: WindowIndex) -> Result<Setup> {
        if !(self.radius_factor > 0.0) {
            return Err(Error::param("radius factor not calibrated"));
        }
        let plan = self.plan(k)?;
        if plan.capacity < self.radius_factor {
            return Err(Error::Geometry(format!(
                "window {k:?} admits radius factor {:.4} < {:.4}",
                plan.capacity, self.radius_factor
            )));
        }
        let n = self.source.n as usize;
        let sigma_min = plan
            .gamma
            .iter()
            .chain(std::iter::once(&plan.uniform))
            .map(|&l| self.fine.center_scale(l).map(|c| c.1))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let rho = self.radius_factor * sigma_min;
        let cfg = &self.config;
        let max_grid = if n == 2 { cfg.max_grid.min(1 << 12) } else { cfg.max_grid };
        let r = plan.clean_radius;
        let l_max = (max_grid as f64 - 8.0) / (2.0 * r);
        let l_res = cfg.bins_across / (2.0 * rho);
        if l_res > l_max {
            return Err(Error::Geometry(format!("window {k:?} needs more than {max_grid} samples per axis")));
        }
        let count = lattice_extent(&plan.gamma) as f64;
        let units = cfg.pitch_units.min(l_max * rho / count);
        if units < cfg.min_pitch_units {
            return Err(Error::Geometry(format!(
                "{count} translates around window {k:?} do not fit in {max_grid} samples"
            )));
        }
        let period = l_res.max(count * units / rho);
        let size = ((2.0 * r * period + 8.0).ceil() as usize).next_power_of_two();
        let carrier = [(plan.anchor[0] * period).round() as i64, (plan.anchor[1] * period).round() as i64];
        let grid = FreqGrid::new(n, size, period)?.with_carrier(carrier)?;
        let fine = build_partition(self.fine.spec(), &grid)?;
        let coarse = if self.equal_alpha() { None } else { Some(build_partition(self.coarse.spec(), &grid)?) };
        Ok(Setup { grid, fine, coarse, plan, pitch: period / count })
    }

    /// Norm ratio `‖□_k f‖_{M₂} / ‖f‖_{M₁}`.
    fn ratio(&self, s: &Setup, k: WindowIndex, f: &GridFunction) -> Result<f64> {
        let coarse = s.coarse();
        let member = coarse.member(k).ok_or_else(|| Error::Geometry(format!("window {k:?} not instantiated")))?;
        let localized = box_apply(f, member)?;
        let (src, tgt) = s.partitions(self.source.alpha, self.target.alpha);
        let num = space_norm(&localized, &self.target, tgt)?.value;
        let den = space_norm(f, &self.source, src)?.value;
        if !(den > 0.0) {
            return Err(Error::Check(format!("witness at {k:?} has vanishing source norm")));
        }
        Ok(num / den)
    }

    fn witness(&self, s: &Setup, k: WindowIndex, kind: WitnessKind) -> Result<GridFunction> {
        let w = self.radius_factor;
        match kind {
            WitnessKind::Uniform => witness_bump(s.plan.uniform, &self.fine, w, &s.grid),
            WitnessKind::Concentrated => witness_bump(k, &self.coarse, w, &s.grid),
            WitnessKind::Spread if self.equal_alpha() || s.plan.gamma == [s.plan.uniform] => {
                witness_bump(s.plan.uniform, &self.fine, w, &s.grid)
            }
            WitnessKind::Spread => {
                let offsets = spread_offsets(&s.plan.gamma, s.pitch, &s.grid)?;
                let mut total = GridFunction::zeros(s.grid.clone(), Domain::Frequency);
                for (&l, &y) in s.plan.gamma.iter().zip(&offsets) {
                    let lw = self.fine.window(l)?;
                    let mut spec = bump_spectrum(&s.grid, lw.anchor, w * lw.scale)?;
                    translate_spectrum(&mut spec, y);
                    total.add_assign(&spec)?;
                }
                inverse(&total)
            }
            WitnessKind::MonteCarlo => Err(Error::param("Monte Carlo inputs are random")),
        }
    }

    /// Uniform, concentrated and spread lower bounds at window `k`.
    pub fn witness_samples(&self, j: u32, k: WindowIndex) -> Result<Vec<OpNormSample>> {
        let s = self.setup(k)?;
        let j_eff = self.j_eff(k);
        [WitnessKind::Uniform, WitnessKind::Concentrated, WitnessKind::Spread]
            .iter()
            .map(|&kind| {
                let f = self.witness(&s, k, kind)?;
                Ok(OpNormSample { j, j_eff, k, witness: kind, lower_bound: self.ratio(&s, k, &f)? })
            })
            .collect()
    }

    /// Largest ratio over the witnesses and `trials` random inputs supported
    /// in the clean region of window `k`.
    pub fn montecarlo(&self, j: u32, k: WindowIndex, trials: usize, seed: u64) -> Result<OpNormSample> {
        let s = self.setup(k)?;
        let mut best: f64 = 0.0;
        for kind in [WitnessKind::Uniform, WitnessKind::Concentrated, WitnessKind::Spread] {
            best = best.max(self.ratio(&s, k, &self.witness(&s, k, kind)?)?);
        }
        let values: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let f = self.random_input(&s, seed, t as u64)?;
                self.ratio(&s, k, &f)
            })
            .collect::<Result<_>>()?;
        for v in values {
            best = best.max(v);
        }
        Ok(OpNormSample { j, j_eff: self.j_eff(k), k, witness: WitnessKind::MonteCarlo, lower_bound: best })
    }

    fn random_input(&self, s: &Setup, seed: u64, trial: u64) -> Result<GridFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let grid = &s.grid;
        let (a, r) = (s.plan.anchor, s.plan.clean_radius);
        let mut spec = GridFunction::zeros(grid.clone(), Domain::Frequency);
        let bins = grid.bins_in_box([a[0] - r, a[1] - r], [a[0] + r, a[1] + r]);
        let gauss = |rng: &mut ChaCha8Rng| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        };
        match trial % 3 {
            // white coefficients under a smooth envelope
            0 => {
                for b in bins {
                    let e = plateau_bump(dist(grid.freq(b), a) / r, 0.5, 1.0);
                    if e > 0.0 {
                        spec.values[b] = gauss(&mut rng) * e;
                    }
                }
            }
            // one smooth bump of random size and position
            1 => {
                let rad = r * rng.random_range(0.05..0.95);
                let off = (r - rad) * rng.random_range(0.0..1.0);
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                let c = if grid.n == 1 { [a[0] + off * th.cos().signum(), 0.0] } else { [a[0] + off * th.cos(), a[1] + off * th.sin()] };
                let amp = gauss(&mut rng);
                for b in bins {
                    let e = plateau_bump(dist(grid.freq(b), c) / rad, 0.25, 1.0);
                    if e > 0.0 {
                        spec.values[b] = amp * e;
                    }
                }
            }
            // random phases and shifts on every absorbed fine window
            _ => {
                for &l in &s.plan.gamma {
                    let lw = self.fine.window(l)?;
                    let rad = self.radius_factor * lw.scale;
                    let shift: Vec2 = [rng.random_range(0.0..grid.period), if grid.n == 2 { rng.random_range(0.0..grid.period) } else { 0.0 }];
                    let amp = gauss(&mut rng);
                    for b in grid.bins_in_box([lw.anchor[0] - rad, lw.anchor[1] - rad], [lw.anchor[0] + rad, lw.anchor[1] + rad]) {
                        let xi = grid.freq(b);
                        let e = plateau_bump(dist(xi, lw.anchor) / rad, 0.25, 1.0);
                        if e > 0.0 {
                            let ph = -std::f64::consts::TAU * ((xi[0] * shift[0] + xi[1] * shift[1]) % 1.0);
                            spec.values[b] += amp * e * Complex64::from_polar(1.0, ph);
                        }
                    }
                }
            }
        }
        inverse(&spec)
    }
}

/// Largest number of distinct lattice coordinates along one axis.
fn lattice_extent(members: &[WindowIndex]) -> i64 {
    let coords: Vec<[i64; 2]> = members
        .iter()
        .map(|m| match *m {
            WindowIndex::Lattice(k) => k,
            WindowIndex::Dyadic(j) => [j as i64, 0],
        })
        .collect();
    (0..2)
        .map(|i| {
            let lo = coords.iter().map(|c| c[i]).min().unwrap_or(0);
            let hi = coords.iter().map(|c| c[i]).max().unwrap_or(0);
            hi - lo + 1
        })
        .max()
        .unwrap_or(1)
}

struct Setup {
    grid: FreqGrid,
    fine: Partition,
    coarse: Option<Partition>,
    plan: WindowPlan,
    pitch: f64,
}

impl Setup {
    fn coarse(&self) -> &Partition {
        self.coarse.as_ref().unwrap_or(&self.fine)
    }

    fn partitions(&self, a1: f64, a2: f64) -> (&Partition, &Partition) {
        let pick = |a: f64| if a == self.fine.alpha() { &self.fine } else { self.coarse() };
        (pick(a1), pick(a2))
    }
}

/// Witness lower bounds for `‖□_k^{α₁∨α₂}: M^{0,α₁}_{p₁,q₁} → M^{0,α₂}_{p₂,q₂}‖`.
pub fn box_opnorm_lower(k: WindowIndex, source: &SpaceParams, target: &SpaceParams, config: LabConfig) -> Result<Vec<OpNormSample>> {
    let mut loc = Localization::new(source, target, config)?;
    loc.calibrate(&[k])?;
    let j = loc.j_eff(k).round().max(0.0) as u32;
    loc.witness_samples(j, k)
}

pub fn box_opnorm_montecarlo(
    k: WindowIndex,
    source: &SpaceParams,
    target: &SpaceParams,
    trials: usize,
    seed: u64,
    config: LabConfig,
) -> Result<OpNormSample> {
    if trials == 0 {
        return Err(Error::param("Monte Carlo needs at least one trial"));
    }
    let mut loc = Localization::new(source, target, config)?;
    loc.calibrate(&[k])?;
    let j = loc.j_eff(k).round().max(0.0) as u32;
    loc.montecarlo(j, k, trials, seed)
}
