//! Cross-checks of the closed forms against measured quantities.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{exponent_fit, line_fit, ExponentFit};
use super::local::{LabConfig, Localization, OpNormSample, WitnessKind};
use crate::alpha_covering::{build_partition, CoveringSpec, WindowIndex};
use crate::error::{Error, Result};
use crate::grid_transforms::fft::inverse;
use crate::grid_transforms::witness::translate_spectrum;
use crate::grid_transforms::{bump_spectrum, coarse_norm, lp_quasinorm, space_norm, Domain, FreqGrid, GridFunction, IndexedSeq};
use crate::index_calculus::{embedding_decide, index_a, seq_multiplier_norm_closed, EmbeddingVerdict, IndexBreakdown, SpaceParams};

/// Slope tolerance of the rate checks.
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Verdicts with `|margin|` at most this are not tested numerically.
pub const BOUNDARY_BAND: f64 = 0.2;
/// Slope above which truncated multiplier norms count as growing.
pub const GROWTH_THRESHOLD: f64 = 0.1;
/// Largest relative change of the spread witness when its pitch doubles.
pub const PITCH_STABILITY: f64 = 0.02;

fn mix_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaOptions {
    pub j_min: u32,
    pub j_max: u32,
    /// Monte Carlo trials per scale (0 disables them).
    pub trials: usize,
    pub seed: u64,
    pub config: LabConfig,
}

impl LemmaOptions {
    /// `j ∈ 4..=9` for `n = 1` and `3..=6` for `n = 2`.
    pub fn for_dimension(n: u32) -> Self {
        let (j_min, j_max) = if n == 1 { (4, 9) } else { (3, 6) };
        LemmaOptions { j_min, j_max, trials: 0, seed: 0, config: LabConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFit {
    pub witness: WitnessKind,
    pub fit: ExponentFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma41Report {
    pub source: SpaceParams,
    pub target: SpaceParams,
    pub predicted: IndexBreakdown,
    pub radius_factor: f64,
    pub samples: Vec<OpNormSample>,
    pub montecarlo: Vec<OpNormSample>,
    pub fits: Vec<WitnessFit>,
    /// Fit of the largest witness value at each scale.
    pub max_fit: ExponentFit,
    /// Witness with the steepest individual fit.
    pub steepest: WitnessKind,
    pub slope_error: f64,
    /// Relative change of the spread witness at the top scale when the pitch
    /// doubles.
    pub pitch_stability: Option<f64>,
    pub tolerance: f64,
    pub seed: u64,
    pub pass: bool,
}

/// Growth exponent of `‖□_k^{α₁∨α₂}: M^{0,α₁}_{p₁,q} → M^{0,α₂}_{p₂,q}‖`
/// against the index function.
pub fn lemma41_check(source: &SpaceParams, target: &SpaceParams, opts: &LemmaOptions) -> Result<Lemma41Report> {
    if source.rq != target.rq {
        return Err(Error::param("the rate check needs q1 = q2"));
    }
    if opts.j_max < opts.j_min + 4 {
        return Err(Error::param("the scale range must span at least 4 octaves"));
    }
    let predicted = index_a(source.n, source.rp, target.rp, source.rq, source.alpha, target.alpha)?;
    let mut loc = Localization::new(source, target, opts.config)?;
    let js: Vec<u32> = (opts.j_min..=opts.j_max).collect();
    let ks: Vec<WindowIndex> = js.iter().map(|&j| loc.window_for_scale(j)).collect();
    let skipped = loc.calibrate(&ks)?;
    if !skipped.is_empty() {
        return Err(Error::Geometry(format!("windows {skipped:?} leave no room for witnesses")));
    }
    let per_j: Vec<Vec<OpNormSample>> = js
        .par_iter()
        .zip(&ks)
        .map(|(&j, &k)| loc.witness_samples(j, k))
        .collect::<Result<_>>()?;

    let kinds = [WitnessKind::Uniform, WitnessKind::Concentrated, WitnessKind::Spread];
    let fits = kinds
        .iter()
        .map(|&kind| {
            let pts: Vec<(f64, f64)> = per_j
                .iter()
                .flat_map(|v| v.iter().filter(|s| s.witness == kind).map(|s| (s.j_eff, s.lower_bound)))
                .collect();
            Ok(WitnessFit { witness: kind, fit: exponent_fit(&pts)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_pts: Vec<(f64, f64)> = per_j
        .iter()
        .map(|v| (v[0].j_eff, v.iter().map(|s| s.lower_bound).fold(0.0, f64::max)))
        .collect();
    let max_fit = exponent_fit(&max_pts)?;
    let steepest = fits
        .iter()
        .fold(&fits[0], |b, f| if f.fit.slope > b.fit.slope { f } else { b })
        .witness;

    let montecarlo = if opts.trials > 0 {
        js.iter()
            .zip(&ks)
            .map(|(&j, &k)| loc.montecarlo(j, k, opts.trials, mix_seed(opts.seed, j as u64)))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let pitch_stability = pitch_stability(&loc, opts.j_max, *ks.last().unwrap(), &per_j[per_j.len() - 1])?;
    let a = predicted.value.to_owned();
    let slope_error = (max_fit.slope - a).abs();
    let pass = slope_error <= SLOPE_TOLERANCE
        && fits.iter().all(|f| f.fit.slope <= a + SLOPE_TOLERANCE)
        && pitch_stability.map_or(true, |d| d <= PITCH_STABILITY);
    Ok(Lemma41Report {
        source: *source,
        target: *target,
        predicted,
        radius_factor: loc.radius_factor,
        samples: per_j.into_iter().flatten().collect(),
        montecarlo,
        fits,
        max_fit,
        steepest,
        slope_error,
        pitch_stability,
        tolerance: SLOPE_TOLERANCE,
        seed: opts.seed,
        pass,
    })
}

/// Doubles the spread pitch at the top scale, or halves it when the doubled
/// pitch does not fit.
fn pitch_stability(loc: &Localization, j: u32, k: WindowIndex, base: &[OpNormSample]) -> Result<Option<f64>> {
    if loc.equal_alpha() {
        return Ok(None);
    }
    let spread = |s: &[OpNormSample]| s.iter().find(|x| x.witness == WitnessKind::Spread).map(|x| x.lower_bound);
    let reference = spread(base).expect("spread sample present");
    for factor in [2.0, 0.5] {
        let mut other = loc.clone();
        other.config.pitch_units *= factor;
        other.config.min_pitch_units = other.config.min_pitch_units.min(other.config.pitch_units);
        match other.witness_samples(j, k) {
            Ok(v) => {
                let x = spread(&v).expect("spread sample present");
                return Ok(Some((x - reference).abs() / reference));
            }
            Err(Error::Geometry(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyStatus {
    Consistent,
    Inconsistent,
    BoundarySkip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyOptions {
    /// Truncations `K = 2^m` for `m` in this range (dyadic: `K = m`).
    pub m_min: u32,
    pub m_max: u32,
    pub config: LabConfig,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions { m_min: 2, m_max: 5, config: LabConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub source: SpaceParams,
    pub target: SpaceParams,
    pub verdict: EmbeddingVerdict,
    pub status: ConsistencyStatus,
    /// Largest witness value per measured window on the ray.
    pub measured: Vec<(WindowIndex, f64)>,
    /// Windows without room for witnesses; left out of the sequence.
    pub skipped: Vec<WindowIndex>,
    /// `(K, truncated multiplier norm)`
    pub truncated: Vec<(f64, f64)>,
    /// Fit of `log₂` norm against `log₂ K` (dyadic: against `K`).
    pub fit: Option<ExponentFit>,
    /// `max(−margin, 0)` in the units of the fit.
    pub expected_slope: f64,
    pub grows: Option<bool>,
}

/// Feeds measured localized norms into the sequence-multiplier closed form
/// and checks that growth in the truncation matches the verdict.
pub fn embedding_consistency_check(source: &SpaceParams, target: &SpaceParams, opts: &ConsistencyOptions) -> Result<ConsistencyReport> {
    let verdict = embedding_decide(source, target)?;
    let mut report = ConsistencyReport {
        source: *source,
        target: *target,
        verdict: verdict.clone(),
        status: ConsistencyStatus::BoundarySkip,
        measured: Vec::new(),
        skipped: Vec::new(),
        truncated: Vec::new(),
        fit: None,
        expected_slope: 0.0,
        grows: None,
    };
    if target.rp > source.rp {
        return Err(Error::param("consistency check needs 1/p2 <= 1/p1"));
    }
    if opts.m_max < opts.m_min + 2 {
        return Err(Error::param("need at least three truncation levels"));
    }
    if verdict.margin.abs() <= BOUNDARY_BAND {
        return Ok(report);
    }
    let mut loc = Localization::new(source, target, opts.config)?;
    let am = loc.alpha_max();
    let dyadic = loc.coarse.is_dyadic();
    let top = if dyadic { opts.m_max as i64 } else { 1i64 << opts.m_max };
    let ray: Vec<WindowIndex> = (0..=top).map(|t| loc.coarse.ray_index(t)).collect();
    report.skipped = loc.calibrate(&ray)?;
    let measured: Vec<Option<(WindowIndex, f64)>> = ray
        .par_iter()
        .map(|&k| {
            if report.skipped.contains(&k) {
                return Ok(None);
            }
            let v = loc.witness_samples(0, k)?;
            Ok(Some((k, v.iter().map(|s| s.lower_bound).fold(0.0, f64::max))))
        })
        .collect::<Result<_>>()?;
    report.measured = measured.into_iter().flatten().collect();

    let n = source.n;
    for m in opts.m_min..=opts.m_max {
        let big_k = if dyadic { m as i64 } else { 1i64 << m };
        let seq = truncated_sequence(&report.measured, big_k, n);
        let norm = seq_multiplier_norm_closed(&seq, source.s, target.s, source.rq, target.rq, am)?;
        report.truncated.push((big_k as f64, norm));
    }
    let pts: Vec<(f64, f64)> = report
        .truncated
        .iter()
        .map(|&(kk, v)| (if dyadic { kk } else { kk.log2() }, v.log2()))
        .collect();
    let fit = line_fit(pts)?;
    let grows = fit.slope > GROWTH_THRESHOLD;
    report.expected_slope = (-verdict.margin).max(0.0) / if dyadic { 1.0 } else { 1.0 - am };
    report.status = if grows != verdict.embeds { ConsistencyStatus::Consistent } else { ConsistencyStatus::Inconsistent };
    report.grows = Some(grows);
    report.fit = Some(fit);
    Ok(report)
}

/// All windows with `|k|∞ ≤ K`, valued by the measurement on the ray at the
/// nearest radius (mirror image for `n = 1`).
fn truncated_sequence(measured: &[(WindowIndex, f64)], big_k: i64, n: u32) -> IndexedSeq {
    let on_ray = |r: i64| measured.iter().find(|(k, _)| k.sup_norm() == r).map(|m| m.1);
    let mut seq = IndexedSeq::new(Vec::new());
    if let Some((WindowIndex::Dyadic(_), _)) = measured.first() {
        for &(k, v) in measured.iter().filter(|(k, _)| k.sup_norm() <= big_k) {
            seq.push(k, v);
        }
        return seq;
    }
    let range = -big_k..=big_k;
    let second: Vec<i64> = if n == 1 { vec![0] } else { range.clone().collect() };
    for a in range {
        for &b in &second {
            let r = ((a * a + b * b) as f64).sqrt().round() as i64;
            if let Some(v) = on_ray(r) {
                seq.push(WindowIndex::Lattice([a, b]), v);
            }
        }
    }
    seq
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop31Report {
    pub params: SpaceParams,
    pub alpha2: f64,
    pub grid_size: usize,
    pub period: f64,
    /// `coarse_norm / space_norm` per trial.
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub max_over_min: f64,
    pub seed: u64,
}

/// Norm equivalence of the fine `α₁` norm and the coarse-then-fine norm over
/// random sums of bumps.
pub fn prop31_ratio_check(params: &SpaceParams, alpha2: f64, trials: usize, seed: u64, grid: &FreqGrid) -> Result<Prop31Report> {
    params.validate()?;
    if params.alpha > alpha2 {
        return Err(Error::param("the coarse covering needs alpha1 <= alpha2"));
    }
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    if grid.carrier != [0, 0] {
        return Err(Error::param("norm comparison grids must be centred at the origin"));
    }
    let n = grid.n;
    let fine = build_partition(&CoveringSpec::calibrated(params.alpha, n)?, grid)?;
    let coarse = build_partition(&CoveringSpec::calibrated(alpha2, n)?, grid)?;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = random_bump_sum(grid, seed, t as u64)?;
            let c = coarse_norm(&f, params.s, params.rp, params.rq, &fine, &coarse)?;
            let m = space_norm(&f, params, &fine)?.value;
            Ok(c / m)
        })
        .collect::<Result<_>>()?;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(Prop31Report {
        params: *params,
        alpha2,
        grid_size: grid.size,
        period: grid.period,
        ratios,
        min,
        max,
        max_over_min: max / min,
        seed,
    })
}

/// One to four bumps with random centres, radii, amplitudes and positions.
pub fn random_bump_sum(grid: &FreqGrid, seed: u64, stream: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let band = grid.size as f64 / (2.0 * grid.period);
    let r_lo = 16.0 / grid.period;
    let r_hi = (4.0 * r_lo).min(0.25 * band);
    if r_lo >= r_hi {
        return Err(Error::Geometry(format!("band {band} too narrow for random bumps at period {}", grid.period)));
    }
    let mut total = GridFunction::zeros(grid.clone(), Domain::Frequency);
    for _ in 0..rng.random_range(1..=4) {
        let r = rng.random_range(r_lo..r_hi);
        let lim = 0.8 * band - r;
        let c = [rng.random_range(-lim..lim), if grid.n == 2 { rng.random_range(-lim..lim) } else { 0.0 }];
        let mut b = bump_spectrum(grid, c, r)?;
        let shift = [rng.random_range(0.0..grid.period), if grid.n == 2 { rng.random_range(0.0..grid.period) } else { 0.0 }];
        translate_spectrum(&mut b, shift);
        let amp = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU));
        for v in b.values.iter_mut() {
            *v *= amp;
        }
        total.add_assign(&b)?;
    }
    inverse(&total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rp1: f64,
    pub rp2: f64,
    pub n: u32,
    /// Spectral radii of the sweep.
    pub radii: Vec<f64>,
    /// `‖f‖_{p₂} / ‖f‖_{p₁}`
    pub ratios: Vec<f64>,
    /// Fit against `log₂` radius.
    pub fit: ExponentFit,
    /// `n(1/p₁ − 1/p₂)`
    pub expected_slope: f64,
    pub requested_octaves: u32,
    pub octaves: u32,
    pub truncated: bool,
    pub grid_size: usize,
    pub period: f64,
}

/// Spectral radii `2^{−i}` (dilation) or `2^i` (support growth) for
/// `i ≤ octaves`, clipped to what `max_grid` samples per axis resolve.
fn lp_ratio_sweep(rp1: f64, rp2: f64, n: u32, octaves: u32, growing: bool, max_grid: usize) -> Result<ScalingReport> {
    if !(1..=2).contains(&n) {
        return Err(Error::param("grid checks support n = 1 and n = 2"));
    }
    if octaves < 2 {
        return Err(Error::param("need at least two octaves"));
    }
    let max_grid = if n == 2 { max_grid.min(4096) } else { max_grid };
    // N ≥ 2.2 · L · r_max with L = 16 / r_min
    let mut used = octaves;
    while used >= 2 && (35.2 * 2f64.powi(used as i32)).ceil() as usize > max_grid {
        used -= 1;
    }
    if used < 2 {
        return Err(Error::Geometry(format!("{max_grid} samples per axis resolve less than two octaves")));
    }
    let radii: Vec<f64> = (0..=used as i32).map(|i| if growing { 2f64.powi(i) } else { 2f64.powi(-i) }).collect();
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let period = 16.0 / r_min;
    let size = ((2.2 * period * r_max).ceil() as usize).next_power_of_two();
    let grid = FreqGrid::new(n as usize, size, period)?;
    let ratios: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            let f = inverse(&bump_spectrum(&grid, [0.0, 0.0], r)?)?;
            Ok(lp_quasinorm(&f, rp2)? / lp_quasinorm(&f, rp1)?)
        })
        .collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = radii.iter().zip(&ratios).map(|(&r, &v)| (r.log2(), v)).collect();
    Ok(ScalingReport {
        rp1,
        rp2,
        n,
        radii,
        ratios,
        fit: exponent_fit(&pts)?,
        expected_slope: n as f64 * (rp1 - rp2),
        requested_octaves: octaves,
        octaves: used,
        truncated: used < octaves,
        grid_size: size,
        period,
    })
}

/// `log(‖h_λ‖_{p₂}/‖h_λ‖_{p₁})` against `log λ` for `ĥ_λ = ĥ(·/λ)`, `λ → 0`.
/// A negative slope shows the ratio is unbounded, so no embedding can hold.
pub fn dilation_necessity_check(rp1: f64, rp2: f64, n: u32, octaves: u32, max_grid: usize) -> Result<ScalingReport> {
    if rp2 < rp1 {
        return Err(Error::param("dilation sweep needs 1/p2 >= 1/p1"));
    }
    lp_ratio_sweep(rp1, rp2, n, octaves, false, max_grid)
}

/// `‖f‖_{p₂}/‖f‖_{p₁}` for `supp f̂` in a ball of radius `R`, against `log R`.
pub fn bernstein_check(rp1: f64, rp2: f64, n: u32, octaves: u32, max_grid: usize) -> Result<ScalingReport> {
    if rp2 > rp1 {
        return Err(Error::param("Bernstein scaling needs 1/p2 <= 1/p1"));
    }
    lp_ratio_sweep(rp1, rp2, n, octaves, true, max_grid)
}

fn lab_space(rp: f64, rq: f64, alpha: f64) -> SpaceParams {
    SpaceParams { rp, rq, s: 0.0, alpha, n: 1 }
}

/// Parameter settings, one dimension, on which every term of both branches
/// binds at least once.
pub fn lemma_example_set() -> Vec<(String, SpaceParams, SpaceParams)> {
    let cases = [
        ("le-concentrated", (1.0, 0.0), 0.0, (0.0, 0.5)),
        ("le-spread", (1.0, 1.0), 0.0, (0.0, 0.5)),
        ("le-uniform", (2.0, 0.5), 1.0, (0.25, 0.5)),
        ("gt-concentrated", (1.0, 1.0), 0.5, (0.5, 0.0)),
        ("gt-spread", (0.0, 0.0), 1.0, (0.5, 0.0)),
        ("gt-uniform", (0.5, 0.0), 0.0, (0.5, 0.25)),
        ("gt-tie", (0.5, 0.5), 1.0, (0.5, 0.0)),
        ("equal-alpha", (1.0, 0.0), 0.5, (0.5, 0.5)),
    ];
    cases
        .iter()
        .map(|&(label, (rp1, rp2), rq, (a1, a2))| (label.to_string(), lab_space(rp1, rq, a1), lab_space(rp2, rq, a2)))
        .collect()
}
