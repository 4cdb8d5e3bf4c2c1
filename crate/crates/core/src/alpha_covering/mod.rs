//! α-coverings of the frequency space and their smooth partitions of unity.
//!
//! For `α < 1` the windows are balls centred at `⟨k⟩^{α/(1−α)} k` with radius
//! proportional to `⟨k⟩^{α/(1−α)}`, `k ∈ ℤⁿ`. The symbol of window `k` is the
//! normalized bump quotient `η_k = ρ_k / Σ_l ρ_l`. For `α = 1` the windows
//! are the dyadic Littlewood–Paley annuli built from a fixed profile `φ`.
//!
//! Grids are limited to `n ∈ {1, 2}`; points and lattice indices are stored
//! as two-component arrays with the second component zero when `n = 1`.

pub mod bump;
mod export;
mod index_sets;
mod partition;

pub use export::{read_partition_dump, PartitionDump, write_partition_csv, write_partition_dump, write_partition_json, PartitionRecord};
pub use index_sets::{neighbor_set, IndexSet, Relation};
pub use partition::{build_partition, gradient_profile, verify_partition, Partition, PartitionMember, PartitionReport};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_transforms::FreqGrid;
use bump::{lp_profile, plateau_bump, LP_INNER, LP_OUTER};

pub type Vec2 = [f64; 2];

pub(crate) fn norm2(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

pub(crate) fn dist(a: Vec2, b: Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `⟨x⟩ = (1 + |x|²)^{1/2}`
pub fn bracket(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// Address of one window: a lattice point `k` (`α < 1`) or a dyadic level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WindowIndex {
    Lattice([i64; 2]),
    Dyadic(u32),
}

impl WindowIndex {
    pub fn lattice1(k: i64) -> Self {
        WindowIndex::Lattice([k, 0])
    }

    pub fn euclid(&self) -> f64 {
        match *self {
            WindowIndex::Lattice(k) => (k[0] as f64).hypot(k[1] as f64),
            WindowIndex::Dyadic(j) => j as f64,
        }
    }

    pub fn sup_norm(&self) -> i64 {
        match *self {
            WindowIndex::Lattice(k) => k[0].abs().max(k[1].abs()),
            WindowIndex::Dyadic(j) => j as i64,
        }
    }

    /// Compact label used in CSV exports (`k` for n=1, `k1:k2` for n=2, `jJ`).
    pub fn label(&self, n: usize) -> String {
        match *self {
            WindowIndex::Lattice(k) if n == 1 => k[0].to_string(),
            WindowIndex::Lattice(k) => format!("{}:{}", k[0], k[1]),
            WindowIndex::Dyadic(j) => format!("j{j}"),
        }
    }
}

/// Open frequency region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Ball { center: Vec2, radius: f64 },
    /// Annulus centred at the origin; `inner = 0` is a ball.
    Annulus { inner: f64, outer: f64 },
}

impl Shape {
    pub fn contains_point(&self, x: Vec2) -> bool {
        match *self {
            Shape::Ball { center, radius } => dist(center, x) < radius,
            Shape::Annulus { inner, outer } => {
                let r = norm2(x);
                r > inner && r < outer || (inner == 0.0 && r < outer)
            }
        }
    }

    pub fn intersects(&self, other: &Shape) -> bool {
        match (*self, *other) {
            (Shape::Ball { center: c1, radius: r1 }, Shape::Ball { center: c2, radius: r2 }) => dist(c1, c2) < r1 + r2,
            (Shape::Ball { center, radius }, Shape::Annulus { inner, outer })
            | (Shape::Annulus { inner, outer }, Shape::Ball { center, radius }) => {
                let d = norm2(center);
                d - radius < outer && d + radius > inner
            }
            (Shape::Annulus { inner: a1, outer: b1 }, Shape::Annulus { inner: a2, outer: b2 }) => a1 < b2 && a2 < b1,
        }
    }

    /// Closure of `other` lies inside the closure of `self`.
    pub fn contains(&self, other: &Shape) -> bool {
        match (*self, *other) {
            (Shape::Ball { center: c1, radius: r1 }, Shape::Ball { center: c2, radius: r2 }) => dist(c1, c2) + r2 <= r1,
            (Shape::Annulus { inner, outer }, Shape::Ball { center, radius }) => {
                let d = norm2(center);
                d - radius >= inner && d + radius <= outer
            }
            (Shape::Ball { center, radius }, Shape::Annulus { outer, .. }) => norm2(center) + outer <= radius,
            (Shape::Annulus { inner: a1, outer: b1 }, Shape::Annulus { inner: a2, outer: b2 }) => a1 <= a2 && b2 <= b1,
        }
    }

    /// Whether the region meets the closed axis-aligned box `[lo, hi]`.
    pub fn intersects_box(&self, lo: Vec2, hi: Vec2) -> bool {
        match *self {
            Shape::Ball { center, radius } => box_min_dist(center, lo, hi) < radius,
            Shape::Annulus { inner, outer } => {
                box_min_dist([0.0, 0.0], lo, hi) < outer && (inner == 0.0 || box_max_dist([0.0, 0.0], lo, hi) > inner)
            }
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match *self {
            Shape::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Annulus { outer, .. } => ([-outer, -outer], [outer, outer]),
        }
    }
}

fn box_min_dist(p: Vec2, lo: Vec2, hi: Vec2) -> f64 {
    let dx = (lo[0] - p[0]).max(0.0).max(p[0] - hi[0]);
    let dy = (lo[1] - p[1]).max(0.0).max(p[1] - hi[1]);
    dx.hypot(dy)
}

fn box_max_dist(p: Vec2, lo: Vec2, hi: Vec2) -> f64 {
    let dx = (p[0] - lo[0]).abs().max((p[0] - hi[0]).abs());
    let dy = (p[1] - lo[1]).abs().max((p[1] - hi[1]).abs());
    dx.hypot(dy)
}

/// Geometry of one window together with its clean ball, the region where
/// the symbol is identically one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub index: WindowIndex,
    pub center: Vec2,
    pub scale: f64,
    pub support: Shape,
    pub clean: Shape,
    /// Centre of the largest ball known to lie in `clean`.
    pub anchor: Vec2,
    pub clean_radius: f64,
}

/// Centre `⟨k⟩^{α/(1−α)} k` and scale `⟨k⟩^{α/(1−α)}` of window `k`.
pub fn ball_geometry(k: [i64; 2], alpha: f64) -> Result<(Vec2, f64)> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param(format!(
            "ball geometry needs alpha in [0,1), got {alpha}; use dyadic indexing for alpha = 1"
        )));
    }
    let kf = [k[0] as f64, k[1] as f64];
    let scale = bracket(norm2(kf)).powf(alpha / (1.0 - alpha));
    Ok(([scale * kf[0], scale * kf[1]], scale))
}

/// Construction constants of an α-covering (radii in units of the window
/// scale).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringSpec {
    pub alpha: f64,
    pub n: usize,
    /// Inner radius `c`: the balls `B(centre, c·scale)` must cover.
    pub c_small: f64,
    /// Outer radius `C`: support of every window.
    pub c_big: f64,
    /// Radius of the flat top of the unnormalized bump `ρ`.
    pub plateau: f64,
    /// Truncation bound on `|k|_∞` (`α < 1`) or on `j` (`α = 1`).
    pub k_max: i64,
}

pub const DEFAULT_K_MAX: i64 = 1 << 24;
const C_SMALL_FACTOR: f64 = 1.02;
const C_BIG_FACTOR: f64 = 1.3;
const PLATEAU_FACTOR: f64 = 0.5;

impl CoveringSpec {
    /// Default constants derived from the measured covering radius.
    pub fn calibrated(alpha: f64, n: usize) -> Result<Self> {
        check_dims(alpha, n)?;
        if alpha == 1.0 {
            return Ok(CoveringSpec { alpha, n, c_small: LP_INNER, c_big: LP_OUTER, plateau: LP_INNER, k_max: 40 });
        }
        let rho = covering_radius(alpha, n);
        Ok(CoveringSpec {
            alpha,
            n,
            c_small: C_SMALL_FACTOR * rho,
            c_big: C_BIG_FACTOR * rho,
            plateau: PLATEAU_FACTOR * rho,
            k_max: DEFAULT_K_MAX,
        })
    }

    pub fn with_constants(mut self, c_small: f64, c_big: f64) -> Self {
        self.c_small = c_small;
        self.c_big = c_big;
        self.plateau = self.plateau.min(0.9 * c_small);
        self
    }

    pub fn with_c_big(mut self, c_big: f64) -> Self {
        self.c_big = c_big;
        self
    }

    pub fn with_k_max(mut self, k_max: i64) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_dims(self.alpha, self.n)?;
        if self.alpha == 1.0 {
            return Ok(());
        }
        if !(self.c_small > 0.0 && self.c_big > self.c_small) {
            return Err(Error::param(format!(
                "need 0 < c < C, got c = {}, C = {}",
                self.c_small, self.c_big
            )));
        }
        if !(self.plateau > 0.0 && self.plateau < self.c_big) {
            return Err(Error::param("plateau radius must lie in (0, C)"));
        }
        if self.k_max < 1 {
            return Err(Error::param("k_max must be positive"));
        }
        Ok(())
    }
}

fn check_dims(alpha: f64, n: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must lie in [0,1], got {alpha}")));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::param(format!("coverings are implemented for n in {{1,2}}, got {n}")));
    }
    Ok(())
}

/// `sup_ξ min_k |ξ − c_k| / σ_k`: the smallest inner radius for which the
/// balls cover the whole frequency space.
pub fn covering_radius(alpha: f64, n: usize) -> f64 {
    assert!((0.0..1.0).contains(&alpha));
    let asymptotic_1d = 0.5 / (1.0 - alpha);
    if n == 1 {
        let mut best = asymptotic_1d;
        for k in 0..4096i64 {
            let (c0, s0) = ball_geometry([k, 0], alpha).unwrap();
            let (c1, s1) = ball_geometry([k + 1, 0], alpha).unwrap();
            best = best.max((c1[0] - c0[0]) / (s0 + s1));
        }
        return best;
    }
    let beta = alpha / (1.0 - alpha);
    // locally the centres form the lattice (I + β uuᵀ)ℤ² in scale units
    let mut best: f64 = 0.0;
    for a in 0..=32 {
        let th = std::f64::consts::FRAC_PI_2 * a as f64 / 32.0;
        let u = [th.cos(), th.sin()];
        let j = |v: Vec2| -> Vec2 {
            let d = u[0] * v[0] + u[1] * v[1];
            [v[0] + beta * d * u[0], v[1] + beta * d * u[1]]
        };
        let (b1, b2) = (j([1.0, 0.0]), j([0.0, 1.0]));
        best = best.max(lattice_cover_radius(b1, b2));
    }
    // pre-asymptotic cells near the origin
    let kmax = 10i64;
    for k0 in -kmax..kmax {
        for k1 in -kmax..kmax {
            let corners = [[k0, k1], [k0 + 1, k1], [k0 + 1, k1 + 1], [k0, k1 + 1]].map(|k| ball_geometry(k, alpha).unwrap().0);
            for a in 0..=12 {
                for b in 0..=12 {
                    let (s, t) = (a as f64 / 12.0, b as f64 / 12.0);
                    let x = [0, 1].map(|i| {
                        (1.0 - s) * (1.0 - t) * corners[0][i] + s * (1.0 - t) * corners[1][i] + s * t * corners[2][i] + (1.0 - s) * t * corners[3][i]
                    });
                    let mut m = f64::INFINITY;
                    for d0 in -2..=3 {
                        for d1 in -2..=3 {
                            let (c, sc) = ball_geometry([k0 + d0, k1 + d1], alpha).unwrap();
                            m = m.min(dist(x, c) / sc);
                        }
                    }
                    best = best.max(m);
                }
            }
        }
    }
    best
}

fn lattice_cover_radius(b1: Vec2, b2: Vec2) -> f64 {
    let mut best: f64 = 0.0;
    let steps = 40;
    for a in 0..=steps {
        for b in 0..=steps {
            let (s, t) = (a as f64 / steps as f64, b as f64 / steps as f64);
            let x = [s * b1[0] + t * b2[0], s * b1[1] + t * b2[1]];
            let mut m = f64::INFINITY;
            for i in -2..=3 {
                for j in -2..=3 {
                    let p = [i as f64 * b1[0] + j as f64 * b2[0], i as f64 * b1[1] + j as f64 * b2[1]];
                    m = m.min(dist(x, p));
                }
            }
            best = best.max(m);
        }
    }
    best
}

/// An α-covering with its smooth partition of unity, evaluated analytically.
#[derive(Clone, Debug)]
pub struct Covering {
    spec: CoveringSpec,
    covering_radius: f64,
}

impl Covering {
    /// Validates the constants, including a covering check of `c`.
    pub fn new(spec: CoveringSpec) -> Result<Self> {
        spec.validate()?;
        if spec.alpha == 1.0 {
            return Ok(Covering { spec, covering_radius: 0.0 });
        }
        let rho = covering_radius(spec.alpha, spec.n);
        if spec.c_small < rho {
            return Err(Error::Covering(format!(
                "inner radius c = {} does not cover: need at least {rho:.6} for alpha = {}, n = {}",
                spec.c_small, spec.alpha, spec.n
            )));
        }
        Ok(Covering { spec, covering_radius: rho })
    }

    pub fn calibrated(alpha: f64, n: usize) -> Result<Self> {
        Covering::new(CoveringSpec::calibrated(alpha, n)?)
    }

    pub fn spec(&self) -> &CoveringSpec {
        &self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn is_dyadic(&self) -> bool {
        self.spec.alpha == 1.0
    }

    pub fn measured_covering_radius(&self) -> f64 {
        self.covering_radius
    }

    fn beta(&self) -> f64 {
        self.spec.alpha / (1.0 - self.spec.alpha)
    }

    fn check_index(&self, idx: WindowIndex) -> Result<()> {
        match (idx, self.is_dyadic()) {
            (WindowIndex::Lattice(k), false) => {
                if self.spec.n == 1 && k[1] != 0 {
                    return Err(Error::param("second lattice component must be 0 for n = 1"));
                }
                if idx.sup_norm() > self.spec.k_max {
                    return Err(Error::Truncation(format!("window {idx:?} beyond k_max = {}", self.spec.k_max)));
                }
                Ok(())
            }
            (WindowIndex::Dyadic(j), true) => {
                if j as i64 > self.spec.k_max {
                    return Err(Error::Truncation(format!("dyadic level {j} beyond j_max = {}", self.spec.k_max)));
                }
                Ok(())
            }
            _ => Err(Error::param("window index convention does not match the covering")),
        }
    }

    /// Centre and scale (`2^j` and centre 0 for dyadic windows).
    pub fn center_scale(&self, idx: WindowIndex) -> Result<(Vec2, f64)> {
        self.check_index(idx)?;
        match idx {
            WindowIndex::Lattice(k) => ball_geometry(k, self.spec.alpha),
            WindowIndex::Dyadic(j) => Ok(([0.0, 0.0], 2f64.powi(j as i32))),
        }
    }

    pub fn support(&self, idx: WindowIndex) -> Result<Shape> {
        let (center, scale) = self.center_scale(idx)?;
        Ok(match idx {
            WindowIndex::Lattice(_) => Shape::Ball { center, radius: self.spec.c_big * scale },
            WindowIndex::Dyadic(0) => Shape::Annulus { inner: 0.0, outer: LP_OUTER },
            WindowIndex::Dyadic(j) => {
                let s = 2f64.powi(j as i32);
                Shape::Annulus { inner: LP_INNER * s / 2.0, outer: LP_OUTER * s }
            }
        })
    }

    /// Unnormalized bump `ρ_k` (for dyadic windows the symbol itself).
    pub fn rho(&self, idx: WindowIndex, xi: Vec2) -> f64 {
        match idx {
            WindowIndex::Lattice(k) => {
                let (c, s) = ball_geometry(k, self.spec.alpha).expect("lattice index on alpha < 1");
                plateau_bump(dist(xi, c) / s, self.spec.plateau, self.spec.c_big)
            }
            WindowIndex::Dyadic(j) => self.dyadic_symbol(j, xi),
        }
    }

    fn dyadic_symbol(&self, j: u32, xi: Vec2) -> f64 {
        let r = norm2(xi);
        if j == 0 {
            lp_profile(r)
        } else {
            let s = 2f64.powi(j as i32);
            lp_profile(r / s) - lp_profile(2.0 * r / s)
        }
    }

    /// Symbol `η_k(ξ)` of window `idx`.
    pub fn eta(&self, idx: WindowIndex, xi: Vec2) -> Result<f64> {
        self.check_index(idx)?;
        if self.is_dyadic() {
            if let WindowIndex::Dyadic(j) = idx {
                return Ok(self.dyadic_symbol(j, xi));
            }
        }
        let own = self.rho(idx, xi);
        if own == 0.0 {
            return Ok(0.0);
        }
        let nb = self.neighbors(idx)?;
        let total: f64 = nb.iter().map(|&l| self.rho(l, xi)).sum();
        Ok(own / total)
    }

    /// `η_idx(ξ)` given a precomputed `Λ_idx` (ignored for dyadic windows).
    pub(crate) fn eta_with(&self, idx: WindowIndex, neighbors: &[WindowIndex], xi: Vec2) -> f64 {
        if let WindowIndex::Dyadic(j) = idx {
            return self.dyadic_symbol(j, xi);
        }
        let own = self.rho(idx, xi);
        if own == 0.0 {
            return 0.0;
        }
        let total: f64 = neighbors.iter().map(|&l| self.rho(l, xi)).sum();
        own / total
    }

    /// `Λ_k`: windows whose support meets the support of `idx` (contains `idx`).
    pub fn neighbors(&self, idx: WindowIndex) -> Result<Vec<WindowIndex>> {
        let sup = self.support(idx)?;
        let (lo, hi) = sup.bounding_box();
        let mut out = Vec::new();
        for l in self.windows_touching_box(lo, hi)? {
            if self.support(l)?.intersects(&sup) {
                out.push(l);
            }
        }
        Ok(out)
    }

    /// Full window geometry including the clean ball.
    pub fn window(&self, idx: WindowIndex) -> Result<Window> {
        let (center, scale) = self.center_scale(idx)?;
        let support = self.support(idx)?;
        match idx {
            WindowIndex::Lattice(_) => {
                let mut r = self.spec.c_big * scale;
                for l in self.neighbors(idx)? {
                    if l == idx {
                        continue;
                    }
                    let (cl, sl) = self.center_scale(l)?;
                    r = r.min(dist(center, cl) - self.spec.c_big * sl);
                }
                let r = r.max(0.0);
                Ok(Window {
                    index: idx,
                    center,
                    scale,
                    support,
                    clean: Shape::Ball { center, radius: r },
                    anchor: center,
                    clean_radius: r,
                })
            }
            WindowIndex::Dyadic(0) => Ok(Window {
                index: idx,
                center,
                scale,
                support,
                clean: Shape::Annulus { inner: 0.0, outer: LP_INNER },
                anchor: [0.0, 0.0],
                clean_radius: LP_INNER,
            }),
            WindowIndex::Dyadic(j) => {
                let s = 2f64.powi(j as i32);
                let (a, b) = (LP_OUTER * s / 2.0, LP_INNER * s);
                Ok(Window {
                    index: idx,
                    center,
                    scale,
                    support,
                    clean: Shape::Annulus { inner: a, outer: b },
                    anchor: [(a + b) / 2.0, 0.0],
                    clean_radius: (b - a) / 2.0,
                })
            }
        }
    }

    /// Weight `⟨k⟩^{s/(1−α)}` or `2^{js}`.
    pub fn weight(&self, idx: WindowIndex, s: f64) -> f64 {
        crate::grid_transforms::sequence::index_weight(idx, s, self.spec.alpha)
    }

    /// `log₂` of `⟨k⟩^{1/(1−α)}` (or `j`): the dyadic scale of a window.
    pub fn scale_index(&self, idx: WindowIndex) -> f64 {
        match idx {
            WindowIndex::Lattice(_) => bracket(idx.euclid()).log2() / (1.0 - self.spec.alpha),
            WindowIndex::Dyadic(j) => j as f64,
        }
    }

    /// Window `t·e₁` (or dyadic level `t`).
    pub fn ray_index(&self, t: i64) -> WindowIndex {
        if self.is_dyadic() {
            WindowIndex::Dyadic(t.max(0) as u32)
        } else {
            WindowIndex::lattice1(t)
        }
    }

    /// Window on the positive `e₁` ray whose anchor is closest to `x·e₁`.
    pub fn nearest_on_ray(&self, x: f64) -> Result<WindowIndex> {
        if self.is_dyadic() {
            let mut best = (f64::INFINITY, WindowIndex::Dyadic(0));
            for j in 0..=self.spec.k_max.min(62) as u32 {
                let w = self.window(WindowIndex::Dyadic(j))?;
                let d = (w.anchor[0] - x).abs();
                if d < best.0 {
                    best = (d, w.index);
                }
            }
            return Ok(best.1);
        }
        let k0 = self.inverse_radius(x.abs()).round() as i64 * if x < 0.0 { -1 } else { 1 };
        let mut best = (f64::INFINITY, WindowIndex::lattice1(k0));
        for k in k0 - 2..=k0 + 2 {
            let (c, _) = ball_geometry([k, 0], self.spec.alpha)?;
            let d = (c[0] - x).abs();
            if d < best.0 {
                best = (d, WindowIndex::lattice1(k));
            }
        }
        Ok(best.1)
    }

    /// Real `r ≥ 0` with `⟨r⟩^{β} r = x`.
    fn inverse_radius(&self, x: f64) -> f64 {
        let beta = self.beta();
        let g = |r: f64| bracket(r).powf(beta) * r;
        let (mut lo, mut hi) = (0.0, x.max(1.0));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All windows whose support meets the closed box `[lo, hi]`.
    pub fn windows_touching_box(&self, lo: Vec2, hi: Vec2) -> Result<Vec<WindowIndex>> {
        let (lo, hi) = if self.spec.n == 1 { ([lo[0], 0.0], [hi[0], 0.0]) } else { (lo, hi) };
        if self.is_dyadic() {
            let mut out = Vec::new();
            let mut j = 0u32;
            loop {
                let sup = self.support_unchecked_dyadic(j);
                if sup.intersects_box(lo, hi) {
                    if j as i64 > self.spec.k_max {
                        return Err(Error::Truncation(format!("box reaches dyadic level {j} > j_max = {}", self.spec.k_max)));
                    }
                    out.push(WindowIndex::Dyadic(j));
                } else if let Shape::Annulus { inner, .. } = sup {
                    if inner > box_max_dist([0.0, 0.0], lo, hi) {
                        break;
                    }
                }
                j += 1;
            }
            return Ok(out);
        }
        let margin = 2 + (2.0 * self.spec.c_big).ceil() as i64;
        let mut m = margin;
        loop {
            let (klo, khi) = self.index_bounds(lo, hi, m);
            let mut out = Vec::new();
            let mut edge_hit = false;
            for k0 in klo[0]..=khi[0] {
                for k1 in klo[1]..=khi[1] {
                    let (c, s) = ball_geometry([k0, k1], self.spec.alpha)?;
                    let sup = Shape::Ball { center: c, radius: self.spec.c_big * s };
                    if sup.intersects_box(lo, hi) {
                        let on_edge = k0 == klo[0] || k0 == khi[0] || (self.spec.n == 2 && (k1 == klo[1] || k1 == khi[1]));
                        edge_hit |= on_edge;
                        out.push(WindowIndex::Lattice([k0, k1]));
                    }
                }
            }
            if !edge_hit {
                for idx in &out {
                    if idx.sup_norm() > self.spec.k_max {
                        return Err(Error::Truncation(format!(
                            "box [{lo:?}, {hi:?}] reaches window {idx:?} beyond k_max = {}",
                            self.spec.k_max
                        )));
                    }
                }
                return Ok(out);
            }
            m *= 2;
            if m > 4096 {
                return Err(Error::Truncation("window enumeration did not converge".into()));
            }
        }
    }

    fn support_unchecked_dyadic(&self, j: u32) -> Shape {
        if j == 0 {
            Shape::Annulus { inner: 0.0, outer: LP_OUTER }
        } else {
            let s = 2f64.powi(j as i32);
            Shape::Annulus { inner: LP_INNER * s / 2.0, outer: LP_OUTER * s }
        }
    }

    // candidate lattice box for windows near [lo, hi]
    fn index_bounds(&self, lo: Vec2, hi: Vec2, m: i64) -> ([i64; 2], [i64; 2]) {
        let inv = |x: Vec2| -> Vec2 {
            let r = norm2(x);
            if r == 0.0 {
                return [0.0, 0.0];
            }
            let kr = self.inverse_radius(r);
            [x[0] / r * kr, x[1] / r * kr]
        };
        let mut kmin = [f64::INFINITY; 2];
        let mut kmax = [f64::NEG_INFINITY; 2];
        let steps = if self.spec.n == 1 { 1 } else { 16 };
        let mut visit = |x: Vec2| {
            let k = inv(x);
            for i in 0..2 {
                kmin[i] = kmin[i].min(k[i]);
                kmax[i] = kmax[i].max(k[i]);
            }
        };
        for a in 0..=steps {
            let t = a as f64 / steps as f64;
            let x0 = lo[0] + t * (hi[0] - lo[0]);
            let x1 = lo[1] + t * (hi[1] - lo[1]);
            visit([x0, lo[1]]);
            visit([x0, hi[1]]);
            visit([lo[0], x1]);
            visit([hi[0], x1]);
        }
        if lo[0] <= 0.0 && hi[0] >= 0.0 && lo[1] <= 0.0 && hi[1] >= 0.0 {
            visit([0.0, 0.0]);
        }
        let klo = [kmin[0].floor() as i64 - m, if self.spec.n == 2 { kmin[1].floor() as i64 - m } else { 0 }];
        let khi = [kmax[0].ceil() as i64 + m, if self.spec.n == 2 { kmax[1].ceil() as i64 + m } else { 0 }];
        (klo, khi)
    }

    /// Sparse samples of `η_idx` on a frequency grid (only bins in the
    /// support's bounding box are visited).
    pub fn symbol_on(&self, idx: WindowIndex, grid: &FreqGrid) -> Result<SparseSymbol> {
        let sup = self.support(idx)?;
        let neighbors = if self.is_dyadic() { Vec::new() } else { self.neighbors(idx)? };
        let (lo, hi) = sup.bounding_box();
        let mut bins = Vec::new();
        let mut values = Vec::new();
        for flat in grid.bins_in_box(lo, hi) {
            let xi = grid.freq(flat);
            let v = if self.is_dyadic() {
                self.rho(idx, xi)
            } else {
                let own = self.rho(idx, xi);
                if own == 0.0 {
                    0.0
                } else {
                    let total: f64 = neighbors.iter().map(|&l| self.rho(l, xi)).sum();
                    own / total
                }
            };
            if v != 0.0 {
                bins.push(flat);
                values.push(v);
            }
        }
        Ok(SparseSymbol { index: idx, bins, values })
    }

    /// Windows meeting a set of frequency bins, restricted to those whose
    /// symbol does not vanish on it.
    pub fn windows_touching_bins(&self, grid: &FreqGrid, bins: &[usize]) -> Result<Vec<WindowIndex>> {
        if bins.is_empty() {
            return Ok(Vec::new());
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for &b in bins {
            let xi = grid.freq(b);
            for i in 0..2 {
                lo[i] = lo[i].min(xi[i]);
                hi[i] = hi[i].max(xi[i]);
            }
        }
        self.windows_touching_box(lo, hi)
    }
}

/// `η_k` sampled on the bins of a frequency grid where it is non-zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymbol {
    pub index: WindowIndex,
    pub bins: Vec<usize>,
    pub values: Vec<f64>,
}

/// Set of window indices, ordered.
pub type IndexSetMembers = BTreeSet<WindowIndex>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_geometry_examples() {
        for a in [0.0, 0.25, 0.5, 0.9] {
            let (c, s) = ball_geometry([0, 0], a).unwrap();
            assert_eq!(c, [0.0, 0.0]);
            assert_eq!(s, 1.0);
        }
        for k in [-5, 1, 17] {
            let (c, s) = ball_geometry([k, 0], 0.0).unwrap();
            assert_eq!(c, [k as f64, 0.0]);
            assert_eq!(s, 1.0);
        }
        let (c, s) = ball_geometry([3, 0], 0.5).unwrap();
        assert!((c[0] - 9.486_832_980_505_138).abs() < 1e-12);
        assert!((s - 3.162_277_660_168_379_5).abs() < 1e-12);
        assert!(ball_geometry([1, 0], 1.0).is_err());
    }

    #[test]
    fn covering_radius_limits() {
        assert!((covering_radius(0.0, 1) - 0.5).abs() < 1e-12);
        assert!((covering_radius(0.5, 1) - 1.0).abs() < 1e-9);
        let r2 = covering_radius(0.0, 2);
        assert!((r2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3, "{r2}");
    }

    #[test]
    fn too_small_inner_radius_is_a_covering_failure() {
        let spec = CoveringSpec::calibrated(0.0, 1).unwrap().with_constants(0.4, 0.85);
        assert!(matches!(Covering::new(spec), Err(Error::Covering(_))));
    }

    #[test]
    fn lambda_for_unit_lattice() {
        let spec = CoveringSpec::calibrated(0.0, 1).unwrap().with_c_big(0.8);
        let cov = Covering::new(spec).unwrap();
        let nb = cov.neighbors(WindowIndex::lattice1(5)).unwrap();
        assert_eq!(nb, vec![WindowIndex::lattice1(4), WindowIndex::lattice1(5), WindowIndex::lattice1(6)]);
    }

    #[test]
    fn eta_is_one_at_an_isolated_centre() {
        let cov = Covering::calibrated(0.5, 1).unwrap();
        let idx = WindowIndex::lattice1(12);
        let w = cov.window(idx).unwrap();
        assert!(w.clean_radius > 0.5 * w.scale);
        assert_eq!(cov.eta(idx, w.center).unwrap(), 1.0);
    }

    #[test]
    fn eta_sums_to_one_pointwise() {
        for (alpha, n) in [(0.0, 1), (0.25, 1), (0.5, 1), (0.75, 1), (0.0, 2), (0.5, 2)] {
            let cov = Covering::calibrated(alpha, n).unwrap();
            for i in 0..40 {
                let t = i as f64 * 0.731 - 11.0;
                let xi = if n == 1 { [t * 3.3, 0.0] } else { [t * 2.1, -t * 1.3 + 0.4] };
                let ws = cov.windows_touching_box(xi, xi).unwrap();
                let total: f64 = ws.iter().map(|&w| cov.eta(w, xi).unwrap()).sum();
                assert!((total - 1.0).abs() < 1e-12, "alpha={alpha} n={n} xi={xi:?} total={total}");
            }
        }
    }

    #[test]
    fn dyadic_symbols_telescope() {
        let cov = Covering::calibrated(1.0, 1).unwrap();
        for r in [0.0, 0.7, 1.4, 3.3, 100.0, 1000.0] {
            let ws = cov.windows_touching_box([r, 0.0], [r, 0.0]).unwrap();
            let total: f64 = ws.iter().map(|&w| cov.eta(w, [r, 0.0]).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn shapes() {
        let b = Shape::Ball { center: [3.0, 0.0], radius: 1.0 };
        let a = Shape::Annulus { inner: 2.5, outer: 4.5 };
        assert!(a.intersects(&b));
        assert!(!a.contains(&b));
        let small = Shape::Ball { center: [3.5, 0.0], radius: 0.5 };
        assert!(a.contains(&small));
        assert!(b.contains(&small));
        assert!(!small.contains(&b));
        assert!(Shape::Ball { center: [0.0, 0.0], radius: 10.0 }.contains(&a));
    }
}
