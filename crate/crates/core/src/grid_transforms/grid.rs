use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alpha_covering::Vec2;
use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, L)ⁿ` with `N` samples per axis and its dual
/// frequency lattice `(1/L)ℤⁿ`.
///
/// Frequency bins cover `(carrier + [−N/2, N/2)) / L` on each axis, so a
/// function whose spectrum sits far from the origin can be held on a small
/// grid. Samples stay true point values `f(x_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreqGrid {
    pub n: usize,
    pub size: usize,
    pub period: f64,
    pub carrier: [i64; 2],
}

impl FreqGrid {
    pub fn new(n: usize, size: usize, period: f64) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::param(format!("grids support n in {{1,2}}, got {n}")));
        }
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::param(format!("grid size must be a power of two >= 2, got {size}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::param(format!("period must be positive, got {period}")));
        }
        if n == 2 && size > 1 << 12 {
            return Err(Error::param("2-D grids are limited to 4096 samples per axis"));
        }
        Ok(FreqGrid { n, size, period, carrier: [0, 0] })
    }

    pub fn with_carrier(mut self, carrier: [i64; 2]) -> Result<Self> {
        if self.n == 1 && carrier[1] != 0 {
            return Err(Error::param("carrier must have zero second component for n = 1"));
        }
        self.carrier = carrier;
        Ok(self)
    }

    /// Total number of samples `Nⁿ`.
    pub fn len(&self) -> usize {
        self.size.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `(L/N)ⁿ`.
    pub fn cell_volume(&self) -> f64 {
        (self.period / self.size as f64).powi(self.n as i32)
    }

    /// Physical point of flat sample index.
    pub fn point(&self, flat: usize) -> Vec2 {
        let h = self.period / self.size as f64;
        let m = self.split(flat);
        [m[0] as f64 * h, m[1] as f64 * h]
    }

    /// Axis indices `(i₀, i₁)` of a flat row-major index (`i₁ = 0` for n=1).
    pub fn split(&self, flat: usize) -> [usize; 2] {
        if self.n == 1 {
            [flat, 0]
        } else {
            [flat / self.size, flat % self.size]
        }
    }

    pub fn join(&self, m: [usize; 2]) -> usize {
        if self.n == 1 {
            m[0]
        } else {
            m[0] * self.size + m[1]
        }
    }

    /// Integer frequency (in units of `1/L`) of a bin.
    pub fn freq_index(&self, flat: usize) -> [i64; 2] {
        let m = self.split(flat);
        let half = (self.size / 2) as i64;
        let signed = |v: usize| {
            let v = v as i64;
            if v < half {
                v
            } else {
                v - self.size as i64
            }
        };
        if self.n == 1 {
            [self.carrier[0] + signed(m[0]), 0]
        } else {
            [self.carrier[0] + signed(m[0]), self.carrier[1] + signed(m[1])]
        }
    }

    pub fn freq(&self, flat: usize) -> Vec2 {
        let f = self.freq_index(flat);
        [f[0] as f64 / self.period, f[1] as f64 / self.period]
    }

    /// Bin holding integer frequency `f`, if inside the band.
    pub fn flat_of_freq_index(&self, f: [i64; 2]) -> Option<usize> {
        let half = (self.size / 2) as i64;
        let axis = |i: usize| -> Option<usize> {
            let d = f[i] - self.carrier[i];
            if d < -half || d >= half {
                None
            } else {
                Some(d.rem_euclid(self.size as i64) as usize)
            }
        };
        if self.n == 1 {
            if f[1] != 0 {
                return None;
            }
            axis(0)
        } else {
            Some(self.join([axis(0)?, axis(1)?]))
        }
    }

    /// Extreme bin frequencies per axis.
    pub fn band_box(&self) -> (Vec2, Vec2) {
        let half = (self.size / 2) as i64;
        let lo = |c: i64| (c - half) as f64 / self.period;
        let hi = |c: i64| (c + half - 1) as f64 / self.period;
        if self.n == 1 {
            ([lo(self.carrier[0]), 0.0], [hi(self.carrier[0]), 0.0])
        } else {
            ([lo(self.carrier[0]), lo(self.carrier[1])], [hi(self.carrier[0]), hi(self.carrier[1])])
        }
    }

    /// Bins whose frequency lies in the closed box `[lo, hi]`.
    pub fn bins_in_box(&self, lo: Vec2, hi: Vec2) -> Vec<usize> {
        let half = (self.size / 2) as i64;
        let range = |i: usize| -> (i64, i64) {
            let a = (lo[i] * self.period).ceil() as i64;
            let b = (hi[i] * self.period).floor() as i64;
            (a.max(self.carrier[i] - half), b.min(self.carrier[i] + half - 1))
        };
        let mut out = Vec::new();
        let (a0, b0) = range(0);
        if self.n == 1 {
            if lo[1] > 0.0 || hi[1] < 0.0 {
                return out;
            }
            for f in a0..=b0 {
                out.push(self.flat_of_freq_index([f, 0]).expect("in band"));
            }
        } else {
            let (a1, b1) = range(1);
            for f0 in a0..=b0 {
                for f1 in a1..=b1 {
                    out.push(self.flat_of_freq_index([f0, f1]).expect("in band"));
                }
            }
        }
        out
    }

    pub(crate) fn check_same(&self, other: &FreqGrid) -> Result<()> {
        if self != other {
            return Err(Error::param(format!("grid mismatch: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Whether the values hold point samples or Fourier-transform samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Space,
    Frequency,
}

/// Complex samples on a [`FreqGrid`] (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: FreqGrid,
    pub domain: Domain,
    pub values: Vec<Complex64>,
    /// Declared spectral support radius around the origin, if any.
    pub band_limit: Option<f64>,
}

impl GridFunction {
    pub fn new(grid: FreqGrid, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        Ok(GridFunction { grid, domain, values, band_limit: None })
    }

    pub fn zeros(grid: FreqGrid, domain: Domain) -> Self {
        let len = grid.len();
        GridFunction { grid, domain, values: vec![Complex64::new(0.0, 0.0); len], band_limit: None }
    }

    /// Point samples of `f` on the grid.
    pub fn from_fn(grid: FreqGrid, f: impl Fn(Vec2) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        GridFunction { grid, domain: Domain::Space, values, band_limit: None }
    }

    /// Fourier samples `f̂(ξ_m)` on the bins.
    pub fn from_spectrum_fn(grid: FreqGrid, f: impl Fn(Vec2) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.freq(i))).collect();
        GridFunction { grid, domain: Domain::Frequency, values, band_limit: None }
    }

    pub fn with_band_limit(mut self, radius: f64) -> Self {
        self.band_limit = Some(radius);
        self
    }

    pub fn expect_domain(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::param(format!("expected {domain:?}-domain samples, got {:?}", self.domain)));
        }
        Ok(())
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for v in &mut self.values {
            *v *= c;
        }
        self
    }

    pub fn add_assign(&mut self, other: &GridFunction) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.domain != other.domain {
            return Err(Error::param("cannot add samples from different domains"));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }

    /// Discrete ℓ² distance relative to `‖other‖`.
    pub fn relative_l2_distance(&self, other: &GridFunction) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
    }
}
